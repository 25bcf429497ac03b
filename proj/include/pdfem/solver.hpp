#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pdfem/dofmap.hpp"
#include "pdfem/sparse.hpp"

namespace pdfem {

struct DirichletBC {
    std::vector<int> dofs;
    std::vector<double> values;

    void add(int dof, double value) {
        dofs.push_back(dof);
        values.push_back(value);
    }
};

/// K with constrained rows/columns eliminated symmetrically; the right-hand
/// side picks up -K_fc u_c. recover() re-inserts prescribed values.
struct ReducedSystem {
    CsrMatrix k;
    std::vector<double> rhs;
    std::vector<int> free_dofs;     // free index -> original dof
    std::vector<double> full_values; // prescribed values, 0 on free dofs

    std::vector<double> recover(std::span<const double> x_free) const;
};

ReducedSystem apply_dirichlet(const CsrMatrix& k, std::span<const double> rhs,
                              const DirichletBC& bc);

/// Pin constraints removing the rigid modes of a pure-Neumann problem:
/// one DOF (thermal), 3 constraints (2D elastic), 6 via three non-collinear
/// nodes (3D elastic). Verifies the load is orthogonal to every rigid mode
/// (relative tolerance 1e-8) and throws EquilibriumError otherwise.
DirichletBC pin_rigid_modes(std::span<const double> rhs, Physics physics,
                            const StructuredGrid& grid);

/// Same for an arbitrary nodal point set (conformal meshes).
DirichletBC pin_rigid_modes_points(std::span<const double> rhs, Physics physics,
                                   std::span<const Vec3> positions, int dim);

/// Subtract the mean (thermal) or the Euclidean-best-fit rigid motion
/// (elastic) so pure-Neumann solutions do not depend on the pin choice.
void remove_rigid_best_fit(std::span<double> u, Physics physics,
                           std::span<const Vec3> positions, int dim);

enum class Preconditioner { none, jacobi, ic0 };

struct CgOptions {
    double tol = 1e-10;
    long max_iter = 0; // 0: 20*sqrt(n) + 1000
    Preconditioner preconditioner = Preconditioner::ic0;
};

struct SolveReport {
    long iterations = 0;
    double rel_residual = 0.0;
    double seconds = 0.0;
    std::string solver = "cg";
    std::string preconditioner;
    bool fallback = false; // IC(0) broke down, diagonal preconditioner used

    std::string to_json() const;
};

struct SolveResult {
    std::vector<double> x;
    SolveReport report;
    bool converged = false;
};

/// Preconditioned conjugate gradient on a symmetric positive (semi)definite
/// matrix. Non-convergence returns converged = false with the best iterate;
/// IC(0) breakdown falls back to the diagonal preconditioner and flags the
/// report.
SolveResult solve_cg(const CsrMatrix& k, std::span<const double> rhs, const CgOptions& opts = {});

/// Zero-fill incomplete Cholesky. Exposed for tests; solve_cg owns fallback.
struct Ic0 {
    CsrMatrix lower; // L with A ~ L L^T
    CsrMatrix upper; // L^T, kept for the backward sweep
    bool ok = false;

    void apply(std::span<const double> r, std::span<double> z) const;
};
Ic0 ic0_factor(const CsrMatrix& a);

} // namespace pdfem
