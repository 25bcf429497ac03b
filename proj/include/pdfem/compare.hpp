#pragma once

#include <functional>

#include "pdfem/homogenize.hpp"

namespace pdfem {

/// Classical FEM problem on a conformal mesh with material interfaces along
/// element boundaries. Tag 1 = matrix phase, tag 2 = inclusion phase.
struct ConformalProblem {
    UnstructuredMesh mesh;
    Physics physics = Physics::thermal;
    DenseMatrix coef_mat;
    DenseMatrix coef_inc;
    CgOptions solver;

    void validate_tags() const;
};

/// Reference solve with the same solver stack (KUBC Dirichlet or SUBC
/// pinned-Neumann batteries). Returns nodal values, node-major.
std::vector<double> solve_conformal(const ConformalProblem& problem, const LoadCase& lc,
                                    SolveReport* report = nullptr);

/// Interpolate a PDFEM grid field at conformal mesh nodes through a
/// substitution matrix (same machinery as the inclusion coupling).
std::vector<double> project_pdfem(const StructuredGrid& grid, const UnstructuredMesh& conformal,
                                  std::span<const double> u_pdfem, Physics physics);

struct DifferenceReport {
    double euclidean = 0.0;
    double l2 = 0.0;
    double h1_semi = 0.0;
    int n = 0;          // grid resolution
    double h = 0.0;     // grid characteristic length
    int conformal_dofs = 0;

    std::string to_json() const;
};

/// Relative differences of two fields on the conformal DOF space:
/// plain vector 2-norm, M-weighted L2, and H1 semi-norm through a
/// unit-material scalar stiffness. M and K are scalar (per-component)
/// operators on the conformal mesh.
DifferenceReport relative_difference(std::span<const double> u_fem,
                                     std::span<const double> u_projected, const CsrMatrix& m_scalar,
                                     const CsrMatrix& k_scalar, int dofs_per_node);

/// Remove the Neumann gauge (M-weighted mean for scalars, M-orthogonal rigid
/// motion for displacements) so SUBC fields from different discretizations
/// are comparable.
void remove_gauge(std::span<double> u, const UnstructuredMesh& mesh, const CsrMatrix& m_scalar,
                  Physics physics);

/// Largest nodal deviation relative to the reference's largest nodal value,
/// with the node attaining it. Elastic fields compare per-node vector norms.
std::pair<double, int> max_nodal_discrepancy(std::span<const double> u_fem,
                                             std::span<const double> u_projected,
                                             int dofs_per_node);

double fit_loglog_slope(std::span<const double> x, std::span<const double> y);

struct ConvergenceRow {
    int n = 0;
    double h = 0.0;
    double eta = 0.0;
    double euclidean = 0.0, l2 = 0.0, h1_semi = 0.0;
    bool eta_warning = false;
};

struct ConvergenceTable {
    std::vector<ConvergenceRow> rows;
    double slope_euclidean = 0.0, slope_l2 = 0.0, slope_h1 = 0.0;

    std::string to_csv() const;
};

/// Field-difference convergence fixture: the inclusion and conformal
/// reference meshes are regenerated / reloaded per resolution.
struct ConvergenceFixture {
    Physics physics = Physics::thermal;
    DenseMatrix coef_mat, coef_inc;
    LoadCase bc;
    std::function<UnstructuredMesh(int)> inclusion_for;
    std::function<UnstructuredMesh(int)> conformal_for;
    CgOptions solver;
};

ConvergenceTable convergence_study(const ConvergenceFixture& fixture,
                                   const std::vector<int>& resolutions);

struct EffectiveConvergenceTable {
    std::vector<int> resolutions;
    std::vector<double> h;
    std::vector<double> rel_diff; // Frobenius difference vs the reference tensor
    DenseMatrix reference;
    double slope = 0.0;

    std::string to_csv() const;
};

/// Effective-coefficient convergence: |coef(n) - coef(n_ref)| against h.
EffectiveConvergenceTable effective_convergence(
    const std::function<PdfemProblem(int)>& problem_for, BcKind kind,
    const std::vector<int>& resolutions, int reference_n);

} // namespace pdfem
