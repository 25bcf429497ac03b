#pragma once

#include "pdfem/assembly.hpp"
#include "pdfem/solver.hpp"

namespace pdfem {

enum class BcKind { kubc, subc, periodic };

const char* bc_name(BcKind k);

/// Worker cap for load-case batteries (cases are independent; results merge
/// in case order either way). Default 1; the CLI wires --threads and the
/// PDFEM_THREADS environment variable here.
void set_max_threads(int n);
int max_threads();

/// One assembled phantom-domain problem: structured grid hosting the whole
/// domain, inclusion mesh coupled through the substitution matrix, isotropic
/// or Voigt coefficients for both phases.
struct PdfemProblem {
    StructuredGrid grid;
    Physics physics = Physics::thermal;
    DenseMatrix coef_mat; // conductivity (d x d) or stiffness (Voigt m x m)
    DenseMatrix coef_inc;
    UnstructuredMesh inclusion; // merged; may be empty (homogeneous problem)
    bool periodic = false;
    CgOptions solver;

    int dim() const { return grid.dim(); }
    int voigt_dim() const { return physics == Physics::thermal ? dim() : (dim() == 2 ? 3 : 6); }
};

/// Macroscopic load: gradient g / flux Q (thermal, d entries) or Voigt
/// strain / stress (elastic, m entries; engineering shear for strains).
struct LoadCase {
    BcKind kind = BcKind::kubc;
    std::vector<double> macro;
};

struct CaseSolution {
    std::vector<double> u_full; // total field at all grid nodes
    std::vector<double> v_inc;  // total field at inclusion-mesh nodes (via S)
    SolveReport report;
};

/// Grid + inclusion operators assembled once and reused across load cases.
class PdfemSystem {
public:
    explicit PdfemSystem(const PdfemProblem& problem);

    const PdfemProblem& problem() const { return *problem_; }
    const DofMap& dofmap() const { return dofmap_; }
    const SubstitutionMatrix& substitution() const { return subst_; }
    const CsrMatrix& matrix() const { return k_; }
    bool has_inclusion() const { return has_inclusion_; }

    struct BuildTimings {
        double substitution = 0.0;
        double assembly = 0.0;
    };
    const BuildTimings& build_timings() const { return timings_; }

    CaseSolution solve_case(const LoadCase& lc) const;

    /// Volume-averaged flux (thermal, d) or stress (elastic, Voigt m) of a
    /// total field, evaluated through the energy split: the homogeneous-
    /// coefficient integral over the grid plus the difference-coefficient
    /// integral over the inclusion mesh.
    std::vector<double> average_flux(const CaseSolution& sol) const;

    /// Geometric average of grad u (thermal) or of the Voigt strain
    /// (elastic) over the grid; no material weighting.
    std::vector<double> average_gradient(std::span<const double> u_full) const;

    /// Bilinear energy a(u, w) of two total fields (grid split + inclusion
    /// correction). Used for the energy cross-check.
    double energy(const CaseSolution& a, const CaseSolution& b) const;

    /// Nodal interpolation of the affine field with the given macro data.
    std::vector<double> affine_grid_values(std::span<const double> macro) const;

private:
    const PdfemProblem* problem_;
    DofMap dofmap_;
    SubstitutionMatrix subst_;
    CsrMatrix k_inc_;
    CsrMatrix k_;
    DenseMatrix local_template_;
    bool has_inclusion_ = false;
    BuildTimings timings_;

    CaseSolution solve_kubc(const LoadCase& lc) const;
    CaseSolution solve_subc(const LoadCase& lc) const;
    CaseSolution solve_periodic(const LoadCase& lc) const;
};

struct EffectiveTensor {
    Physics physics = Physics::thermal;
    BcKind bc = BcKind::kubc;
    int dim = 2;
    DenseMatrix matrix; // d x d or Voigt m x m
    double volume_fraction = 0.0;
    /// Max |energy identity - tensor entry|; > 1e-6 relative flags an
    /// integration inconsistency.
    double energy_crosscheck = 0.0;

    double sym_error_rel() const;
    std::string to_json() const;
    std::string to_csv() const;
};

struct HomogenizeResult {
    EffectiveTensor tensor;
    std::vector<SolveReport> reports;
};

HomogenizeResult run_kubc(const PdfemProblem& problem);
HomogenizeResult run_subc(const PdfemProblem& problem);
HomogenizeResult run_periodic(const PdfemProblem& problem);
HomogenizeResult run_battery(const PdfemProblem& problem, BcKind kind);

/// Unit macroscopic load cases for a battery: d gradients or m Voigt cases.
std::vector<LoadCase> unit_macro_cases(Physics physics, int dim, BcKind kind);

/// Arithmetic (Voigt) and harmonic (Reuss) mixture tensors.
std::pair<DenseMatrix, DenseMatrix> voigt_reuss_bounds(double volume_fraction,
                                                       const DenseMatrix& coef_mat,
                                                       const DenseMatrix& coef_inc);

struct BoundsCheck {
    bool inside = false;
    double min_eig_above_reuss = 0.0; // smallest eigenvalue of (T - reuss)
    double min_eig_below_voigt = 0.0; // smallest eigenvalue of (voigt - T)
};
BoundsCheck check_bounds(const DenseMatrix& tensor, const DenseMatrix& reuss,
                         const DenseMatrix& voigt, double tol = 1e-8);

} // namespace pdfem
