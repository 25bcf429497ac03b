#pragma once

#include <span>
#include <vector>

#include "pdfem/dense.hpp"
#include "pdfem/grid.hpp"

namespace pdfem::elements {

// Reference elements:
//   tri3  (0,0),(1,0),(0,1)                       barycentric-linear
//   qua4  corners (+-1,+-1), counterclockwise     bilinear
//   tet4  (0,0,0),(1,0,0),(0,1,0),(0,0,1)         linear
//   hex8  corners (+-1,+-1,+-1), qua4 order per z trilinear

struct QuadratureRule {
    std::vector<Vec3> points;
    std::vector<double> weights;
    int size() const { return static_cast<int>(points.size()); }
};

/// Rule used for stiffness integration: exact 1-point for simplices,
/// 2x2(x2) Gauss for qua4/hex8.
const QuadratureRule& stiffness_rule(ElementType t);

/// Rule used for consistent mass: degree-2 exact on every element type.
const QuadratureRule& mass_rule(ElementType t);

/// Tensor Gauss-Legendre rule for qua4/hex8, 1..5 points per axis.
QuadratureRule gauss_rule(ElementType t, int points_per_axis);

/// Nodal shape values at a reference point. Throws ValidationError when the
/// point lies outside the reference element by more than 1e-9.
void shape_values(ElementType t, const Vec3& ref, double* out);

/// Reference-coordinate shape gradients, row-major dim x nodes.
void shape_gradients(ElementType t, const Vec3& ref, double* out);

struct ThermalMaterial {
    DenseMatrix conductivity; // d x d, SPD

    static ThermalMaterial isotropic(int dim, double lambda);
    static ThermalMaterial anisotropic(DenseMatrix tensor);
};

enum class ElasticModel { plane_strain, three_d };

struct ElasticMaterial {
    double bulk_modulus = 0.0;
    double poisson_ratio = 0.0;
    ElasticModel model = ElasticModel::plane_strain;

    DenseMatrix constitutive() const; // Voigt, engineering shear strains
};

struct Contrast {
    double value;
    explicit Contrast(double c) : value(c) {
        if (!(c > 0.0)) throw ValidationError("contrast must be > 0");
    }
};

/// Constitutive matrix from (bulk modulus, Poisson ratio).
/// E = 3k(1-2nu), mu = E/(2(1+nu)), lambda = E nu/((1+nu)(1-2nu)).
/// Voigt ordering 11,22,12 (2D plane strain) or 11,22,33,23,13,12 (3D).
DenseMatrix elastic_D(double k, double nu, ElasticModel model);

/// Element conductivity matrix for integrand (lambda grad u) . grad u.
/// `lambda` is d x d symmetric; negative eigenvalues are permitted (the
/// inclusion assembly integrates a difference tensor).
DenseMatrix local_stiffness_thermal(ElementType t, std::span<const Vec3> coords,
                                    const DenseMatrix& lambda,
                                    const QuadratureRule* rule = nullptr);

/// Element stiffness B^T D B for Voigt matrix D (m x m, possibly indefinite).
/// DOF order is node-major, component-minor.
DenseMatrix local_stiffness_elastic(ElementType t, std::span<const Vec3> coords,
                                    const DenseMatrix& D,
                                    const QuadratureRule* rule = nullptr);

/// Consistent mass with unit density (scalar field; expand per component for
/// vector problems).
DenseMatrix local_mass(ElementType t, std::span<const Vec3> coords);

/// Element measure (area/volume) by quadrature; throws GeometryError on a
/// non-positive Jacobian.
double element_measure(ElementType t, std::span<const Vec3> coords);

// Counts calls into the local integration loops. assemble_Kmat must hit the
// quadrature exactly once per grid regardless of cell count.
long quadrature_evaluations();
void reset_quadrature_evaluations();

} // namespace pdfem::elements
