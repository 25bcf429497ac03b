#pragma once

#include <functional>
#include <map>

#include "pdfem/dofmap.hpp"
#include "pdfem/elements.hpp"
#include "pdfem/mesh.hpp"
#include "pdfem/sparse.hpp"
#include "pdfem/substitution.hpp"

namespace pdfem {

/// Constant flux / traction data on grid boundary faces. `value` holds one
/// entry (thermal, the prescribed q.n) or d entries (elastic traction).
struct NeumannSpec {
    struct SideLoad {
        int axis = 0;
        bool max_side = false;
        std::vector<double> value;
    };
    struct FacetLoad {
        long cell = 0;
        int face = 0; // 0:x_min 1:x_max 2:y_min 3:y_max 4:z_min 5:z_max
        std::vector<double> value;
    };
    std::vector<SideLoad> sides;
    std::vector<FacetLoad> facets;

    bool empty() const { return sides.empty() && facets.empty(); }
};

using BodySource = std::function<void(const Vec3&, std::span<double>)>;

/// Grid operator for a homogeneous coefficient. All cells are congruent, so
/// one local stiffness is integrated and scattered everywhere; the
/// instrumentation counter in pdfem::elements sees exactly one evaluation.
CsrMatrix assemble_Kmat(const StructuredGrid& grid, const DenseMatrix& coef, const DofMap& dofmap);

/// Inclusion operator on the inclusion mesh's own DOF space (p = nodes *
/// dofs_per_node), integrating the difference coefficient
/// (inc - mat). Indefinite results are expected when the contrast is < 1.
CsrMatrix assemble_Kinc(const UnstructuredMesh& mesh, const DenseMatrix& coef_inc,
                        const DenseMatrix& coef_mat, Physics physics);

/// K_mat + S^T K_inc S.
CsrMatrix combine(const CsrMatrix& k_mat, const SubstitutionMatrix& s, const CsrMatrix& k_inc);

CsrMatrix assemble_mass_grid(const StructuredGrid& grid, const DofMap& dofmap);
CsrMatrix assemble_mass_mesh(const UnstructuredMesh& mesh, int dofs_per_node);

std::vector<double> assemble_load(const StructuredGrid& grid, const BodySource& body,
                                  const NeumannSpec& neumann, const DofMap& dofmap);

/// Classical FEM operator over a tagged unstructured mesh (per-tag
/// constitutive matrices). Used for conformal reference solves.
CsrMatrix assemble_unstructured(const UnstructuredMesh& mesh,
                                const std::map<int, DenseMatrix>& coef_by_tag, Physics physics);

/// Boundary facets of an unstructured mesh: facets that occur in exactly one
/// element, with outward orientation inherited from that element.
struct BoundaryFacet {
    std::vector<int> nodes;
    Vec3 outward_normal;
    double measure;
};
std::vector<BoundaryFacet> boundary_facets(const UnstructuredMesh& mesh);

/// Uniform-flux (thermal, value = Q) or uniform-traction (elastic,
/// sigma_bar rows stacked) boundary load on an unstructured mesh:
/// L_i = integral of (Q . n) N_i or (Sigma n) . N_i over the boundary.
std::vector<double> assemble_boundary_load_unstructured(const UnstructuredMesh& mesh,
                                                        const DenseMatrix& macro, Physics physics);

} // namespace pdfem
