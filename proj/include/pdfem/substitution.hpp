#pragma once

#include <vector>

#include "pdfem/dofmap.hpp"
#include "pdfem/mesh.hpp"
#include "pdfem/sparse.hpp"

namespace pdfem {

struct GridLocation {
    std::array<int, 3> cell{0, 0, 0};
    Vec3 ref{0, 0, 0}; // reference coordinates in [-1, 1]^d
};

/// Find the grid cell containing a point and the reference coordinates of
/// the point inside it (closed-form affine inverse; axis-aligned cells).
/// Points on interior cell faces go to the higher cell (floor rule); the
/// upper domain boundary clamps to the last cell. With periodic = true the
/// point is first wrapped modulo the side lengths.
GridLocation locate(const StructuredGrid& grid, const Vec3& point, bool periodic = false);

/// Sparse map from grid nodal values to inclusion-mesh nodal values:
/// row i holds the shape values of the cell containing inclusion node i.
/// Columns live in the (possibly periodic-reduced) node space of `dofmap`.
struct SubstitutionMatrix {
    CsrMatrix scalar; // p x n_nodes_reduced, one row per inclusion node
    int dofs_per_node = 1;

    /// Block expansion for vector problems: the scalar map applied
    /// identically per displacement component.
    CsrMatrix expanded() const;

    /// v = S u for a scalar- or vector-valued reduced grid vector.
    std::vector<double> apply(std::span<const double> grid_values) const;
};

SubstitutionMatrix build_substitution(const StructuredGrid& grid, const UnstructuredMesh& mesh,
                                      const DofMap& dofmap, bool periodic = false);

/// Grid cells containing at least one inclusion-mesh node (sorted linear
/// cell indices).
std::vector<long> pixelize(const StructuredGrid& grid, const UnstructuredMesh& mesh,
                           bool periodic = false);

struct PixelizationReport {
    std::vector<long> covered_cells;
    double eta = 0.0; // h_mat / h_inc
    bool enveloping = true;
    std::vector<long> gap_cells; // intersected by sampled inclusion points but not covered
    double h_mat = 0.0, h_inc = 0.0;

    std::string to_json() const;
};

/// Samples each inclusion element at `samples_per_element` deterministic
/// interior points and flags sampled cells missing from the pixelization.
/// eta < 1 is reported, not an error.
PixelizationReport check_enveloping(const StructuredGrid& grid, const UnstructuredMesh& mesh,
                                    int samples_per_element = 10, bool periodic = false);

} // namespace pdfem
