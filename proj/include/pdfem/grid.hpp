#pragma once

#include <array>

#include "pdfem/common.hpp"

namespace pdfem {

enum class ElementType { tri3, qua4, tet4, hex8 };

int element_node_count(ElementType t);
int element_dim(ElementType t);
const char* element_name(ElementType t);

/// Axis-aligned voxel grid hosting the whole domain.
///
/// Indexing is lexicographic with x fastest:
///   node  (i,j[,k]) -> i + (nx+1)*(j + (ny+1)*k)
///   cell  (i,j[,k]) -> i +  nx   *(j +  ny   *k)
/// Cell (i,j,k) spans [origin + i*h, origin + (i+1)*h] per axis; its corner
/// nodes in local order follow the qua4/hex8 reference numbering
/// (counterclockwise bottom face, then top face in 3D).
class StructuredGrid {
public:
    static StructuredGrid make(int dim, std::array<int, 3> resolution, Vec3 origin, Vec3 side_lengths);
    /// Uniform resolution on the unit cube/square at the origin.
    static StructuredGrid unit(int dim, int resolution);

    int dim() const { return dim_; }
    const std::array<int, 3>& resolution() const { return n_; }
    const Vec3& origin() const { return origin_; }
    const Vec3& side_lengths() const { return len_; }

    Vec3 h() const { return h_; }
    /// Characteristic length h_mat: the largest per-axis cell size.
    double h_max() const;
    double volume() const;

    long node_count() const;
    long cell_count() const;
    int nodes_per_cell() const { return dim_ == 2 ? 4 : 8; }
    ElementType cell_type() const { return dim_ == 2 ? ElementType::qua4 : ElementType::hex8; }

    long node_index(int i, int j, int k = 0) const;
    long cell_index(int i, int j, int k = 0) const;
    std::array<int, 3> node_coords(long index) const;
    std::array<int, 3> cell_coords(long index) const;

    Vec3 node_position(long index) const;
    Vec3 cell_center(long index) const;

    /// Corner node indices of a cell, local reference order. out must hold
    /// nodes_per_cell() entries.
    void cell_nodes(const std::array<int, 3>& cell, long* out) const;
    /// Corner positions in the same local order.
    void cell_corner_positions(const std::array<int, 3>& cell, Vec3* out) const;

    bool on_boundary_node(long node) const;

private:
    int dim_ = 2;
    std::array<int, 3> n_{1, 1, 1};
    Vec3 origin_{0, 0, 0};
    Vec3 len_{1, 1, 1};
    Vec3 h_{1, 1, 1};
};

} // namespace pdfem
