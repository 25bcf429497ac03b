#include "pdfem/grid.hpp"

#include <algorithm>
#include <string>

namespace pdfem {

int element_node_count(ElementType t) {
    switch (t) {
        case ElementType::tri3: return 3;
        case ElementType::qua4: return 4;
        case ElementType::tet4: return 4;
        case ElementType::hex8: return 8;
    }
    return 0;
}

int element_dim(ElementType t) {
    return (t == ElementType::tri3 || t == ElementType::qua4) ? 2 : 3;
}

const char* element_name(ElementType t) {
    switch (t) {
        case ElementType::tri3: return "tri3";
        case ElementType::qua4: return "qua4";
        case ElementType::tet4: return "tet4";
        case ElementType::hex8: return "hex8";
    }
    return "?";
}

StructuredGrid StructuredGrid::make(int dim, std::array<int, 3> resolution, Vec3 origin,
                                    Vec3 side_lengths) {
    if (dim != 2 && dim != 3) throw ValidationError("grid: dim must be 2 or 3");
    StructuredGrid g;
    g.dim_ = dim;
    g.n_ = resolution;
    g.origin_ = origin;
    g.len_ = side_lengths;
    if (dim == 2) {
        g.n_[2] = 1;
        g.len_[2] = 0.0;
        g.origin_[2] = 0.0;
    }
    for (int a = 0; a < dim; ++a) {
        if (g.n_[a] < 1)
            throw ValidationError("grid: resolution must be >= 1 on axis " + std::to_string(a));
        if (!(g.len_[a] > 0.0))
            throw ValidationError("grid: side length must be > 0 on axis " + std::to_string(a));
        g.h_[a] = g.len_[a] / g.n_[a];
    }
    if (dim == 2) g.h_[2] = 0.0;
    return g;
}

StructuredGrid StructuredGrid::unit(int dim, int resolution) {
    return make(dim, {resolution, resolution, resolution}, {0, 0, 0}, {1, 1, 1});
}

double StructuredGrid::h_max() const {
    double m = h_[0];
    for (int a = 1; a < dim_; ++a) m = std::max(m, h_[a]);
    return m;
}

double StructuredGrid::volume() const {
    double v = 1.0;
    for (int a = 0; a < dim_; ++a) v *= len_[a];
    return v;
}

long StructuredGrid::node_count() const {
    long c = 1;
    for (int a = 0; a < dim_; ++a) c *= n_[a] + 1;
    return c;
}

long StructuredGrid::cell_count() const {
    long c = 1;
    for (int a = 0; a < dim_; ++a) c *= n_[a];
    return c;
}

long StructuredGrid::node_index(int i, int j, int k) const {
    return i + static_cast<long>(n_[0] + 1) * (j + static_cast<long>(n_[1] + 1) * k);
}

long StructuredGrid::cell_index(int i, int j, int k) const {
    return i + static_cast<long>(n_[0]) * (j + static_cast<long>(n_[1]) * k);
}

std::array<int, 3> StructuredGrid::node_coords(long index) const {
    const long sx = n_[0] + 1, sy = n_[1] + 1;
    return {static_cast<int>(index % sx), static_cast<int>((index / sx) % sy),
            static_cast<int>(index / (sx * sy))};
}

std::array<int, 3> StructuredGrid::cell_coords(long index) const {
    const long sx = n_[0], sy = n_[1];
    return {static_cast<int>(index % sx), static_cast<int>((index / sx) % sy),
            static_cast<int>(index / (sx * sy))};
}

Vec3 StructuredGrid::node_position(long index) const {
    const auto c = node_coords(index);
    Vec3 p{0, 0, 0};
    for (int a = 0; a < dim_; ++a) p[a] = origin_[a] + c[a] * h_[a];
    return p;
}

Vec3 StructuredGrid::cell_center(long index) const {
    const auto c = cell_coords(index);
    Vec3 p{0, 0, 0};
    for (int a = 0; a < dim_; ++a) p[a] = origin_[a] + (c[a] + 0.5) * h_[a];
    return p;
}

void StructuredGrid::cell_nodes(const std::array<int, 3>& cell, long* out) const {
    const int i = cell[0], j = cell[1], k = cell[2];
    out[0] = node_index(i, j, k);
    out[1] = node_index(i + 1, j, k);
    out[2] = node_index(i + 1, j + 1, k);
    out[3] = node_index(i, j + 1, k);
    if (dim_ == 3) {
        out[4] = node_index(i, j, k + 1);
        out[5] = node_index(i + 1, j, k + 1);
        out[6] = node_index(i + 1, j + 1, k + 1);
        out[7] = node_index(i, j + 1, k + 1);
    }
}

void StructuredGrid::cell_corner_positions(const std::array<int, 3>& cell, Vec3* out) const {
    long nodes[8];
    cell_nodes(cell, nodes);
    for (int a = 0; a < nodes_per_cell(); ++a) out[a] = node_position(nodes[a]);
}

bool StructuredGrid::on_boundary_node(long node) const {
    const auto c = node_coords(node);
    for (int a = 0; a < dim_; ++a)
        if (c[a] == 0 || c[a] == n_[a]) return true;
    return false;
}

} // namespace pdfem
