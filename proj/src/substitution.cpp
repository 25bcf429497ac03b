#include "pdfem/substitution.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "pdfem/elements.hpp"

namespace pdfem {

GridLocation locate(const StructuredGrid& grid, const Vec3& point, bool periodic) {
    GridLocation loc;
    const auto& o = grid.origin();
    const auto& len = grid.side_lengths();
    const auto& n = grid.resolution();
    const Vec3 h = grid.h();

    for (int a = 0; a < grid.dim(); ++a) {
        double x = point[a] - o[a];
        if (periodic) {
            x = std::fmod(x, len[a]);
            if (x < 0.0) x += len[a];
        } else {
            const double tol = 1e-9 * len[a];
            if (x < -tol || x > len[a] + tol) {
                std::ostringstream msg;
                msg << "locate: point (" << point[0] << ", " << point[1];
                if (grid.dim() == 3) msg << ", " << point[2];
                msg << ") outside grid on axis " << a;
                throw LocationError(msg.str());
            }
            x = std::clamp(x, 0.0, len[a]);
        }
        const int cell = std::min(static_cast<int>(std::floor(x / h[a])), n[a] - 1);
        loc.cell[a] = std::max(cell, 0);
        loc.ref[a] = 2.0 * (x / h[a] - loc.cell[a]) - 1.0;
    }
    return loc;
}

SubstitutionMatrix build_substitution(const StructuredGrid& grid, const UnstructuredMesh& mesh,
                                      const DofMap& dofmap, bool periodic) {
    const bool wrap = periodic || mesh.periodic_overflow;
    const int ncorner = grid.nodes_per_cell();
    const ElementType cell_type = grid.cell_type();
    const int p = mesh.node_count();

    std::vector<GridLocation> locs(p);
    for (int i = 0; i < p; ++i) {
        try {
            locs[i] = locate(grid, mesh.nodes[i], wrap);
        } catch (const LocationError& e) {
            throw LocationError("substitution: inclusion node " + std::to_string(i) + ": " +
                                e.what());
        }
    }

    PatternBuilder builder(p, static_cast<int>(dofmap.n_nodes_reduced));
    long corners[8];
    for (int i = 0; i < p; ++i) {
        grid.cell_nodes(locs[i].cell, corners);
        for (int a = 0; a < ncorner; ++a) builder.add(i, dofmap.node_reduced[corners[a]]);
    }

    SubstitutionMatrix s;
    s.scalar = builder.freeze();
    s.dofs_per_node = dofmap.dofs_per_node;

    double shape[8];
    for (int i = 0; i < p; ++i) {
        elements::shape_values(cell_type, locs[i].ref, shape);
        grid.cell_nodes(locs[i].cell, corners);
        for (int a = 0; a < ncorner; ++a)
            s.scalar.at(i, dofmap.node_reduced[corners[a]]) += shape[a];
    }
    return s;
}

CsrMatrix SubstitutionMatrix::expanded() const {
    if (dofs_per_node == 1) return scalar;
    CsrMatrix e;
    e.n_rows = scalar.n_rows * dofs_per_node;
    e.n_cols = scalar.n_cols * dofs_per_node;
    e.row_ptr.assign(e.n_rows + 1, 0);
    e.cols.reserve(scalar.cols.size() * dofs_per_node);
    e.vals.reserve(scalar.vals.size() * dofs_per_node);
    for (int r = 0; r < scalar.n_rows; ++r)
        for (int c = 0; c < dofs_per_node; ++c) {
            for (int k = scalar.row_ptr[r]; k < scalar.row_ptr[r + 1]; ++k) {
                e.cols.push_back(scalar.cols[k] * dofs_per_node + c);
                e.vals.push_back(scalar.vals[k]);
            }
            e.row_ptr[r * dofs_per_node + c + 1] = static_cast<int>(e.cols.size());
        }
    return e;
}

std::vector<double> SubstitutionMatrix::apply(std::span<const double> grid_values) const {
    const int d = dofs_per_node;
    std::vector<double> v(static_cast<size_t>(scalar.n_rows) * d, 0.0);
    for (int r = 0; r < scalar.n_rows; ++r)
        for (int k = scalar.row_ptr[r]; k < scalar.row_ptr[r + 1]; ++k) {
            const int node = scalar.cols[k];
            const double w = scalar.vals[k];
            for (int c = 0; c < d; ++c) v[r * d + c] += w * grid_values[node * d + c];
        }
    return v;
}

std::vector<long> pixelize(const StructuredGrid& grid, const UnstructuredMesh& mesh,
                           bool periodic) {
    const bool wrap = periodic || mesh.periodic_overflow;
    std::vector<long> cells;
    cells.reserve(mesh.nodes.size());
    for (const Vec3& p : mesh.nodes) {
        const GridLocation loc = locate(grid, p, wrap);
        cells.push_back(grid.cell_index(loc.cell[0], loc.cell[1], loc.cell[2]));
    }
    std::sort(cells.begin(), cells.end());
    cells.erase(std::unique(cells.begin(), cells.end()), cells.end());
    return cells;
}

namespace {

// deterministic interior sample points in the reference element
std::vector<Vec3> interior_samples(ElementType t, int count) {
    std::vector<Vec3> pts;
    const double pull = 1.0 - 1e-9;
    switch (t) {
        case ElementType::tri3: {
            int q = 1;
            while ((q + 1) * (q + 2) / 2 < count) ++q;
            for (int i = 0; i <= q; ++i)
                for (int j = 0; i + j <= q; ++j) {
                    const double r = static_cast<double>(i) / q, s = static_cast<double>(j) / q;
                    pts.push_back({1.0 / 3 + pull * (r - 1.0 / 3), 1.0 / 3 + pull * (s - 1.0 / 3), 0});
                }
            break;
        }
        case ElementType::tet4: {
            int q = 1;
            while ((q + 1) * (q + 2) * (q + 3) / 6 < count) ++q;
            for (int i = 0; i <= q; ++i)
                for (int j = 0; i + j <= q; ++j)
                    for (int k = 0; i + j + k <= q; ++k)
                        pts.push_back({0.25 + pull * (static_cast<double>(i) / q - 0.25),
                                       0.25 + pull * (static_cast<double>(j) / q - 0.25),
                                       0.25 + pull * (static_cast<double>(k) / q - 0.25)});
            break;
        }
        case ElementType::qua4: {
            int m = 1;
            while (m * m < count) ++m;
            for (int i = 0; i < m; ++i)
                for (int j = 0; j < m; ++j)
                    pts.push_back({-1.0 + 2.0 * (i + 0.5) / m, -1.0 + 2.0 * (j + 0.5) / m, 0});
            break;
        }
        case ElementType::hex8: {
            int m = 1;
            while (m * m * m < count) ++m;
            for (int i = 0; i < m; ++i)
                for (int j = 0; j < m; ++j)
                    for (int k = 0; k < m; ++k)
                        pts.push_back({-1.0 + 2.0 * (i + 0.5) / m, -1.0 + 2.0 * (j + 0.5) / m,
                                       -1.0 + 2.0 * (k + 0.5) / m});
            break;
        }
    }
    return pts;
}

} // namespace

PixelizationReport check_enveloping(const StructuredGrid& grid, const UnstructuredMesh& mesh,
                                    int samples_per_element, bool periodic) {
    if (samples_per_element < 1)
        throw ValidationError("check_enveloping: samples_per_element must be >= 1");
    const bool wrap = periodic || mesh.periodic_overflow;

    PixelizationReport rep;
    rep.covered_cells = pixelize(grid, mesh, periodic);
    rep.h_mat = grid.h_max();
    rep.h_inc = mesh.characteristic_length();
    rep.eta = rep.h_inc > 0.0 ? rep.h_mat / rep.h_inc : 0.0;

    std::set<long> covered(rep.covered_cells.begin(), rep.covered_cells.end());
    std::set<long> gaps;
    Vec3 coords[8];
    double shape[8];
    for (int e = 0; e < mesh.element_count(); ++e) {
        const ElementType t = mesh.elements[e].type;
        const int nn = element_node_count(t);
        mesh.element_coords(e, coords);
        for (const Vec3& ref : interior_samples(t, samples_per_element)) {
            elements::shape_values(t, ref, shape);
            Vec3 x{0, 0, 0};
            for (int a = 0; a < nn; ++a)
                for (int c = 0; c < 3; ++c) x[c] += shape[a] * coords[a][c];
            const GridLocation loc = locate(grid, x, wrap);
            const long cell = grid.cell_index(loc.cell[0], loc.cell[1], loc.cell[2]);
            if (!covered.count(cell)) gaps.insert(cell);
        }
    }
    rep.gap_cells.assign(gaps.begin(), gaps.end());
    rep.enveloping = rep.gap_cells.empty();
    return rep;
}

std::string PixelizationReport::to_json() const {
    std::ostringstream os;
    os.precision(17);
    os << "{\n";
    os << "  \"eta\": " << eta << ",\n";
    os << "  \"h_mat\": " << h_mat << ",\n";
    os << "  \"h_inc\": " << h_inc << ",\n";
    os << "  \"enveloping\": " << (enveloping ? "true" : "false") << ",\n";
    os << "  \"covered_cell_count\": " << covered_cells.size() << ",\n";
    os << "  \"gap_cells\": [";
    for (size_t i = 0; i < gap_cells.size(); ++i) os << (i ? ", " : "") << gap_cells[i];
    os << "],\n  \"covered_cells\": [";
    for (size_t i = 0; i < covered_cells.size(); ++i) os << (i ? ", " : "") << covered_cells[i];
    os << "]\n}\n";
    return os.str();
}

} // namespace pdfem
