#include "pdfem/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

namespace pdfem {

namespace {

// node-adjacency pattern expanded to dofs_per_node components
CsrMatrix expand_node_pattern(const std::vector<std::vector<int>>& node_cols, int n_col_nodes,
                              int d) {
    CsrMatrix m;
    const long n_rows = static_cast<long>(node_cols.size()) * d;
    m.n_rows = static_cast<int>(n_rows);
    m.n_cols = n_col_nodes * d;
    m.row_ptr.assign(n_rows + 1, 0);
    long nnz = 0;
    for (size_t i = 0; i < node_cols.size(); ++i)
        for (int c = 0; c < d; ++c) {
            nnz += static_cast<long>(node_cols[i].size()) * d;
            m.row_ptr[i * d + c + 1] = static_cast<int>(nnz);
        }
    m.cols.reserve(nnz);
    for (size_t i = 0; i < node_cols.size(); ++i)
        for (int c = 0; c < d; ++c)
            for (int nb : node_cols[i])
                for (int cc = 0; cc < d; ++cc) m.cols.push_back(nb * d + cc);
    m.vals.assign(m.cols.size(), 0.0);
    return m;
}

std::vector<std::vector<int>> grid_node_adjacency(const StructuredGrid& grid, const DofMap& dofmap) {
    std::vector<std::vector<int>> adj(dofmap.n_nodes_reduced);
    const int ncorner = grid.nodes_per_cell();
    long corners[8];
    int reduced[8];
    const auto& n = grid.resolution();
    std::array<int, 3> cell{0, 0, 0};
    for (int k = 0; k < (grid.dim() == 3 ? n[2] : 1); ++k)
        for (int j = 0; j < n[1]; ++j)
            for (int i = 0; i < n[0]; ++i) {
                cell = {i, j, k};
                grid.cell_nodes(cell, corners);
                for (int a = 0; a < ncorner; ++a) reduced[a] = dofmap.node_reduced[corners[a]];
                for (int a = 0; a < ncorner; ++a)
                    for (int b = 0; b < ncorner; ++b) adj[reduced[a]].push_back(reduced[b]);
            }
    for (auto& row : adj) {
        std::sort(row.begin(), row.end());
        row.erase(std::unique(row.begin(), row.end()), row.end());
    }
    return adj;
}

std::vector<std::vector<int>> mesh_node_adjacency(const UnstructuredMesh& mesh) {
    std::vector<std::vector<int>> adj(mesh.node_count());
    for (const auto& el : mesh.elements) {
        const int nn = element_node_count(el.type);
        for (int a = 0; a < nn; ++a)
            for (int b = 0; b < nn; ++b) adj[el.conn[a]].push_back(el.conn[b]);
    }
    for (auto& row : adj) {
        std::sort(row.begin(), row.end());
        row.erase(std::unique(row.begin(), row.end()), row.end());
    }
    return adj;
}

void scatter_local(CsrMatrix& k, const DenseMatrix& local, std::span<const int> nodes, int d) {
    const int nn = static_cast<int>(nodes.size());
    for (int a = 0; a < nn; ++a)
        for (int ca = 0; ca < d; ++ca) {
            const int r = nodes[a] * d + ca;
            const int la = a * d + ca;
            const int* cbegin = k.cols.data() + k.row_ptr[r];
            const int* cend = k.cols.data() + k.row_ptr[r + 1];
            for (int b = 0; b < nn; ++b)
                for (int cb = 0; cb < d; ++cb) {
                    const int c = nodes[b] * d + cb;
                    const int* it = std::lower_bound(cbegin, cend, c);
                    k.vals[it - k.cols.data()] += local(la, b * d + cb);
                }
        }
}

// scalar local matrix scattered identically per component (mass)
void scatter_local_scalar(CsrMatrix& k, const DenseMatrix& local, std::span<const int> nodes,
                          int d) {
    const int nn = static_cast<int>(nodes.size());
    for (int a = 0; a < nn; ++a)
        for (int c = 0; c < d; ++c) {
            const int r = nodes[a] * d + c;
            const int* cbegin = k.cols.data() + k.row_ptr[r];
            const int* cend = k.cols.data() + k.row_ptr[r + 1];
            for (int b = 0; b < nn; ++b) {
                const int cc = nodes[b] * d + c;
                const int* it = std::lower_bound(cbegin, cend, cc);
                k.vals[it - k.cols.data()] += local(a, b);
            }
        }
}

DenseMatrix local_stiffness(Physics physics, ElementType t, std::span<const Vec3> coords,
                            const DenseMatrix& coef) {
    return physics == Physics::thermal ? elements::local_stiffness_thermal(t, coords, coef)
                                       : elements::local_stiffness_elastic(t, coords, coef);
}

void check_coef_dims(Physics physics, int dim, const DenseMatrix& coef, const char* what) {
    const int want = physics == Physics::thermal ? dim : (dim == 2 ? 3 : 6);
    if (coef.rows() != want || coef.cols() != want)
        throw ValidationError(std::string(what) + ": coefficient matrix must be " +
                              std::to_string(want) + "x" + std::to_string(want) + " for " +
                              physics_name(physics) + " in " + std::to_string(dim) + "D");
}

} // namespace

CsrMatrix assemble_Kmat(const StructuredGrid& grid, const DenseMatrix& coef, const DofMap& dofmap) {
    check_coef_dims(dofmap.physics, grid.dim(), coef, "assemble_Kmat");
    const int d = dofmap.dofs_per_node;
    const int ncorner = grid.nodes_per_cell();

    // all cells congruent: integrate one local stiffness, scatter everywhere
    Vec3 corner_pos[8];
    grid.cell_corner_positions({0, 0, 0}, corner_pos);
    const DenseMatrix local = local_stiffness(dofmap.physics, grid.cell_type(),
                                              std::span<const Vec3>(corner_pos, ncorner), coef);

    CsrMatrix k = expand_node_pattern(grid_node_adjacency(grid, dofmap),
                                      static_cast<int>(dofmap.n_nodes_reduced), d);
    const auto& n = grid.resolution();
    long corners[8];
    int reduced[8];
    for (int kk = 0; kk < (grid.dim() == 3 ? n[2] : 1); ++kk)
        for (int j = 0; j < n[1]; ++j)
            for (int i = 0; i < n[0]; ++i) {
                grid.cell_nodes({i, j, kk}, corners);
                for (int a = 0; a < ncorner; ++a) reduced[a] = dofmap.node_reduced[corners[a]];
                scatter_local(k, local, std::span<const int>(reduced, ncorner), d);
            }
    return k;
}

CsrMatrix assemble_Kinc(const UnstructuredMesh& mesh, const DenseMatrix& coef_inc,
                        const DenseMatrix& coef_mat, Physics physics) {
    check_coef_dims(physics, mesh.dim, coef_inc, "assemble_Kinc(inclusion)");
    check_coef_dims(physics, mesh.dim, coef_mat, "assemble_Kinc(matrix)");
    const DenseMatrix diff = coef_inc - coef_mat;
    const int d = dofs_per_node(physics, mesh.dim);

    CsrMatrix k = expand_node_pattern(mesh_node_adjacency(mesh), mesh.node_count(), d);
    Vec3 coords[8];
    for (int e = 0; e < mesh.element_count(); ++e) {
        const auto& el = mesh.elements[e];
        const int nn = element_node_count(el.type);
        mesh.element_coords(e, coords);
        const DenseMatrix local =
            local_stiffness(physics, el.type, std::span<const Vec3>(coords, nn), diff);
        int nodes[8];
        for (int a = 0; a < nn; ++a) nodes[a] = el.conn[a];
        scatter_local(k, local, std::span<const int>(nodes, nn), d);
    }
    return k;
}

CsrMatrix combine(const CsrMatrix& k_mat, const SubstitutionMatrix& s, const CsrMatrix& k_inc) {
    const CsrMatrix se = s.expanded();
    if (se.n_rows != k_inc.n_rows || k_inc.n_rows != k_inc.n_cols)
        throw ValidationError("combine: K_inc dimension does not match substitution rows");
    if (se.n_cols != k_mat.n_rows || k_mat.n_rows != k_mat.n_cols)
        throw ValidationError("combine: K_mat dimension does not match substitution columns");
    return csr_add(k_mat, galerkin_triple_product(se, k_inc));
}

CsrMatrix assemble_mass_grid(const StructuredGrid& grid, const DofMap& dofmap) {
    const int d = dofmap.dofs_per_node;
    const int ncorner = grid.nodes_per_cell();
    Vec3 corner_pos[8];
    grid.cell_corner_positions({0, 0, 0}, corner_pos);
    const DenseMatrix local =
        elements::local_mass(grid.cell_type(), std::span<const Vec3>(corner_pos, ncorner));

    CsrMatrix m = expand_node_pattern(grid_node_adjacency(grid, dofmap),
                                      static_cast<int>(dofmap.n_nodes_reduced), d);
    const auto& n = grid.resolution();
    long corners[8];
    int reduced[8];
    for (int kk = 0; kk < (grid.dim() == 3 ? n[2] : 1); ++kk)
        for (int j = 0; j < n[1]; ++j)
            for (int i = 0; i < n[0]; ++i) {
                grid.cell_nodes({i, j, kk}, corners);
                for (int a = 0; a < ncorner; ++a) reduced[a] = dofmap.node_reduced[corners[a]];
                scatter_local_scalar(m, local, std::span<const int>(reduced, ncorner), d);
            }
    return m;
}

CsrMatrix assemble_mass_mesh(const UnstructuredMesh& mesh, int d) {
    CsrMatrix m = expand_node_pattern(mesh_node_adjacency(mesh), mesh.node_count(), d);
    Vec3 coords[8];
    for (int e = 0; e < mesh.element_count(); ++e) {
        const auto& el = mesh.elements[e];
        const int nn = element_node_count(el.type);
        mesh.element_coords(e, coords);
        const DenseMatrix local = elements::local_mass(el.type, std::span<const Vec3>(coords, nn));
        int nodes[8];
        for (int a = 0; a < nn; ++a) nodes[a] = el.conn[a];
        scatter_local_scalar(m, local, std::span<const int>(nodes, nn), d);
    }
    return m;
}

namespace {

// nodes of a grid cell face; face = axis*2 + (max ? 1 : 0) reordered as
// 0:x_min 1:x_max 2:y_min 3:y_max 4:z_min 5:z_max
void grid_face_nodes(const StructuredGrid& grid, const std::array<int, 3>& cell, int face,
                     long* out, int& count) {
    const int axis = face / 2;
    const bool max_side = face % 2 == 1;
    const int i = cell[0], j = cell[1], k = cell[2];
    if (grid.dim() == 2) {
        count = 2;
        if (axis == 0) {
            const int x = max_side ? i + 1 : i;
            out[0] = grid.node_index(x, j);
            out[1] = grid.node_index(x, j + 1);
        } else {
            const int y = max_side ? j + 1 : j;
            out[0] = grid.node_index(i, y);
            out[1] = grid.node_index(i + 1, y);
        }
        return;
    }
    count = 4;
    if (axis == 0) {
        const int x = max_side ? i + 1 : i;
        out[0] = grid.node_index(x, j, k);
        out[1] = grid.node_index(x, j + 1, k);
        out[2] = grid.node_index(x, j, k + 1);
        out[3] = grid.node_index(x, j + 1, k + 1);
    } else if (axis == 1) {
        const int y = max_side ? j + 1 : j;
        out[0] = grid.node_index(i, y, k);
        out[1] = grid.node_index(i + 1, y, k);
        out[2] = grid.node_index(i, y, k + 1);
        out[3] = grid.node_index(i + 1, y, k + 1);
    } else {
        const int z = max_side ? k + 1 : k;
        out[0] = grid.node_index(i, j, z);
        out[1] = grid.node_index(i + 1, j, z);
        out[2] = grid.node_index(i, j + 1, z);
        out[3] = grid.node_index(i + 1, j + 1, z);
    }
}

double grid_face_measure(const StructuredGrid& grid, int axis) {
    const Vec3 h = grid.h();
    if (grid.dim() == 2) return h[axis == 0 ? 1 : 0];
    double m = 1.0;
    for (int a = 0; a < 3; ++a)
        if (a != axis) m *= h[a];
    return m;
}

void add_face_load(std::vector<double>& load, const StructuredGrid& grid, const DofMap& dofmap,
                   const std::array<int, 3>& cell, int face, std::span<const double> value) {
    long nodes[4];
    int count = 0;
    grid_face_nodes(grid, cell, face, nodes, count);
    const double w = grid_face_measure(grid, face / 2) / count;
    for (int a = 0; a < count; ++a)
        for (int c = 0; c < dofmap.dofs_per_node; ++c)
            load[dofmap.reduced_dof(nodes[a], c)] += w * value[c];
}

} // namespace

std::vector<double> assemble_load(const StructuredGrid& grid, const BodySource& body,
                                  const NeumannSpec& neumann, const DofMap& dofmap) {
    const int d = dofmap.dofs_per_node;
    std::vector<double> load(dofmap.dof_count(), 0.0);
    const auto& n = grid.resolution();

    if (body) {
        const ElementType ct = grid.cell_type();
        const int ncorner = grid.nodes_per_cell();
        const auto& rule = elements::mass_rule(ct);
        const Vec3 h = grid.h();
        double det = 1.0;
        for (int a = 0; a < grid.dim(); ++a) det *= h[a] * 0.5;

        std::vector<std::array<double, 8>> shapes(rule.size());
        for (int q = 0; q < rule.size(); ++q)
            elements::shape_values(ct, rule.points[q], shapes[q].data());

        Vec3 corner_pos[8];
        long corners[8];
        std::vector<double> f(d);
        for (int kk = 0; kk < (grid.dim() == 3 ? n[2] : 1); ++kk)
            for (int j = 0; j < n[1]; ++j)
                for (int i = 0; i < n[0]; ++i) {
                    const std::array<int, 3> cell{i, j, kk};
                    grid.cell_nodes(cell, corners);
                    grid.cell_corner_positions(cell, corner_pos);
                    for (int q = 0; q < rule.size(); ++q) {
                        Vec3 x{0, 0, 0};
                        for (int a = 0; a < ncorner; ++a)
                            for (int c = 0; c < 3; ++c) x[c] += shapes[q][a] * corner_pos[a][c];
                        std::fill(f.begin(), f.end(), 0.0);
                        body(x, f);
                        const double w = rule.weights[q] * det;
                        for (int a = 0; a < ncorner; ++a)
                            for (int c = 0; c < d; ++c)
                                load[dofmap.reduced_dof(corners[a], c)] += w * shapes[q][a] * f[c];
                    }
                }
    }

    for (const auto& side : neumann.sides) {
        if (side.axis < 0 || side.axis >= grid.dim())
            throw ValidationError("neumann: invalid axis");
        if (static_cast<int>(side.value.size()) != d)
            throw ValidationError("neumann: value must have one entry per dof");
        const int face = side.axis * 2 + (side.max_side ? 1 : 0);
        // iterate boundary cells of that side
        const int fixed = side.max_side ? n[side.axis] - 1 : 0;
        std::array<int, 3> cell{0, 0, 0};
        const int a1 = side.axis == 0 ? 1 : 0;
        const int a2 = side.axis == 2 ? 1 : 2;
        const int n1 = n[a1];
        const int n2 = grid.dim() == 3 ? n[a2] : 1;
        for (int u = 0; u < n1; ++u)
            for (int v = 0; v < n2; ++v) {
                cell[side.axis] = fixed;
                cell[a1] = u;
                if (grid.dim() == 3) cell[a2] = v;
                add_face_load(load, grid, dofmap, cell, face, side.value);
            }
    }

    for (const auto& fl : neumann.facets) {
        if (fl.face < 0 || fl.face >= 2 * grid.dim())
            throw ValidationError("neumann: invalid face id");
        if (static_cast<int>(fl.value.size()) != d)
            throw ValidationError("neumann: value must have one entry per dof");
        const auto cell = grid.cell_coords(fl.cell);
        const int axis = fl.face / 2;
        const bool max_side = fl.face % 2 == 1;
        if (cell[axis] != (max_side ? n[axis] - 1 : 0))
            throw ValidationError("neumann: facet (cell " + std::to_string(fl.cell) + ", face " +
                                  std::to_string(fl.face) + ") is not on the domain boundary");
        add_face_load(load, grid, dofmap, cell, fl.face, fl.value);
    }

    return load;
}

CsrMatrix assemble_unstructured(const UnstructuredMesh& mesh,
                                const std::map<int, DenseMatrix>& coef_by_tag, Physics physics) {
    const int d = dofs_per_node(physics, mesh.dim);
    CsrMatrix k = expand_node_pattern(mesh_node_adjacency(mesh), mesh.node_count(), d);
    Vec3 coords[8];
    for (int e = 0; e < mesh.element_count(); ++e) {
        const auto& el = mesh.elements[e];
        const auto it = coef_by_tag.find(el.tag);
        if (it == coef_by_tag.end())
            throw ValidationError("assemble_unstructured: element " + std::to_string(e) +
                                  " has unmapped tag " + std::to_string(el.tag));
        const int nn = element_node_count(el.type);
        mesh.element_coords(e, coords);
        const DenseMatrix local =
            local_stiffness(physics, el.type, std::span<const Vec3>(coords, nn), it->second);
        int nodes[8];
        for (int a = 0; a < nn; ++a) nodes[a] = el.conn[a];
        scatter_local(k, local, std::span<const int>(nodes, nn), d);
    }
    return k;
}

namespace {

constexpr int kTriEdges[3][2] = {{0, 1}, {1, 2}, {2, 0}};
constexpr int kQuadEdges[4][2] = {{0, 1}, {1, 2}, {2, 3}, {3, 0}};
constexpr int kTetFaces[4][3] = {{0, 2, 1}, {0, 1, 3}, {1, 2, 3}, {0, 3, 2}};
constexpr int kHexFaces[6][4] = {{0, 3, 2, 1}, {4, 5, 6, 7}, {0, 1, 5, 4},
                                 {1, 2, 6, 5},  {2, 3, 7, 6}, {3, 0, 4, 7}};

Vec3 vsub(const Vec3& a, const Vec3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
Vec3 vcross(const Vec3& a, const Vec3& b) {
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}
double vnorm(const Vec3& a) { return std::sqrt(a[0] * a[0] + a[1] * a[1] + a[2] * a[2]); }

} // namespace

std::vector<BoundaryFacet> boundary_facets(const UnstructuredMesh& mesh) {
    struct Inst {
        std::vector<int> oriented;
        int count = 0;
    };
    std::map<std::vector<int>, Inst> facets;

    const auto visit = [&facets](std::vector<int> oriented) {
        std::vector<int> key = oriented;
        std::sort(key.begin(), key.end());
        auto& inst = facets[key];
        if (inst.count == 0) inst.oriented = std::move(oriented);
        ++inst.count;
    };

    for (const auto& el : mesh.elements) {
        switch (el.type) {
            case ElementType::tri3:
                for (const auto& e : kTriEdges) visit({el.conn[e[0]], el.conn[e[1]]});
                break;
            case ElementType::qua4:
                for (const auto& e : kQuadEdges) visit({el.conn[e[0]], el.conn[e[1]]});
                break;
            case ElementType::tet4:
                for (const auto& f : kTetFaces)
                    visit({el.conn[f[0]], el.conn[f[1]], el.conn[f[2]]});
                break;
            case ElementType::hex8:
                for (const auto& f : kHexFaces)
                    visit({el.conn[f[0]], el.conn[f[1]], el.conn[f[2]], el.conn[f[3]]});
                break;
        }
    }

    std::vector<BoundaryFacet> result;
    for (auto& [key, inst] : facets) {
        if (inst.count != 1) continue;
        BoundaryFacet bf;
        bf.nodes = inst.oriented;
        const auto& nd = mesh.nodes;
        if (bf.nodes.size() == 2) {
            const Vec3 t = vsub(nd[bf.nodes[1]], nd[bf.nodes[0]]);
            bf.measure = vnorm(t);
            bf.outward_normal = {t[1] / bf.measure, -t[0] / bf.measure, 0.0};
        } else if (bf.nodes.size() == 3) {
            const Vec3 c = vcross(vsub(nd[bf.nodes[1]], nd[bf.nodes[0]]),
                                  vsub(nd[bf.nodes[2]], nd[bf.nodes[0]]));
            const double n2 = vnorm(c);
            bf.measure = 0.5 * n2;
            bf.outward_normal = {c[0] / n2, c[1] / n2, c[2] / n2};
        } else {
            const Vec3 c = vcross(vsub(nd[bf.nodes[2]], nd[bf.nodes[0]]),
                                  vsub(nd[bf.nodes[3]], nd[bf.nodes[1]]));
            const double n2 = vnorm(c);
            bf.measure = 0.5 * n2;
            bf.outward_normal = {c[0] / n2, c[1] / n2, c[2] / n2};
        }
        result.push_back(std::move(bf));
    }
    return result;
}

std::vector<double> assemble_boundary_load_unstructured(const UnstructuredMesh& mesh,
                                                        const DenseMatrix& macro, Physics physics) {
    const int d = dofs_per_node(physics, mesh.dim);
    std::vector<double> load(static_cast<size_t>(mesh.node_count()) * d, 0.0);
    for (const BoundaryFacet& f : boundary_facets(mesh)) {
        const Vec3& nrm = f.outward_normal;
        double t[3] = {0, 0, 0};
        if (physics == Physics::thermal) {
            for (int a = 0; a < mesh.dim; ++a) t[0] += macro(a, 0) * nrm[a]; // Q . n
        } else {
            for (int i = 0; i < mesh.dim; ++i)
                for (int j = 0; j < mesh.dim; ++j) t[i] += macro(i, j) * nrm[j]; // Sigma n
        }
        const double w = f.measure / f.nodes.size();
        for (int node : f.nodes)
            for (int c = 0; c < d; ++c) load[static_cast<size_t>(node) * d + c] += w * t[c];
    }
    return load;
}

} // namespace pdfem
