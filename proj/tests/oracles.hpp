// Test-only oracles, independent of the library's integration path:
// literal shape-function formulas with dense high-order quadrature, Eigen
// eigen/dense solvers, and a per-cell-material structured assembly used by
// the matching-mesh checks.

#pragma once

#include <Eigen/Dense>
#include <random>

#include "pdfem/assembly.hpp"
#include "pdfem/homogenize.hpp"

namespace oracle {

using pdfem::DenseMatrix;
using pdfem::Vec3;

inline Eigen::MatrixXd to_eigen(const pdfem::CsrMatrix& a) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(a.n_rows, a.n_cols);
    for (int r = 0; r < a.n_rows; ++r)
        for (int k = a.row_ptr[r]; k < a.row_ptr[r + 1]; ++k) m(r, a.cols[k]) += a.vals[k];
    return m;
}

inline Eigen::MatrixXd to_eigen(const DenseMatrix& a) {
    Eigen::MatrixXd m(a.rows(), a.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) m(i, j) = a(i, j);
    return m;
}

inline double min_eigenvalue(const pdfem::CsrMatrix& a) {
    const Eigen::MatrixXd m = to_eigen(a);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (m + m.transpose()));
    return es.eigenvalues().minCoeff();
}

inline double max_eigenvalue(const pdfem::CsrMatrix& a) {
    const Eigen::MatrixXd m = to_eigen(a);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (m + m.transpose()));
    return es.eigenvalues().maxCoeff();
}

// --- independent shape functions (literal formulas, no library calls) ------

inline void shape_and_grad(pdfem::ElementType t, double r, double s, double u, double* N,
                           double dN[][8]) {
    using pdfem::ElementType;
    switch (t) {
        case ElementType::tri3:
            N[0] = 1 - r - s; N[1] = r; N[2] = s;
            dN[0][0] = -1; dN[0][1] = 1; dN[0][2] = 0;
            dN[1][0] = -1; dN[1][1] = 0; dN[1][2] = 1;
            break;
        case ElementType::tet4:
            N[0] = 1 - r - s - u; N[1] = r; N[2] = s; N[3] = u;
            dN[0][0] = -1; dN[0][1] = 1; dN[0][2] = 0; dN[0][3] = 0;
            dN[1][0] = -1; dN[1][1] = 0; dN[1][2] = 1; dN[1][3] = 0;
            dN[2][0] = -1; dN[2][1] = 0; dN[2][2] = 0; dN[2][3] = 1;
            break;
        case ElementType::qua4: {
            const double rs[4][2] = {{-1, -1}, {1, -1}, {1, 1}, {-1, 1}};
            for (int a = 0; a < 4; ++a) {
                N[a] = 0.25 * (1 + rs[a][0] * r) * (1 + rs[a][1] * s);
                dN[0][a] = 0.25 * rs[a][0] * (1 + rs[a][1] * s);
                dN[1][a] = 0.25 * rs[a][1] * (1 + rs[a][0] * r);
            }
            break;
        }
        case ElementType::hex8: {
            const double rs[8][3] = {{-1, -1, -1}, {1, -1, -1}, {1, 1, -1}, {-1, 1, -1},
                                     {-1, -1, 1},  {1, -1, 1},  {1, 1, 1},  {-1, 1, 1}};
            for (int a = 0; a < 8; ++a) {
                N[a] = 0.125 * (1 + rs[a][0] * r) * (1 + rs[a][1] * s) * (1 + rs[a][2] * u);
                dN[0][a] = 0.125 * rs[a][0] * (1 + rs[a][1] * s) * (1 + rs[a][2] * u);
                dN[1][a] = 0.125 * rs[a][1] * (1 + rs[a][0] * r) * (1 + rs[a][2] * u);
                dN[2][a] = 0.125 * rs[a][2] * (1 + rs[a][0] * r) * (1 + rs[a][1] * s);
            }
            break;
        }
    }
}

// Dense-quadrature local stiffness through Eigen; `points` Gauss points per
// axis for tensor elements, degree-exact simplex rules otherwise.
inline Eigen::MatrixXd dense_local_stiffness(pdfem::ElementType t, const std::vector<Vec3>& coords,
                                             const Eigen::MatrixXd& coef, bool elastic,
                                             int points = 4) {
    using pdfem::ElementType;
    const int dim = (t == ElementType::tri3 || t == ElementType::qua4) ? 2 : 3;
    const int nn = static_cast<int>(coords.size());

    std::vector<std::array<double, 4>> qpts; // r, s, t, w
    if (t == ElementType::tri3) {
        qpts = {{1. / 6, 1. / 6, 0, 1. / 6}, {2. / 3, 1. / 6, 0, 1. / 6}, {1. / 6, 2. / 3, 0, 1. / 6}};
    } else if (t == ElementType::tet4) {
        const double a = (5.0 - std::sqrt(5.0)) / 20.0, b = (5.0 + 3.0 * std::sqrt(5.0)) / 20.0;
        qpts = {{a, a, a, 1. / 24}, {b, a, a, 1. / 24}, {a, b, a, 1. / 24}, {a, a, b, 1. / 24}};
    } else {
        std::vector<double> x, w;
        switch (points) {
            case 2: x = {-0.5773502691896257, 0.5773502691896257}; w = {1, 1}; break;
            case 3:
                x = {-0.7745966692414834, 0, 0.7745966692414834};
                w = {5. / 9, 8. / 9, 5. / 9};
                break;
            default:
                x = {-0.8611363115940526, -0.3399810435848563, 0.3399810435848563,
                     0.8611363115940526};
                w = {0.3478548451374538, 0.6521451548625461, 0.6521451548625461,
                     0.3478548451374538};
        }
        if (dim == 2) {
            for (size_t i = 0; i < x.size(); ++i)
                for (size_t j = 0; j < x.size(); ++j) qpts.push_back({x[i], x[j], 0, w[i] * w[j]});
        } else {
            for (size_t i = 0; i < x.size(); ++i)
                for (size_t j = 0; j < x.size(); ++j)
                    for (size_t k = 0; k < x.size(); ++k)
                        qpts.push_back({x[i], x[j], x[k], w[i] * w[j] * w[k]});
        }
    }

    const int ndof = elastic ? dim * nn : nn;
    Eigen::MatrixXd K = Eigen::MatrixXd::Zero(ndof, ndof);
    for (const auto& q : qpts) {
        double N[8];
        double dN[3][8];
        shape_and_grad(t, q[0], q[1], q[2], N, dN);
        Eigen::MatrixXd J = Eigen::MatrixXd::Zero(dim, dim);
        for (int i = 0; i < dim; ++i)
            for (int jj = 0; jj < dim; ++jj)
                for (int a = 0; a < nn; ++a) J(i, jj) += dN[i][a] * coords[a][jj];
        const double det = J.determinant();
        const Eigen::MatrixXd Jinv = J.inverse();
        Eigen::MatrixXd G(dim, nn); // physical gradients
        for (int a = 0; a < nn; ++a) {
            Eigen::VectorXd gr(dim);
            for (int i = 0; i < dim; ++i) gr(i) = dN[i][a];
            G.col(a) = Jinv * gr;
        }
        if (!elastic) {
            K += q[3] * det * (G.transpose() * coef * G);
        } else {
            const int m = dim == 2 ? 3 : 6;
            Eigen::MatrixXd B = Eigen::MatrixXd::Zero(m, ndof);
            for (int a = 0; a < nn; ++a) {
                if (dim == 2) {
                    B(0, 2 * a) = G(0, a);
                    B(1, 2 * a + 1) = G(1, a);
                    B(2, 2 * a) = G(1, a);
                    B(2, 2 * a + 1) = G(0, a);
                } else {
                    B(0, 3 * a) = G(0, a);
                    B(1, 3 * a + 1) = G(1, a);
                    B(2, 3 * a + 2) = G(2, a);
                    B(3, 3 * a + 1) = G(2, a);
                    B(3, 3 * a + 2) = G(1, a);
                    B(4, 3 * a) = G(2, a);
                    B(4, 3 * a + 2) = G(0, a);
                    B(5, 3 * a) = G(1, a);
                    B(5, 3 * a + 1) = G(0, a);
                }
            }
            K += q[3] * det * B.transpose() * coef * B;
        }
    }
    return K;
}

// Structured-grid assembly with a per-cell coefficient (classical FEM with
// piecewise-constant material); the matching-mesh reference.
inline pdfem::CsrMatrix assemble_per_cell_material(
    const pdfem::StructuredGrid& grid, const pdfem::DofMap& dofmap,
    const std::function<DenseMatrix(long cell)>& coef_of, pdfem::Physics physics) {
    using namespace pdfem;
    const int d = dofmap.dofs_per_node;
    const int ncorner = grid.nodes_per_cell();
    std::vector<std::vector<int>> adj(dofmap.n_nodes_reduced);
    long corners[8];
    for (long c = 0; c < grid.cell_count(); ++c) {
        grid.cell_nodes(grid.cell_coords(c), corners);
        for (int a = 0; a < ncorner; ++a)
            for (int b = 0; b < ncorner; ++b)
                adj[dofmap.node_reduced[corners[a]]].push_back(dofmap.node_reduced[corners[b]]);
    }
    for (auto& row : adj) {
        std::sort(row.begin(), row.end());
        row.erase(std::unique(row.begin(), row.end()), row.end());
    }
    CsrMatrix k;
    k.n_rows = k.n_cols = static_cast<int>(dofmap.n_nodes_reduced) * d;
    k.row_ptr.assign(k.n_rows + 1, 0);
    long nnz = 0;
    for (size_t i = 0; i < adj.size(); ++i)
        for (int c = 0; c < d; ++c) {
            nnz += static_cast<long>(adj[i].size()) * d;
            k.row_ptr[i * d + c + 1] = static_cast<int>(nnz);
        }
    for (size_t i = 0; i < adj.size(); ++i)
        for (int c = 0; c < d; ++c)
            for (int nb : adj[i])
                for (int cc = 0; cc < d; ++cc) k.cols.push_back(nb * d + cc);
    k.vals.assign(k.cols.size(), 0.0);

    Vec3 cp[8];
    for (long c = 0; c < grid.cell_count(); ++c) {
        const auto cc = grid.cell_coords(c);
        grid.cell_nodes(cc, corners);
        grid.cell_corner_positions(cc, cp);
        const DenseMatrix coef = coef_of(c);
        const DenseMatrix local =
            physics == Physics::thermal
                ? elements::local_stiffness_thermal(grid.cell_type(),
                                                    std::span<const Vec3>(cp, ncorner), coef)
                : elements::local_stiffness_elastic(grid.cell_type(),
                                                    std::span<const Vec3>(cp, ncorner), coef);
        for (int a = 0; a < ncorner; ++a)
            for (int ca = 0; ca < d; ++ca) {
                const int r = dofmap.node_reduced[corners[a]] * d + ca;
                for (int b = 0; b < ncorner; ++b)
                    for (int cb = 0; cb < d; ++cb) {
                        const int col = dofmap.node_reduced[corners[b]] * d + cb;
                        const int* begin = k.cols.data() + k.row_ptr[r];
                        const int* end = k.cols.data() + k.row_ptr[r + 1];
                        const int* it = std::lower_bound(begin, end, col);
                        k.vals[it - k.cols.data()] += local(a * d + ca, b * d + cb);
                    }
            }
    }
    return k;
}

inline std::mt19937_64 rng(uint64_t seed = 20240917ULL) { return std::mt19937_64(seed); }

inline std::vector<double> random_vector(std::mt19937_64& gen, size_t n, double lo = -1.0,
                                         double hi = 1.0) {
    std::uniform_real_distribution<double> dist(lo, hi);
    std::vector<double> v(n);
    for (double& x : v) x = dist(gen);
    return v;
}

} // namespace oracle
