#include "pdfem/elements.hpp"

#include <atomic>
#include <cmath>

namespace pdfem::elements {

namespace {

std::atomic<long> g_quadrature_evals{0};

constexpr double kRefTol = 1e-9;

void check_inside(ElementType t, const Vec3& p) {
    bool ok = true;
    switch (t) {
        case ElementType::tri3:
            ok = p[0] >= -kRefTol && p[1] >= -kRefTol && p[0] + p[1] <= 1.0 + kRefTol;
            break;
        case ElementType::tet4:
            ok = p[0] >= -kRefTol && p[1] >= -kRefTol && p[2] >= -kRefTol &&
                 p[0] + p[1] + p[2] <= 1.0 + kRefTol;
            break;
        case ElementType::qua4:
            ok = std::abs(p[0]) <= 1.0 + kRefTol && std::abs(p[1]) <= 1.0 + kRefTol;
            break;
        case ElementType::hex8:
            ok = std::abs(p[0]) <= 1.0 + kRefTol && std::abs(p[1]) <= 1.0 + kRefTol &&
                 std::abs(p[2]) <= 1.0 + kRefTol;
            break;
    }
    if (!ok)
        throw ValidationError(std::string("shape_values: point outside reference ") +
                              element_name(t));
}

// corner sign tables, shared by qua4/hex8
constexpr int kQuadSign[4][2] = {{-1, -1}, {1, -1}, {1, 1}, {-1, 1}};

struct GaussPoints {
    std::vector<double> x, w;
};

GaussPoints gauss_1d(int n) {
    switch (n) {
        case 1: return {{0.0}, {2.0}};
        case 2: {
            const double g = 1.0 / std::sqrt(3.0);
            return {{-g, g}, {1.0, 1.0}};
        }
        case 3: {
            const double g = std::sqrt(3.0 / 5.0);
            return {{-g, 0.0, g}, {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0}};
        }
        case 4: {
            const double a = 0.3399810435848563, b = 0.8611363115940526;
            const double wa = 0.6521451548625461, wb = 0.3478548451374538;
            return {{-b, -a, a, b}, {wb, wa, wa, wb}};
        }
        case 5: {
            const double a = 0.5384693101056831, b = 0.9061798459386640;
            const double wa = 0.4786286704993665, wb = 0.2369268850561891;
            return {{-b, -a, 0.0, a, b}, {wb, wa, 0.5688888888888889, wa, wb}};
        }
        default:
            throw ValidationError("gauss_rule: points_per_axis must be 1..5");
    }
}

QuadratureRule tensor_rule(int dim, int n) {
    const GaussPoints g = gauss_1d(n);
    QuadratureRule r;
    if (dim == 2) {
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i) {
                r.points.push_back({g.x[i], g.x[j], 0.0});
                r.weights.push_back(g.w[i] * g.w[j]);
            }
    } else {
        for (int k = 0; k < n; ++k)
            for (int j = 0; j < n; ++j)
                for (int i = 0; i < n; ++i) {
                    r.points.push_back({g.x[i], g.x[j], g.x[k]});
                    r.weights.push_back(g.w[i] * g.w[j] * g.w[k]);
                }
    }
    return r;
}

QuadratureRule make_stiffness_rule(ElementType t) {
    switch (t) {
        case ElementType::tri3:
            return {{{1.0 / 3.0, 1.0 / 3.0, 0.0}}, {0.5}};
        case ElementType::tet4:
            return {{{0.25, 0.25, 0.25}}, {1.0 / 6.0}};
        case ElementType::qua4:
            return tensor_rule(2, 2);
        case ElementType::hex8:
            return tensor_rule(3, 2);
    }
    return {};
}

QuadratureRule make_mass_rule(ElementType t) {
    switch (t) {
        case ElementType::tri3:
            return {{{1.0 / 6.0, 1.0 / 6.0, 0.0}, {2.0 / 3.0, 1.0 / 6.0, 0.0}, {1.0 / 6.0, 2.0 / 3.0, 0.0}},
                    {1.0 / 6.0, 1.0 / 6.0, 1.0 / 6.0}};
        case ElementType::tet4: {
            const double a = (5.0 - std::sqrt(5.0)) / 20.0;
            const double b = (5.0 + 3.0 * std::sqrt(5.0)) / 20.0;
            return {{{a, a, a}, {b, a, a}, {a, b, a}, {a, a, b}}, {1.0 / 24.0, 1.0 / 24.0, 1.0 / 24.0, 1.0 / 24.0}};
        }
        case ElementType::qua4:
            return tensor_rule(2, 2);
        case ElementType::hex8:
            return tensor_rule(3, 2);
    }
    return {};
}

struct MappedPoint {
    double dn_phys[3][8]; // physical gradients, [axis][node]
    double det_jac;
};

MappedPoint map_gradients(ElementType t, std::span<const Vec3> coords, const Vec3& ref) {
    const int d = element_dim(t);
    const int nn = element_node_count(t);
    double dn[3 * 8];
    shape_gradients(t, ref, dn);

    double jac[3][3] = {};
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            double s = 0.0;
            for (int a = 0; a < nn; ++a) s += dn[i * nn + a] * coords[a][j];
            jac[i][j] = s;
        }

    double det, inv[3][3];
    if (d == 2) {
        det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
        if (!(det > 0.0)) throw GeometryError("non-positive Jacobian in element mapping");
        const double id = 1.0 / det;
        inv[0][0] = jac[1][1] * id;
        inv[0][1] = -jac[0][1] * id;
        inv[1][0] = -jac[1][0] * id;
        inv[1][1] = jac[0][0] * id;
    } else {
        det = jac[0][0] * (jac[1][1] * jac[2][2] - jac[1][2] * jac[2][1]) -
              jac[0][1] * (jac[1][0] * jac[2][2] - jac[1][2] * jac[2][0]) +
              jac[0][2] * (jac[1][0] * jac[2][1] - jac[1][1] * jac[2][0]);
        if (!(det > 0.0)) throw GeometryError("non-positive Jacobian in element mapping");
        const double id = 1.0 / det;
        inv[0][0] = (jac[1][1] * jac[2][2] - jac[1][2] * jac[2][1]) * id;
        inv[0][1] = (jac[0][2] * jac[2][1] - jac[0][1] * jac[2][2]) * id;
        inv[0][2] = (jac[0][1] * jac[1][2] - jac[0][2] * jac[1][1]) * id;
        inv[1][0] = (jac[1][2] * jac[2][0] - jac[1][0] * jac[2][2]) * id;
        inv[1][1] = (jac[0][0] * jac[2][2] - jac[0][2] * jac[2][0]) * id;
        inv[1][2] = (jac[0][2] * jac[1][0] - jac[0][0] * jac[1][2]) * id;
        inv[2][0] = (jac[1][0] * jac[2][1] - jac[1][1] * jac[2][0]) * id;
        inv[2][1] = (jac[0][1] * jac[2][0] - jac[0][0] * jac[2][1]) * id;
        inv[2][2] = (jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0]) * id;
    }

    // grad_x N = J^{-1} grad_ref N  (J_{ij} = dx_j/dxi_i)
    MappedPoint mp;
    mp.det_jac = det;
    for (int a = 0; a < nn; ++a)
        for (int i = 0; i < d; ++i) {
            double s = 0.0;
            for (int j = 0; j < d; ++j) s += inv[i][j] * dn[j * nn + a];
            mp.dn_phys[i][a] = s;
        }
    return mp;
}

} // namespace

const QuadratureRule& stiffness_rule(ElementType t) {
    static const QuadratureRule tri = make_stiffness_rule(ElementType::tri3);
    static const QuadratureRule qua = make_stiffness_rule(ElementType::qua4);
    static const QuadratureRule tet = make_stiffness_rule(ElementType::tet4);
    static const QuadratureRule hex = make_stiffness_rule(ElementType::hex8);
    switch (t) {
        case ElementType::tri3: return tri;
        case ElementType::qua4: return qua;
        case ElementType::tet4: return tet;
        case ElementType::hex8: return hex;
    }
    return qua;
}

const QuadratureRule& mass_rule(ElementType t) {
    static const QuadratureRule tri = make_mass_rule(ElementType::tri3);
    static const QuadratureRule qua = make_mass_rule(ElementType::qua4);
    static const QuadratureRule tet = make_mass_rule(ElementType::tet4);
    static const QuadratureRule hex = make_mass_rule(ElementType::hex8);
    switch (t) {
        case ElementType::tri3: return tri;
        case ElementType::qua4: return qua;
        case ElementType::tet4: return tet;
        case ElementType::hex8: return hex;
    }
    return qua;
}

QuadratureRule gauss_rule(ElementType t, int points_per_axis) {
    if (t != ElementType::qua4 && t != ElementType::hex8)
        throw ValidationError("gauss_rule: tensor rules exist only for qua4/hex8");
    return tensor_rule(element_dim(t), points_per_axis);
}

void shape_values(ElementType t, const Vec3& p, double* out) {
    check_inside(t, p);
    switch (t) {
        case ElementType::tri3:
            out[0] = 1.0 - p[0] - p[1];
            out[1] = p[0];
            out[2] = p[1];
            break;
        case ElementType::tet4:
            out[0] = 1.0 - p[0] - p[1] - p[2];
            out[1] = p[0];
            out[2] = p[1];
            out[3] = p[2];
            break;
        case ElementType::qua4:
            for (int a = 0; a < 4; ++a)
                out[a] = 0.25 * (1.0 + kQuadSign[a][0] * p[0]) * (1.0 + kQuadSign[a][1] * p[1]);
            break;
        case ElementType::hex8:
            for (int a = 0; a < 8; ++a) {
                const int sz = a < 4 ? -1 : 1;
                const int* sq = kQuadSign[a % 4];
                out[a] = 0.125 * (1.0 + sq[0] * p[0]) * (1.0 + sq[1] * p[1]) * (1.0 + sz * p[2]);
            }
            break;
    }
}

void shape_gradients(ElementType t, const Vec3& p, double* out) {
    switch (t) {
        case ElementType::tri3:
            // rows: d/dr, d/ds
            out[0] = -1.0; out[1] = 1.0; out[2] = 0.0;
            out[3] = -1.0; out[4] = 0.0; out[5] = 1.0;
            break;
        case ElementType::tet4:
            out[0] = -1.0; out[1] = 1.0; out[2] = 0.0; out[3] = 0.0;
            out[4] = -1.0; out[5] = 0.0; out[6] = 1.0; out[7] = 0.0;
            out[8] = -1.0; out[9] = 0.0; out[10] = 0.0; out[11] = 1.0;
            break;
        case ElementType::qua4:
            for (int a = 0; a < 4; ++a) {
                out[a] = 0.25 * kQuadSign[a][0] * (1.0 + kQuadSign[a][1] * p[1]);
                out[4 + a] = 0.25 * kQuadSign[a][1] * (1.0 + kQuadSign[a][0] * p[0]);
            }
            break;
        case ElementType::hex8:
            for (int a = 0; a < 8; ++a) {
                const int sz = a < 4 ? -1 : 1;
                const int* sq = kQuadSign[a % 4];
                out[a] = 0.125 * sq[0] * (1.0 + sq[1] * p[1]) * (1.0 + sz * p[2]);
                out[8 + a] = 0.125 * sq[1] * (1.0 + sq[0] * p[0]) * (1.0 + sz * p[2]);
                out[16 + a] = 0.125 * sz * (1.0 + sq[0] * p[0]) * (1.0 + sq[1] * p[1]);
            }
            break;
    }
}

ThermalMaterial ThermalMaterial::isotropic(int dim, double lambda) {
    if (!(lambda > 0.0)) throw ValidationError("thermal material: lambda must be > 0");
    return {DenseMatrix::identity(dim, lambda)};
}

ThermalMaterial ThermalMaterial::anisotropic(DenseMatrix tensor) {
    if (tensor.rows() != tensor.cols() || (tensor.rows() != 2 && tensor.rows() != 3))
        throw ValidationError("thermal material: tensor must be 2x2 or 3x3");
    if (tensor.sym_error() > 1e-12 * std::max(1.0, tensor.max_abs()))
        throw ValidationError("thermal material: tensor must be symmetric");
    for (double ev : symmetric_eigenvalues(tensor))
        if (!(ev > 0.0)) throw ValidationError("thermal material: tensor must be positive definite");
    return {std::move(tensor)};
}

DenseMatrix ElasticMaterial::constitutive() const {
    return elastic_D(bulk_modulus, poisson_ratio, model);
}

DenseMatrix elastic_D(double k, double nu, ElasticModel model) {
    if (!(k > 0.0)) throw ValidationError("elastic material: bulk modulus must be > 0");
    if (!(nu > -1.0 && nu < 0.5))
        throw ValidationError("elastic material: poisson ratio must lie in (-1, 0.5)");
    const double E = 3.0 * k * (1.0 - 2.0 * nu);
    const double mu = E / (2.0 * (1.0 + nu));
    const double lam = E * nu / ((1.0 + nu) * (1.0 - 2.0 * nu));
    if (model == ElasticModel::plane_strain) {
        DenseMatrix D(3, 3);
        D(0, 0) = D(1, 1) = lam + 2.0 * mu;
        D(0, 1) = D(1, 0) = lam;
        D(2, 2) = mu;
        return D;
    }
    DenseMatrix D(6, 6);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) D(i, j) = (i == j) ? lam + 2.0 * mu : lam;
    for (int i = 3; i < 6; ++i) D(i, i) = mu;
    return D;
}

DenseMatrix local_stiffness_thermal(ElementType t, std::span<const Vec3> coords,
                                    const DenseMatrix& lambda, const QuadratureRule* rule) {
    g_quadrature_evals.fetch_add(1, std::memory_order_relaxed);
    const int d = element_dim(t);
    const int nn = element_node_count(t);
    if (lambda.rows() != d || lambda.cols() != d)
        throw ValidationError("local_stiffness_thermal: tensor dimension mismatch");
    const QuadratureRule& q = rule ? *rule : stiffness_rule(t);

    DenseMatrix K(nn, nn);
    for (int qp = 0; qp < q.size(); ++qp) {
        const MappedPoint mp = map_gradients(t, coords, q.points[qp]);
        const double w = q.weights[qp] * mp.det_jac;
        double lg[3][8]; // lambda * grad N
        for (int i = 0; i < d; ++i)
            for (int a = 0; a < nn; ++a) {
                double s = 0.0;
                for (int j = 0; j < d; ++j) s += lambda(i, j) * mp.dn_phys[j][a];
                lg[i][a] = s;
            }
        for (int a = 0; a < nn; ++a)
            for (int b = 0; b < nn; ++b) {
                double s = 0.0;
                for (int i = 0; i < d; ++i) s += mp.dn_phys[i][a] * lg[i][b];
                K(a, b) += w * s;
            }
    }
    return K;
}

DenseMatrix local_stiffness_elastic(ElementType t, std::span<const Vec3> coords,
                                    const DenseMatrix& D, const QuadratureRule* rule) {
    g_quadrature_evals.fetch_add(1, std::memory_order_relaxed);
    const int d = element_dim(t);
    const int nn = element_node_count(t);
    const int m = d == 2 ? 3 : 6;
    if (D.rows() != m || D.cols() != m)
        throw ValidationError("local_stiffness_elastic: Voigt dimension mismatch");
    const QuadratureRule& q = rule ? *rule : stiffness_rule(t);

    const int ndof = d * nn;
    DenseMatrix K(ndof, ndof);
    std::vector<double> B(static_cast<size_t>(m) * ndof);
    std::vector<double> DB(static_cast<size_t>(m) * ndof);

    for (int qp = 0; qp < q.size(); ++qp) {
        const MappedPoint mp = map_gradients(t, coords, q.points[qp]);
        const double w = q.weights[qp] * mp.det_jac;

        std::fill(B.begin(), B.end(), 0.0);
        for (int a = 0; a < nn; ++a) {
            const double dx = mp.dn_phys[0][a];
            const double dy = mp.dn_phys[1][a];
            if (d == 2) {
                B[0 * ndof + 2 * a] = dx;
                B[1 * ndof + 2 * a + 1] = dy;
                B[2 * ndof + 2 * a] = dy;
                B[2 * ndof + 2 * a + 1] = dx;
            } else {
                const double dz = mp.dn_phys[2][a];
                B[0 * ndof + 3 * a] = dx;
                B[1 * ndof + 3 * a + 1] = dy;
                B[2 * ndof + 3 * a + 2] = dz;
                // engineering shears: 23, 13, 12
                B[3 * ndof + 3 * a + 1] = dz;
                B[3 * ndof + 3 * a + 2] = dy;
                B[4 * ndof + 3 * a] = dz;
                B[4 * ndof + 3 * a + 2] = dx;
                B[5 * ndof + 3 * a] = dy;
                B[5 * ndof + 3 * a + 1] = dx;
            }
        }

        for (int i = 0; i < m; ++i)
            for (int c = 0; c < ndof; ++c) {
                double s = 0.0;
                for (int j = 0; j < m; ++j) s += D(i, j) * B[j * ndof + c];
                DB[i * ndof + c] = s;
            }
        for (int r = 0; r < ndof; ++r)
            for (int c = 0; c < ndof; ++c) {
                double s = 0.0;
                for (int i = 0; i < m; ++i) s += B[i * ndof + r] * DB[i * ndof + c];
                K(r, c) += w * s;
            }
    }
    return K;
}

DenseMatrix local_mass(ElementType t, std::span<const Vec3> coords) {
    g_quadrature_evals.fetch_add(1, std::memory_order_relaxed);
    const int nn = element_node_count(t);
    const QuadratureRule& q = mass_rule(t);
    DenseMatrix M(nn, nn);
    double N[8];
    for (int qp = 0; qp < q.size(); ++qp) {
        shape_values(t, q.points[qp], N);
        const MappedPoint mp = map_gradients(t, coords, q.points[qp]);
        const double w = q.weights[qp] * mp.det_jac;
        for (int a = 0; a < nn; ++a)
            for (int b = 0; b < nn; ++b) M(a, b) += w * N[a] * N[b];
    }
    return M;
}

double element_measure(ElementType t, std::span<const Vec3> coords) {
    const QuadratureRule& q = mass_rule(t);
    double v = 0.0;
    for (int qp = 0; qp < q.size(); ++qp)
        v += q.weights[qp] * map_gradients(t, coords, q.points[qp]).det_jac;
    return v;
}

long quadrature_evaluations() { return g_quadrature_evals.load(std::memory_order_relaxed); }

void reset_quadrature_evaluations() { g_quadrature_evals.store(0, std::memory_order_relaxed); }

} // namespace pdfem::elements
