#include <doctest.h>

#include "oracles.hpp"
#include "pdfem/elements.hpp"

using namespace pdfem;
using namespace pdfem::elements;

namespace {

Vec3 random_ref_point(std::mt19937_64& gen, ElementType t) {
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    std::uniform_real_distribution<double> u11(-1.0, 1.0);
    switch (t) {
        case ElementType::tri3: {
            double r = u01(gen), s = u01(gen);
            if (r + s > 1) {
                r = 1 - r;
                s = 1 - s;
            }
            return {r, s, 0};
        }
        case ElementType::tet4: {
            double r, s, t_;
            do {
                r = u01(gen);
                s = u01(gen);
                t_ = u01(gen);
            } while (r + s + t_ > 1);
            return {r, s, t_};
        }
        case ElementType::qua4:
            return {u11(gen), u11(gen), 0};
        case ElementType::hex8:
            return {u11(gen), u11(gen), u11(gen)};
    }
    return {0, 0, 0};
}

const std::vector<Vec3> kUnitSquare{{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0}};
const std::vector<Vec3> kUnitTri{{0, 0, 0}, {1, 0, 0}, {0, 1, 0}};
const std::vector<Vec3> kUnitCube{{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0},
                                  {0, 0, 1}, {1, 0, 1}, {1, 1, 1}, {0, 1, 1}};

} // namespace

TEST_SUITE("elements") {

TEST_CASE("shape values at distinguished points") {
    double n[8];
    shape_values(ElementType::qua4, {0, 0, 0}, n);
    for (int a = 0; a < 4; ++a) CHECK(n[a] == doctest::Approx(0.25));
    shape_values(ElementType::qua4, {-1, -1, 0}, n);
    CHECK(n[0] == doctest::Approx(1.0));
    CHECK(n[1] == doctest::Approx(0.0));
    CHECK(n[2] == doctest::Approx(0.0));
    CHECK(n[3] == doctest::Approx(0.0));
    shape_values(ElementType::tri3, {1.0 / 3, 1.0 / 3, 0}, n);
    for (int a = 0; a < 3; ++a) CHECK(n[a] == doctest::Approx(1.0 / 3));

    CHECK_THROWS_AS(shape_values(ElementType::qua4, {1.5, 0, 0}, n), ValidationError);
    CHECK_THROWS_AS(shape_values(ElementType::tri3, {0.7, 0.7, 0}, n), ValidationError);
}

TEST_CASE("partition of unity and zero gradient sum at 1000 random points") {
    auto gen = oracle::rng(11);
    for (ElementType t :
         {ElementType::tri3, ElementType::qua4, ElementType::tet4, ElementType::hex8}) {
        const int nn = element_node_count(t);
        const int d = element_dim(t);
        for (int trial = 0; trial < 1000; ++trial) {
            const Vec3 p = random_ref_point(gen, t);
            double n[8], g[3 * 8];
            shape_values(t, p, n);
            shape_gradients(t, p, g);
            double sum = 0;
            for (int a = 0; a < nn; ++a) sum += n[a];
            CHECK(std::abs(sum - 1.0) < 1e-13);
            for (int i = 0; i < d; ++i) {
                double gs = 0;
                for (int a = 0; a < nn; ++a) gs += g[i * nn + a];
                CHECK(std::abs(gs) < 1e-13);
            }
        }
    }
}

TEST_CASE("linear field reproduction through the jacobian map") {
    // u = x on the unit square: mapped gradient (1, 0) via local stiffness
    // against an identity-conductivity quadratic form argument
    const DenseMatrix id2 = DenseMatrix::identity(2);
    const DenseMatrix k = local_stiffness_thermal(ElementType::qua4, kUnitSquare, id2);
    // nodal values of u = x
    const double ux[4] = {0, 1, 1, 0};
    // energy = int |grad u|^2 = 1 for u = x on the unit square
    double e = 0;
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) e += ux[a] * k(a, b) * ux[b];
    CHECK(e == doctest::Approx(1.0).epsilon(1e-13));

    const DenseMatrix id3 = DenseMatrix::identity(3);
    const DenseMatrix kh = local_stiffness_thermal(ElementType::hex8, kUnitCube, id3);
    const double uxyz[8] = {0, 1, 2, 1, 1, 2, 3, 2}; // u = x + y + z at corners
    double eh = 0;
    for (int a = 0; a < 8; ++a)
        for (int b = 0; b < 8; ++b) eh += uxyz[a] * kh(a, b) * uxyz[b];
    CHECK(eh == doctest::Approx(3.0).epsilon(1e-13));
}

TEST_CASE("unit square conductivity matrix matches the classic values") {
    const DenseMatrix k =
        local_stiffness_thermal(ElementType::qua4, kUnitSquare, DenseMatrix::identity(2));
    const double expect[4][4] = {{2. / 3, -1. / 6, -1. / 3, -1. / 6},
                                 {-1. / 6, 2. / 3, -1. / 6, -1. / 3},
                                 {-1. / 3, -1. / 6, 2. / 3, -1. / 6},
                                 {-1. / 6, -1. / 3, -1. / 6, 2. / 3}};
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) CHECK(k(a, b) == doctest::Approx(expect[a][b]).epsilon(1e-13));
}

TEST_CASE("local stiffness: zero material, scaling, row sums") {
    auto gen = oracle::rng(12);
    const DenseMatrix zero(2, 2);
    const DenseMatrix kz = local_stiffness_thermal(ElementType::tri3, kUnitTri, zero);
    CHECK(kz.max_abs() == 0.0);

    DenseMatrix lam = DenseMatrix::identity(2, 1.7);
    const DenseMatrix k1 = local_stiffness_thermal(ElementType::qua4, kUnitSquare, lam);
    lam *= 3.0;
    const DenseMatrix k3 = local_stiffness_thermal(ElementType::qua4, kUnitSquare, lam);
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) CHECK(k3(a, b) == doctest::Approx(3.0 * k1(a, b)));

    // constants in the kernel: row sums vanish, also on skewed elements
    std::uniform_real_distribution<double> jitter(-0.2, 0.2);
    std::vector<Vec3> skew = kUnitSquare;
    for (auto& p : skew) {
        p[0] += jitter(gen);
        p[1] += jitter(gen);
    }
    const DenseMatrix ks = local_stiffness_thermal(ElementType::qua4, skew, DenseMatrix::identity(2));
    for (int a = 0; a < 4; ++a) {
        double row = 0;
        for (int b = 0; b < 4; ++b) row += ks(a, b);
        CHECK(std::abs(row) < 1e-13);
    }
    CHECK(ks.sym_error() < 1e-14);
}

TEST_CASE("elastic stiffness annihilates rigid modes and matches a dense oracle") {
    auto gen = oracle::rng(13);
    std::uniform_real_distribution<double> jitter(-0.15, 0.15);
    const DenseMatrix D = elastic_D(1.3, 0.28, ElasticModel::plane_strain);

    std::vector<Vec3> coords = kUnitSquare;
    for (auto& p : coords) {
        p[0] += jitter(gen);
        p[1] += jitter(gen);
    }
    const DenseMatrix k = local_stiffness_elastic(ElementType::qua4, coords, D);
    CHECK(k.sym_error() < 1e-12 * k.max_abs());

    // rigid translation and rotation in the kernel
    const double scale = k.max_abs();
    std::vector<std::vector<double>> modes = {
        {1, 0, 1, 0, 1, 0, 1, 0},
        {0, 1, 0, 1, 0, 1, 0, 1},
    };
    std::vector<double> rot;
    for (const auto& p : coords) {
        rot.push_back(-p[1]);
        rot.push_back(p[0]);
    }
    modes.push_back(rot);
    for (const auto& m : modes)
        for (int r = 0; r < 8; ++r) {
            double s = 0;
            for (int c = 0; c < 8; ++c) s += k(r, c) * m[c];
            CHECK(std::abs(s) < 1e-12 * scale);
        }

    // independent dense-quadrature oracle (unit-square geometry is affine,
    // so the 2x2 default rule must agree with a degree-6 oracle)
    const Eigen::MatrixXd ko =
        oracle::dense_local_stiffness(ElementType::qua4, kUnitSquare, oracle::to_eigen(D), true, 4);
    const DenseMatrix ka = local_stiffness_elastic(ElementType::qua4, kUnitSquare, D);
    for (int r = 0; r < 8; ++r)
        for (int c = 0; c < 8; ++c) CHECK(ka(r, c) == doctest::Approx(ko(r, c)).epsilon(1e-12));

    const DenseMatrix zero(3, 3);
    CHECK(local_stiffness_elastic(ElementType::qua4, kUnitSquare, zero).max_abs() == 0.0);
}

TEST_CASE("quadrature exactness on affine geometry") {
    // tri3 stiffness is exact with one point: a degree-6 oracle agrees
    const DenseMatrix lam = DenseMatrix::identity(2, 2.3);
    const DenseMatrix kt = local_stiffness_thermal(ElementType::tri3, kUnitTri, lam);
    const Eigen::MatrixXd kto =
        oracle::dense_local_stiffness(ElementType::tri3, kUnitTri, oracle::to_eigen(lam), false);
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) CHECK(kt(r, c) == doctest::Approx(kto(r, c)).epsilon(1e-13));

    // hex8 on affine geometry: default 2x2x2 equals 4-point oracle
    const DenseMatrix lam3 = DenseMatrix::identity(3, 0.7);
    const DenseMatrix kh = local_stiffness_thermal(ElementType::hex8, kUnitCube, lam3);
    const Eigen::MatrixXd kho =
        oracle::dense_local_stiffness(ElementType::hex8, kUnitCube, oracle::to_eigen(lam3), false);
    for (int r = 0; r < 8; ++r)
        for (int c = 0; c < 8; ++c)
            CHECK(kh(r, c) == doctest::Approx(kho(r, c)).epsilon(1e-12));
}

TEST_CASE("consistent mass: entries, sums, scaling") {
    const DenseMatrix mq = local_mass(ElementType::qua4, kUnitSquare);
    double sum = 0;
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) {
            CHECK(mq(a, b) >= 0.0);
            sum += mq(a, b);
        }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-13));
    // classic (1/36) [[4,2,1,2],...]
    CHECK(mq(0, 0) == doctest::Approx(4.0 / 36).epsilon(1e-12));
    CHECK(mq(0, 1) == doctest::Approx(2.0 / 36).epsilon(1e-12));
    CHECK(mq(0, 2) == doctest::Approx(1.0 / 36).epsilon(1e-12));

    const DenseMatrix mt = local_mass(ElementType::tri3, kUnitTri);
    double sumt = 0;
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) sumt += mt(a, b);
    CHECK(sumt == doctest::Approx(0.5).epsilon(1e-13));

    std::vector<Vec3> scaled = kUnitTri;
    for (auto& p : scaled) {
        p[0] *= 2.5;
        p[1] *= 2.5;
    }
    const DenseMatrix ms = local_mass(ElementType::tri3, scaled);
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b)
            CHECK(ms(a, b) == doctest::Approx(2.5 * 2.5 * mt(a, b)).epsilon(1e-12));
}

TEST_CASE("elastic constants from bulk modulus and poisson ratio") {
    const DenseMatrix d = elastic_D(1.0, 0.0, ElasticModel::plane_strain);
    CHECK(d(0, 0) == doctest::Approx(3.0));  // lambda + 2 mu = 0 + 2 * 1.5
    CHECK(d(0, 1) == doctest::Approx(0.0));
    CHECK(d(2, 2) == doctest::Approx(1.5));

    // shared poisson ratio: contrast c scales D exactly
    const DenseMatrix d1 = elastic_D(1.0, 0.3, ElasticModel::three_d);
    const DenseMatrix d100 = elastic_D(100.0, 0.3, ElasticModel::three_d);
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j)
            CHECK(d100(i, j) == doctest::Approx(100.0 * d1(i, j)).epsilon(1e-13));

    CHECK_THROWS_AS(elastic_D(1.0, 0.5, ElasticModel::plane_strain), ValidationError);
    CHECK_THROWS_AS(elastic_D(1.0, -1.0, ElasticModel::plane_strain), ValidationError);
    CHECK_THROWS_AS(elastic_D(-1.0, 0.3, ElasticModel::plane_strain), ValidationError);
}

TEST_CASE("material validation") {
    CHECK_THROWS_AS(ThermalMaterial::isotropic(2, -1.0), ValidationError);
    DenseMatrix asym(2, 2);
    asym(0, 0) = 1;
    asym(1, 1) = 1;
    asym(0, 1) = 0.5;
    asym(1, 0) = -0.5;
    CHECK_THROWS_AS(ThermalMaterial::anisotropic(asym), ValidationError);
    DenseMatrix indef = DenseMatrix::identity(2);
    indef(1, 1) = -2.0;
    CHECK_THROWS_AS(ThermalMaterial::anisotropic(indef), ValidationError);
    DenseMatrix ok(2, 2);
    ok(0, 0) = 2;
    ok(1, 1) = 1;
    ok(0, 1) = ok(1, 0) = 0.5;
    CHECK_NOTHROW(ThermalMaterial::anisotropic(ok));
}

TEST_CASE("geometry errors on inverted elements") {
    std::vector<Vec3> inverted = {{0, 0, 0}, {0, 1, 0}, {1, 1, 0}, {1, 0, 0}}; // clockwise
    CHECK_THROWS_AS(
        local_stiffness_thermal(ElementType::qua4, inverted, DenseMatrix::identity(2)),
        GeometryError);
}

} // TEST_SUITE
