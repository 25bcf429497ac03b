#include <doctest.h>

#include "oracles.hpp"
#include "pdfem/homogenize.hpp"

using namespace pdfem;

namespace {

PdfemProblem disk_problem(int n, double contrast, double target_h = 0.0) {
    PdfemProblem p;
    p.grid = StructuredGrid::unit(2, n);
    p.physics = Physics::thermal;
    p.coef_mat = DenseMatrix::identity(2, 1.0);
    p.coef_inc = DenseMatrix::identity(2, contrast);
    p.inclusion = gen_disk_mesh({0.5, 0.5, 0}, 0.3, target_h > 0 ? target_h : 0.5 / n);
    p.solver.tol = 1e-11;
    return p;
}

} // namespace

TEST_SUITE("homogenize") {

TEST_CASE("homogeneous problem: every battery returns lambda_mat * I") {
    for (BcKind kind : {BcKind::kubc, BcKind::subc, BcKind::periodic}) {
        PdfemProblem p;
        p.grid = StructuredGrid::unit(2, 6);
        p.physics = Physics::thermal;
        p.coef_mat = DenseMatrix::identity(2, 2.5);
        p.coef_inc = DenseMatrix::identity(2, 2.5);
        p.periodic = kind == BcKind::periodic;
        p.solver.tol = 1e-12;
        const auto res = run_battery(p, kind);
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                CHECK(std::abs(res.tensor.matrix(i, j) - (i == j ? 2.5 : 0.0)) < 1e-10);
    }
}

TEST_CASE("contrast one degenerates to the matrix phase") {
    const auto res = run_kubc(disk_problem(12, 1.0));
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            CHECK(std::abs(res.tensor.matrix(i, j) - (i == j ? 1.0 : 0.0)) < 1e-10);
}

TEST_CASE("disk at contrast 10: effective tensor inside the mixture bounds") {
    const auto res = run_kubc(disk_problem(20, 10.0));
    const double f = res.tensor.volume_fraction;
    CHECK(f == doctest::Approx(M_PI * 0.15 * 0.15).epsilon(0.01));
    const auto [reuss, voigt] =
        voigt_reuss_bounds(f, DenseMatrix::identity(2, 1.0), DenseMatrix::identity(2, 10.0));
    const auto bc = check_bounds(res.tensor.matrix, reuss, voigt);
    CHECK(bc.inside);
    CHECK(res.tensor.sym_error_rel() < 1e-8);
    CHECK(res.tensor.energy_crosscheck < 1e-6);
}

TEST_CASE("kubc dominates subc in the Loewner order") {
    const auto k = run_kubc(disk_problem(16, 10.0)).tensor.matrix;
    const auto s = run_subc(disk_problem(16, 10.0)).tensor.matrix;
    const auto ev = symmetric_eigenvalues(k - s);
    CHECK(ev.front() >= -1e-8);
}

TEST_CASE("effective conductivity grows with contrast") {
    const double l1 = run_kubc(disk_problem(12, 1.0)).tensor.matrix(0, 0);
    const double l2 = run_kubc(disk_problem(12, 2.0)).tensor.matrix(0, 0);
    const double l10 = run_kubc(disk_problem(12, 10.0)).tensor.matrix(0, 0);
    CHECK(l1 == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(l2 > l1 + 1e-3);
    CHECK(l10 > l2 + 1e-3);
}

TEST_CASE("centered disk: frame symmetry of the effective tensor") {
    const auto t = run_kubc(disk_problem(20, 10.0)).tensor.matrix;
    const double trace = t(0, 0) + t(1, 1);
    CHECK(std::abs(t(0, 1)) <= 1e-6 * trace);
    CHECK(std::abs(t(1, 0)) <= 1e-6 * trace);
    CHECK(std::abs(t(0, 0) - t(1, 1)) <= 1e-6 * std::abs(t(0, 0)));
}

TEST_CASE("subc reports the prescribed average stress") {
    PdfemProblem p;
    p.grid = StructuredGrid::unit(2, 12);
    p.physics = Physics::elastic;
    p.coef_mat = elements::elastic_D(1.0, 0.3, elements::ElasticModel::plane_strain);
    p.coef_inc = elements::elastic_D(10.0, 0.3, elements::ElasticModel::plane_strain);
    p.inclusion = gen_disk_mesh({0.5, 0.5, 0}, 0.3, 0.5 / 12);
    p.solver.tol = 1e-11;

    PdfemSystem sys(p);
    const LoadCase lc{BcKind::subc, {0.0, 1.0, 0.0}}; // sigma = [[0,0],[0,1]]
    const CaseSolution sol = sys.solve_case(lc);
    const auto stress = sys.average_flux(sol);
    CHECK(std::abs(stress[0] - 0.0) < 1e-8);
    CHECK(std::abs(stress[1] - 1.0) < 1e-8);
    CHECK(std::abs(stress[2] - 0.0) < 1e-8);
}

TEST_CASE("kubc average gradient reproduces the macro gradient") {
    PdfemSystem sys(disk_problem(10, 10.0));
    const CaseSolution sol = sys.solve_case({BcKind::kubc, {1.0, 0.0}});
    const auto g = sys.average_gradient(sol.u_full);
    CHECK(std::abs(g[0] - 1.0) < 1e-10);
    CHECK(std::abs(g[1]) < 1e-10);
}

TEST_CASE("average flux: homogeneous affine field, zero-contrast correction") {
    PdfemProblem p = disk_problem(8, 1.0);
    PdfemSystem sys(p);
    CaseSolution sol;
    sol.u_full.resize(p.grid.node_count());
    for (long i = 0; i < p.grid.node_count(); ++i) sol.u_full[i] = p.grid.node_position(i)[0];
    sol.v_inc = sys.substitution().apply(sol.u_full);
    const auto q = sys.average_flux(sol);
    CHECK(q[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(q[1]) < 1e-12);
}

TEST_CASE("periodic battery: homogeneous is exact, 2d runs three elastic cases") {
    PdfemProblem p;
    p.grid = StructuredGrid::unit(2, 5);
    p.physics = Physics::elastic;
    p.coef_mat = elements::elastic_D(1.0, 0.25, elements::ElasticModel::plane_strain);
    p.coef_inc = p.coef_mat;
    p.periodic = true;
    p.solver.tol = 1e-12;
    const auto res = run_periodic(p);
    CHECK(res.reports.size() == 3);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            CHECK(std::abs(res.tensor.matrix(i, j) - p.coef_mat(i, j)) < 1e-9);
}

TEST_CASE("periodic RVE with a wrapped fiber stays inside the mixture bounds") {
    PdfemProblem p;
    p.grid = StructuredGrid::unit(3, 8);
    p.physics = Physics::elastic;
    p.coef_mat = elements::elastic_D(1.0, 0.3, elements::ElasticModel::three_d);
    p.coef_inc = elements::elastic_D(100.0, 0.3, elements::ElasticModel::three_d);
    p.periodic = true;
    p.solver.tol = 1e-9;
    FiberSpec spec;
    for (int k = 0; k <= 6; ++k)
        spec.control_points.push_back({0.5, 0.5, -0.1 + 1.2 * k / 6.0});
    spec.radius = 0.12;
    spec.axial_subdivisions = 20;
    spec.circumferential_subdivisions = 14;
    spec.periodic_wrap = true;
    p.inclusion = gen_fiber_mesh(spec);

    const auto res = run_periodic(p);
    const auto [reuss, voigt] = voigt_reuss_bounds(res.tensor.volume_fraction, p.coef_mat, p.coef_inc);
    const auto bc = check_bounds(res.tensor.matrix, reuss, voigt);
    CHECK(bc.inside);
    CHECK(res.tensor.sym_error_rel() < 1e-6);
    // fiber along z: the 33 modulus must exceed the transverse ones
    CHECK(res.tensor.matrix(2, 2) > 1.2 * res.tensor.matrix(0, 0));
}

TEST_CASE("voigt/reuss closed forms") {
    const auto m1 = DenseMatrix::identity(2, 1.0);
    const auto m10 = DenseMatrix::identity(2, 10.0);

    const auto [r0, v0] = voigt_reuss_bounds(0.0, m1, m10);
    CHECK(r0(0, 0) == doctest::Approx(1.0));
    CHECK(v0(0, 0) == doctest::Approx(1.0));
    const auto [r1, v1] = voigt_reuss_bounds(1.0, m1, m10);
    CHECK(r1(0, 0) == doctest::Approx(10.0));
    CHECK(v1(0, 0) == doctest::Approx(10.0));

    const auto [reuss, voigt] = voigt_reuss_bounds(0.070686, m1, m10);
    CHECK(voigt(0, 0) == doctest::Approx(1.6362).epsilon(1e-4));
    CHECK(reuss(0, 0) == doctest::Approx(1.0679).epsilon(1e-4));

    CHECK_THROWS_AS(voigt_reuss_bounds(-0.1, m1, m10), ValidationError);
}

TEST_CASE("unit macro cases and macro validation") {
    const auto thermal = unit_macro_cases(Physics::thermal, 2, BcKind::kubc);
    CHECK(thermal.size() == 2);
    const auto elastic3d = unit_macro_cases(Physics::elastic, 3, BcKind::periodic);
    CHECK(elastic3d.size() == 6);

    PdfemSystem sys(disk_problem(6, 10.0));
    CHECK_THROWS_AS(sys.solve_case({BcKind::kubc, {1.0, 0.0, 0.0}}), ValidationError);
}

TEST_CASE("tensor serialization carries the matrix and metadata") {
    const auto res = run_kubc(disk_problem(8, 10.0));
    const std::string j = res.tensor.to_json();
    for (const char* key :
         {"physics", "bc", "matrix", "volume_fraction", "energy_crosscheck", "voigt_order"})
        CHECK(j.find(key) != std::string::npos);
    const std::string csv = res.tensor.to_csv();
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 2);
}

} // TEST_SUITE
