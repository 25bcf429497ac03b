#include <doctest.h>

#include "oracles.hpp"
#include "pdfem/solver.hpp"

using namespace pdfem;

namespace {

CsrMatrix identity_csr(int n) {
    CsrMatrix m;
    m.n_rows = m.n_cols = n;
    m.row_ptr.resize(n + 1);
    for (int i = 0; i < n; ++i) {
        m.row_ptr[i + 1] = i + 1;
        m.cols.push_back(i);
        m.vals.push_back(1.0);
    }
    return m;
}

CsrMatrix from_dense(const Eigen::MatrixXd& d) {
    CsrMatrix m;
    m.n_rows = static_cast<int>(d.rows());
    m.n_cols = static_cast<int>(d.cols());
    m.row_ptr.assign(m.n_rows + 1, 0);
    for (int r = 0; r < m.n_rows; ++r) {
        for (int c = 0; c < m.n_cols; ++c)
            if (d(r, c) != 0.0) {
                m.cols.push_back(c);
                m.vals.push_back(d(r, c));
            }
        m.row_ptr[r + 1] = static_cast<int>(m.cols.size());
    }
    return m;
}

} // namespace

TEST_SUITE("solver") {

TEST_CASE("dirichlet elimination: recovery, rhs update, errors") {
    const auto g = StructuredGrid::unit(2, 4);
    const DofMap dm = make_dofmap(g, Physics::thermal);
    const CsrMatrix k = assemble_Kmat(g, DenseMatrix::identity(2), dm);

    // all dofs constrained: empty system, recovery returns prescribed values
    DirichletBC all;
    for (int i = 0; i < k.n_rows; ++i) all.add(i, 0.5 * i);
    const std::vector<double> zero(k.n_rows, 0.0);
    const ReducedSystem sys = apply_dirichlet(k, zero, all);
    CHECK(sys.k.n_rows == 0);
    const auto full = sys.recover({});
    for (int i = 0; i < k.n_rows; ++i) CHECK(full[i] == 0.5 * i);

    DirichletBC bad;
    bad.add(9999, 0.0);
    CHECK_THROWS_AS(apply_dirichlet(k, zero, bad), ValidationError);
    DirichletBC dup;
    dup.add(3, 0.0);
    dup.add(3, 1.0);
    CHECK_THROWS_AS(apply_dirichlet(k, zero, dup), ValidationError);
}

TEST_CASE("kubc affine reproduction on a homogeneous grid") {
    const auto g = StructuredGrid::unit(2, 8);
    const DofMap dm = make_dofmap(g, Physics::thermal);
    const CsrMatrix k = assemble_Kmat(g, DenseMatrix::identity(2), dm);

    DirichletBC bc;
    for (long i = 0; i < g.node_count(); ++i)
        if (g.on_boundary_node(i)) bc.add(static_cast<int>(i), g.node_position(i)[0]);
    const std::vector<double> zero(k.n_rows, 0.0);
    const ReducedSystem sys = apply_dirichlet(k, zero, bc);
    const SolveResult r = solve_cg(sys.k, sys.rhs, {1e-12, 0, Preconditioner::ic0});
    REQUIRE(r.converged);
    const auto u = sys.recover(r.x);
    for (long i = 0; i < g.node_count(); ++i)
        CHECK(std::abs(u[i] - g.node_position(i)[0]) < 1e-10);
}

TEST_CASE("periodic dof map: idempotence and reduced counts") {
    const auto g2 = StructuredGrid::unit(2, 2);
    const DofMap t2 = periodic_dofmap(g2, Physics::thermal);
    CHECK(t2.dof_count() == 4);
    for (long i = 0; i < t2.n_nodes_full; ++i)
        CHECK(t2.node_master[t2.node_master[i]] == t2.node_master[i]);

    const DofMap e30 = periodic_dofmap(StructuredGrid::unit(3, 30), Physics::elastic);
    CHECK(e30.dof_count() == 81000);
    const DofMap e75 = periodic_dofmap(StructuredGrid::unit(3, 75), Physics::elastic);
    CHECK(e75.dof_count() == 1265625);
}

TEST_CASE("rigid pinning accepts balanced loads and rejects unbalanced ones") {
    const auto g = StructuredGrid::unit(2, 6);
    const DofMap dm = make_dofmap(g, Physics::thermal);

    // balanced: flux Q=(1,0) over the whole boundary integrates to zero
    NeumannSpec spec;
    spec.sides.push_back({0, false, {-1.0}});
    spec.sides.push_back({0, true, {1.0}});
    const auto load = assemble_load(g, nullptr, spec, dm);
    CHECK_NOTHROW(pin_rigid_modes(load, Physics::thermal, g));

    // unbalanced: flux only on one face
    NeumannSpec one_side;
    one_side.sides.push_back({0, true, {1.0}});
    const auto bad = assemble_load(g, nullptr, one_side, dm);
    CHECK_THROWS_AS(pin_rigid_modes(bad, Physics::thermal, g), EquilibriumError);
}

TEST_CASE("subc solve recenters to zero mean") {
    const auto g = StructuredGrid::unit(2, 6);
    const DofMap dm = make_dofmap(g, Physics::thermal);
    const CsrMatrix k = assemble_Kmat(g, DenseMatrix::identity(2), dm);
    NeumannSpec spec;
    spec.sides.push_back({0, false, {-1.0}});
    spec.sides.push_back({0, true, {1.0}});
    const auto load = assemble_load(g, nullptr, spec, dm);
    const DirichletBC pins = pin_rigid_modes(load, Physics::thermal, g);
    const ReducedSystem sys = apply_dirichlet(k, load, pins);
    const SolveResult r = solve_cg(sys.k, sys.rhs, {1e-12, 0, Preconditioner::ic0});
    REQUIRE(r.converged);
    auto u = sys.recover(r.x);

    std::vector<Vec3> pos(g.node_count());
    for (long i = 0; i < g.node_count(); ++i) pos[i] = g.node_position(i);
    remove_rigid_best_fit(u, Physics::thermal, pos, 2);
    double mean = 0;
    for (double v : u) mean += v;
    CHECK(std::abs(mean / u.size()) < 1e-12);
}

TEST_CASE("elastic 3d pinning removes exactly six dofs") {
    const auto g = StructuredGrid::unit(3, 3);
    const std::vector<double> zero(3 * g.node_count(), 0.0);
    const DirichletBC bc = pin_rigid_modes(zero, Physics::elastic, g);
    CHECK(bc.dofs.size() == 6);
}

TEST_CASE("cg: identity converges in one iteration, zero rhs in zero") {
    const CsrMatrix eye = identity_csr(50);
    auto gen = oracle::rng(51);
    const auto b = oracle::random_vector(gen, 50);
    const SolveResult r = solve_cg(eye, b, {1e-12, 0, Preconditioner::none});
    CHECK(r.converged);
    CHECK(r.report.iterations == 1);

    const std::vector<double> zero(50, 0.0);
    const SolveResult rz = solve_cg(eye, zero);
    CHECK(rz.converged);
    CHECK(rz.report.iterations == 0);
    for (double v : rz.x) CHECK(v == 0.0);
}

TEST_CASE("cg matches a dense direct oracle on a dirichlet grid problem") {
    const auto g = StructuredGrid::unit(2, 12);
    const DofMap dm = make_dofmap(g, Physics::thermal);
    const CsrMatrix k = assemble_Kmat(g, DenseMatrix::identity(2), dm);

    DirichletBC bc;
    for (long i = 0; i < g.node_count(); ++i)
        if (g.on_boundary_node(i)) {
            const Vec3 p = g.node_position(i);
            bc.add(static_cast<int>(i), p[0] * p[0] - p[1]);
        }
    std::vector<double> load(k.n_rows, 0.0);
    const ReducedSystem sys = apply_dirichlet(k, load, bc);

    for (auto pc : {Preconditioner::ic0, Preconditioner::jacobi, Preconditioner::none}) {
        const SolveResult r = solve_cg(sys.k, sys.rhs, {1e-11, 0, pc});
        REQUIRE(r.converged);
        const Eigen::MatrixXd kd = oracle::to_eigen(sys.k);
        Eigen::VectorXd bd(sys.rhs.size());
        for (size_t i = 0; i < sys.rhs.size(); ++i) bd(i) = sys.rhs[i];
        const Eigen::VectorXd xd = kd.ldlt().solve(bd);
        for (size_t i = 0; i < r.x.size(); ++i) CHECK(std::abs(r.x[i] - xd(i)) < 1e-8);
    }
}

TEST_CASE("ic0: exact for its own pattern, breakdown detected") {
    // diagonally dominant SPD: IC(0) on a full lower pattern is exact
    Eigen::MatrixXd d(3, 3);
    d << 4, 1, 0, 1, 5, 2, 0, 2, 6;
    const Ic0 f = ic0_factor(from_dense(d));
    REQUIRE(f.ok);
    std::vector<double> r{1, 2, 3}, z(3);
    f.apply(r, z);
    Eigen::VectorXd rd(3);
    rd << 1, 2, 3;
    const Eigen::VectorXd zd = d.llt().solve(rd);
    for (int i = 0; i < 3; ++i) CHECK(z[i] == doctest::Approx(zd(i)).epsilon(1e-12));

    // indefinite input breaks down
    Eigen::MatrixXd ind(2, 2);
    ind << 1, 2, 2, 1;
    CHECK_FALSE(ic0_factor(from_dense(ind)).ok);
}

TEST_CASE("ic0 breakdown falls back to the diagonal preconditioner") {
    // singular PSD with a zero diagonal entry; consistent rhs
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(3, 3);
    d(0, 0) = 2;
    d(1, 1) = 3;
    const CsrMatrix k = from_dense(d + Eigen::MatrixXd::Constant(3, 3, 0.0));
    std::vector<double> rhs{2, 3, 0};
    const SolveResult r = solve_cg(k, rhs, {1e-12, 100, Preconditioner::ic0});
    CHECK(r.report.fallback);
    CHECK(r.report.preconditioner == "ic0->jacobi");
    CHECK(r.converged);
    CHECK(r.x[0] == doctest::Approx(1.0));
    CHECK(r.x[1] == doctest::Approx(1.0));
}

TEST_CASE("non-convergence returns the best iterate and reports failure") {
    // ill-conditioned SPD with an iteration budget too small to converge
    const auto g = StructuredGrid::unit(2, 16);
    const DofMap dm = make_dofmap(g, Physics::thermal);
    const CsrMatrix k = assemble_Kmat(g, DenseMatrix::identity(2), dm);
    DirichletBC bc;
    bc.add(0, 0.0);
    std::vector<double> load(k.n_rows, 0.0);
    for (long i = 0; i < g.node_count(); ++i) load[i] = g.node_position(i)[0] - 0.5;
    double mean = 0;
    for (double v : load) mean += v;
    for (double& v : load) v -= mean / load.size();
    const ReducedSystem sys = apply_dirichlet(k, load, bc);
    const SolveResult r = solve_cg(sys.k, sys.rhs, {1e-14, 3, Preconditioner::none});
    CHECK_FALSE(r.converged);
    CHECK(r.report.iterations == 3);
    CHECK(r.report.rel_residual > 1e-14);
    CHECK(r.x.size() == sys.rhs.size());
}

TEST_CASE("solve report serializes the spec'd keys") {
    const CsrMatrix eye = identity_csr(4);
    const std::vector<double> b{1, 2, 3, 4};
    const SolveResult r = solve_cg(eye, b);
    const std::string j = r.report.to_json();
    for (const char* key : {"iterations", "residual", "seconds", "solver", "preconditioner"})
        CHECK(j.find(key) != std::string::npos);
}

} // TEST_SUITE
