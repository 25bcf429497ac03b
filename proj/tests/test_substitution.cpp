#include <doctest.h>

#include "oracles.hpp"
#include "pdfem/substitution.hpp"

using namespace pdfem;

namespace {

UnstructuredMesh point_cloud(const std::vector<Vec3>& pts, int dim) {
    UnstructuredMesh m;
    m.dim = dim;
    m.nodes = pts;
    return m;
}

} // namespace

TEST_SUITE("substitution") {

TEST_CASE("locate: centers, face tie-break, wrap, errors") {
    const auto g = StructuredGrid::unit(2, 3);

    const auto mid = locate(g, {0.5, 0.5, 0});
    CHECK(mid.cell[0] == 1);
    CHECK(mid.cell[1] == 1);
    CHECK(mid.ref[0] == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(mid.ref[1] == doctest::Approx(0.0).epsilon(1e-12));

    // interior grid line x = 1/3: higher cell, reference coordinate -1
    const auto tie = locate(g, {1.0 / 3.0, 0.5, 0});
    CHECK(tie.cell[0] == 1);
    CHECK(tie.ref[0] == doctest::Approx(-1.0));

    // upper boundary clamps to the last cell
    const auto top = locate(g, {1.0, 1.0, 0});
    CHECK(top.cell[0] == 2);
    CHECK(top.cell[1] == 2);
    CHECK(top.ref[0] == doctest::Approx(1.0));

    const auto wrapped = locate(g, {1.2, 0.5, 0}, true);
    const auto direct = locate(g, {0.2, 0.5, 0});
    CHECK(wrapped.cell[0] == direct.cell[0]);
    CHECK(wrapped.ref[0] == doctest::Approx(direct.ref[0]).epsilon(1e-12));

    CHECK_THROWS_AS(locate(g, {1.2, 0.5, 0}, false), LocationError);
    CHECK_THROWS_AS(locate(g, {0.5, -0.1, 0}, false), LocationError);
}

TEST_CASE("rows interpolate: unit row on a grid node, quarters at a cell center") {
    const auto g = StructuredGrid::unit(2, 3);
    const DofMap dm = make_dofmap(g, Physics::thermal);

    const auto s = build_substitution(
        g, point_cloud({{1.0 / 3.0, 1.0 / 3.0, 0}, {0.5, 0.5, 0}}, 2), dm);

    // first node coincides with grid node (1,1) = index 5: unit row
    // (the floor rule assigns it to cell (1,1), so corner weights land on 5)
    int unit_cols = 0;
    for (int k = s.scalar.row_ptr[0]; k < s.scalar.row_ptr[1]; ++k) {
        if (s.scalar.vals[k] > 0.5) {
            CHECK(s.scalar.cols[k] == 5);
            CHECK(s.scalar.vals[k] == doctest::Approx(1.0));
            ++unit_cols;
        } else {
            CHECK(std::abs(s.scalar.vals[k]) < 1e-14);
        }
    }
    CHECK(unit_cols == 1);

    // cell center: four quarters
    int quarters = 0;
    for (int k = s.scalar.row_ptr[1]; k < s.scalar.row_ptr[2]; ++k)
        if (s.scalar.vals[k] == doctest::Approx(0.25)) ++quarters;
    CHECK(quarters == 4);
}

TEST_CASE("one-element triangle on the 3x3 grid: middle-cell row pattern {5,6,9,10}") {
    const auto g = StructuredGrid::unit(2, 3);
    const DofMap dm = make_dofmap(g, Physics::thermal);
    // triangle with first node strictly inside the middle cell
    UnstructuredMesh tri;
    tri.dim = 2;
    tri.nodes = {{0.45, 0.52, 0}, {0.61, 0.44, 0}, {0.52, 0.61, 0}};
    tri.elements.push_back({ElementType::tri3, 2, {0, 1, 2}});

    const auto s = build_substitution(g, tri, dm);
    std::vector<int> cols;
    for (int k = s.scalar.row_ptr[0]; k < s.scalar.row_ptr[1]; ++k)
        cols.push_back(s.scalar.cols[k]);
    CHECK(cols == std::vector<int>{5, 6, 9, 10});
}

TEST_CASE("random points: row stochasticity and affine reproduction") {
    auto gen = oracle::rng(31);
    std::uniform_real_distribution<double> u(0.0, 1.0);

    struct Fixture {
        StructuredGrid grid;
        bool periodic;
    };
    const std::vector<Fixture> fixtures = {
        {StructuredGrid::unit(2, 7), false},
        {StructuredGrid::make(2, {5, 9, 1}, {-0.3, 0.2, 0}, {2.0, 0.7, 0}), false},
        {StructuredGrid::unit(3, 4), false},
        {StructuredGrid::make(3, {6, 5, 4}, {0, 0, 0}, {1, 1, 1}), true},
    };

    for (const auto& fx : fixtures) {
        const auto& g = fx.grid;
        std::vector<Vec3> pts(500);
        for (auto& p : pts) {
            for (int a = 0; a < g.dim(); ++a) {
                const double lo = fx.periodic ? -0.5 : 0.0;
                const double hi = fx.periodic ? 1.5 : 1.0;
                p[a] = g.origin()[a] + (lo + (hi - lo) * u(gen)) * g.side_lengths()[a];
            }
            if (g.dim() == 2) p[2] = 0;
        }
        const DofMap dm =
            fx.periodic ? periodic_dofmap(g, Physics::thermal) : make_dofmap(g, Physics::thermal);
        const auto s = build_substitution(g, point_cloud(pts, g.dim()), dm, fx.periodic);

        for (int r = 0; r < s.scalar.n_rows; ++r) {
            double sum = 0;
            int nnz = 0;
            for (int k = s.scalar.row_ptr[r]; k < s.scalar.row_ptr[r + 1]; ++k) {
                CHECK(s.scalar.vals[k] >= -1e-12);
                CHECK(s.scalar.vals[k] <= 1.0 + 1e-12);
                sum += s.scalar.vals[k];
                ++nnz;
            }
            CHECK(nnz <= (g.dim() == 2 ? 4 : 8));
            CHECK(std::abs(sum - 1.0) < 1e-12);
        }

        if (!fx.periodic) {
            // affine reproduction: S applied to nodal values of a(x) returns a(p)
            std::vector<double> a_nodes(g.node_count());
            const double c0 = 0.3, cx = 1.7, cy = -0.6, cz = 0.9;
            for (long i = 0; i < g.node_count(); ++i) {
                const Vec3 p = g.node_position(i);
                a_nodes[i] = c0 + cx * p[0] + cy * p[1] + (g.dim() == 3 ? cz * p[2] : 0.0);
            }
            const auto v = s.apply(a_nodes);
            for (size_t i = 0; i < pts.size(); ++i) {
                const double expect = c0 + cx * pts[i][0] + cy * pts[i][1] +
                                      (g.dim() == 3 ? cz * pts[i][2] : 0.0);
                CHECK(std::abs(v[i] - expect) < 1e-12);
            }
        }
    }
}

TEST_CASE("determinism: identical inputs give identical matrices") {
    auto gen = oracle::rng(32);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<Vec3> pts(100);
    for (auto& p : pts) p = {u(gen), u(gen), 0};
    const auto g = StructuredGrid::unit(2, 9);
    const DofMap dm = make_dofmap(g, Physics::thermal);
    const auto s1 = build_substitution(g, point_cloud(pts, 2), dm);
    const auto s2 = build_substitution(g, point_cloud(pts, 2), dm);
    CHECK(s1.scalar.cols == s2.scalar.cols);
    CHECK(s1.scalar.vals == s2.scalar.vals);
}

TEST_CASE("matching meshes produce a 0/1 selection matrix") {
    const auto g = StructuredGrid::unit(2, 20);
    const DofMap dm = make_dofmap(g, Physics::thermal);
    const auto square = gen_square_mesh({0.5, 0.5, 0}, 0.3, 0.05);
    const auto s = build_substitution(g, square, dm);
    for (double v : s.scalar.vals)
        CHECK((std::abs(v) < 1e-12 || std::abs(v - 1.0) < 1e-12));
    for (int r = 0; r < s.scalar.n_rows; ++r) {
        double sum = 0;
        for (int k = s.scalar.row_ptr[r]; k < s.scalar.row_ptr[r + 1]; ++k)
            sum += s.scalar.vals[k];
        CHECK(sum == doctest::Approx(1.0));
    }
}

TEST_CASE("elastic expansion applies the scalar map per component") {
    const auto g = StructuredGrid::unit(2, 4);
    const DofMap dm = make_dofmap(g, Physics::elastic);
    const auto s = build_substitution(g, point_cloud({{0.31, 0.77, 0}}, 2), dm);
    CHECK(s.dofs_per_node == 2);
    const CsrMatrix e = s.expanded();
    CHECK(e.n_rows == 2);
    CHECK(e.n_cols == 2 * g.node_count());
    // row 0 touches only even (x) columns, row 1 only odd
    for (int k = e.row_ptr[0]; k < e.row_ptr[1]; ++k) CHECK(e.cols[k] % 2 == 0);
    for (int k = e.row_ptr[1]; k < e.row_ptr[2]; ++k) CHECK(e.cols[k] % 2 == 1);
}

TEST_CASE("pixelization of the one-element triangle: enveloping flips with resolution") {
    UnstructuredMesh tri;
    tri.dim = 2;
    tri.nodes = {{0.35, 0.40, 0}, {0.62, 0.45, 0}, {0.50, 0.60, 0}};
    tri.elements.push_back({ElementType::tri3, 2, {0, 1, 2}});

    const auto g3 = StructuredGrid::unit(2, 3);
    const auto pix3 = pixelize(g3, tri);
    CHECK(pix3 == std::vector<long>{4}); // all three nodes in the middle cell
    const auto rep3 = check_enveloping(g3, tri, 500);
    CHECK(rep3.enveloping);

    const auto g6 = StructuredGrid::unit(2, 6);
    const auto rep6 = check_enveloping(g6, tri, 500);
    CHECK_FALSE(rep6.enveloping);
    CHECK(!rep6.gap_cells.empty());

    const UnstructuredMesh empty = point_cloud({}, 2);
    CHECK(pixelize(g3, empty).empty());
}

TEST_CASE("eta is the ratio of characteristic lengths") {
    const auto g = StructuredGrid::unit(2, 60);
    const auto disk = gen_disk_mesh({0.5, 0.5, 0}, 0.3, 1.0 / 120);
    const auto rep = check_enveloping(g, disk, 10);
    CHECK(rep.h_mat == doctest::Approx(1.0 / 60));
    CHECK(rep.eta == doctest::Approx((1.0 / 60) / rep.h_inc));
    CHECK(rep.eta >= 2.0); // generator guarantees h_inc <= target
    CHECK(rep.enveloping);

    CHECK_THROWS_AS(check_enveloping(g, disk, 0), ValidationError);
}

TEST_CASE("fine inclusion mesh on a convex inclusion is enveloping") {
    // brute-force oracle: exact disk-cell intersection on a coarse grid
    const auto g = StructuredGrid::unit(2, 8);
    const auto disk = gen_disk_mesh({0.5, 0.5, 0}, 0.4, 1.0 / 16 / 2);
    const auto rep = check_enveloping(g, disk, 50);
    CHECK(rep.enveloping);

    // oracle: any cell whose center lies inside the disk by more than
    // 1.5 h_inc contains a mesh node (node spacing <= h_inc) and must be
    // covered; exact circle-vs-cell geometry, no sampling
    std::set<long> covered(rep.covered_cells.begin(), rep.covered_cells.end());
    const double r = 0.2;
    for (long c = 0; c < g.cell_count(); ++c) {
        const Vec3 cc = g.cell_center(c);
        const double dx = cc[0] - 0.5, dy = cc[1] - 0.5;
        if (std::sqrt(dx * dx + dy * dy) < r - 1.5 * rep.h_inc) CHECK(covered.count(c) == 1);
    }
}

TEST_CASE("location failure names the offending node") {
    const auto g = StructuredGrid::unit(2, 4);
    const DofMap dm = make_dofmap(g, Physics::thermal);
    try {
        build_substitution(g, point_cloud({{0.5, 0.5, 0}, {2.5, 0.5, 0}}, 2), dm);
        FAIL("expected LocationError");
    } catch (const LocationError& e) {
        CHECK(std::string(e.what()).find("node 1") != std::string::npos);
    }
}

TEST_CASE("periodic columns refer to master dofs") {
    const auto g = StructuredGrid::unit(2, 4);
    const DofMap dm = periodic_dofmap(g, Physics::thermal);
    // point in the last cell: its right-face corners are slaves of column 0's
    const auto s =
        build_substitution(g, point_cloud({{0.99, 0.5, 0}}, 2), dm, true);
    for (int k = s.scalar.row_ptr[0]; k < s.scalar.row_ptr[1]; ++k)
        CHECK(s.scalar.cols[k] < dm.n_nodes_reduced);
    double sum = 0;
    for (int k = s.scalar.row_ptr[0]; k < s.scalar.row_ptr[1]; ++k) sum += s.scalar.vals[k];
    CHECK(sum == doctest::Approx(1.0));
}

} // TEST_SUITE
