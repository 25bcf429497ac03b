#include <doctest.h>

#include <sstream>

#include "oracles.hpp"
#include "pdfem/sparse.hpp"

using namespace pdfem;

namespace {

CsrMatrix dense_to_csr(const Eigen::MatrixXd& m) {
    CsrMatrix a;
    a.n_rows = static_cast<int>(m.rows());
    a.n_cols = static_cast<int>(m.cols());
    a.row_ptr.assign(a.n_rows + 1, 0);
    for (int r = 0; r < a.n_rows; ++r) {
        for (int c = 0; c < a.n_cols; ++c)
            if (m(r, c) != 0.0) {
                a.cols.push_back(c);
                a.vals.push_back(m(r, c));
            }
        a.row_ptr[r + 1] = static_cast<int>(a.cols.size());
    }
    return a;
}

Eigen::MatrixXd random_sparse_dense(std::mt19937_64& gen, int rows, int cols, double density) {
    std::uniform_real_distribution<double> val(-1.0, 1.0);
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(rows, cols);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c)
            if (coin(gen) < density) m(r, c) = val(gen);
    return m;
}

} // namespace

TEST_SUITE("sparse") {

TEST_CASE("transpose, multiply, add match dense oracles") {
    auto gen = oracle::rng(21);
    for (int trial = 0; trial < 4; ++trial) {
        const auto da = random_sparse_dense(gen, 23 + trial, 31, 0.15);
        const auto db = random_sparse_dense(gen, 31, 17 + trial, 0.15);
        const CsrMatrix a = dense_to_csr(da), b = dense_to_csr(db);

        const Eigen::MatrixXd t = oracle::to_eigen(csr_transpose(a));
        CHECK((t - da.transpose()).cwiseAbs().maxCoeff() == 0.0);

        const Eigen::MatrixXd p = oracle::to_eigen(csr_multiply(a, b));
        CHECK((p - da * db).cwiseAbs().maxCoeff() < 1e-13);

        const auto da2 = random_sparse_dense(gen, 23 + trial, 31, 0.15);
        const Eigen::MatrixXd s = oracle::to_eigen(csr_add(a, dense_to_csr(da2)));
        CHECK((s - (da + da2)).cwiseAbs().maxCoeff() < 1e-14);
    }
}

TEST_CASE("galerkin triple product is symmetric and matches dense") {
    auto gen = oracle::rng(22);
    const auto ds = random_sparse_dense(gen, 40, 25, 0.1);
    Eigen::MatrixXd dk = random_sparse_dense(gen, 40, 40, 0.1);
    dk = Eigen::MatrixXd(0.5 * (dk + dk.transpose()));

    const CsrMatrix r = galerkin_triple_product(dense_to_csr(ds), dense_to_csr(dk));
    CHECK(r.sym_error() == 0.0);
    const Eigen::MatrixXd expect = ds.transpose() * dk * ds;
    CHECK((oracle::to_eigen(r) - expect).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("matrix market round trip") {
    auto gen = oracle::rng(23);
    const CsrMatrix a = dense_to_csr(random_sparse_dense(gen, 12, 9, 0.3));
    std::ostringstream out;
    write_matrix_market(out, a);
    std::istringstream in(out.str());
    const CsrMatrix b = read_matrix_market(in);
    REQUIRE(b.n_rows == a.n_rows);
    REQUIRE(b.n_cols == a.n_cols);
    REQUIRE(b.nnz() == a.nnz());
    for (size_t k = 0; k < a.vals.size(); ++k) {
        CHECK(b.cols[k] == a.cols[k]);
        CHECK(b.vals[k] == a.vals[k]);
    }
}

TEST_CASE("pattern lookups") {
    PatternBuilder pb(3, 3);
    pb.add(0, 2);
    pb.add(0, 0);
    pb.add(0, 2); // duplicate collapses
    pb.add(2, 1);
    CsrMatrix m = pb.freeze();
    CHECK(m.nnz() == 3);
    m.at(0, 2) += 1.5;
    CHECK(m.get(0, 2) == 1.5);
    CHECK(m.get(1, 1) == 0.0);
    CHECK_THROWS_AS(m.at(1, 1), ValidationError);
}

} // TEST_SUITE
