#include <doctest.h>

#include "oracles.hpp"
#include "pdfem/kernels.hpp"
#include "pdfem/sparse.hpp"

using namespace pdfem;

namespace {

// random CSR with a deterministic pattern, some rows empty
CsrMatrix random_csr(std::mt19937_64& gen, int rows, int cols, double density) {
    std::uniform_real_distribution<double> val(-2.0, 2.0);
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    CsrMatrix m;
    m.n_rows = rows;
    m.n_cols = cols;
    m.row_ptr.assign(rows + 1, 0);
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c)
            if (coin(gen) < density) {
                m.cols.push_back(c);
                m.vals.push_back(val(gen));
            }
        m.row_ptr[r + 1] = static_cast<int>(m.cols.size());
    }
    return m;
}

struct IsaGuard {
    kernels::Isa saved = kernels::active_isa();
    ~IsaGuard() { kernels::set_isa(saved); }
};

} // namespace

TEST_SUITE("kernels") {

TEST_CASE("dispatched kernels match scalar references on random data") {
    auto gen = oracle::rng(1);
    // sizes straddle the vector width remainder paths
    for (size_t n : {0, 1, 3, 4, 7, 8, 9, 100, 1023, 4096}) {
        const auto x = oracle::random_vector(gen, n);
        const auto y = oracle::random_vector(gen, n);

        const double d_ref = kernels::ref::dot(x, y);
        const double d_simd = kernels::dot(x, y);
        CHECK(std::abs(d_ref - d_simd) <= 1e-12 * std::max(1.0, std::abs(d_ref)) * (1 + n / 64.0));

        auto y1 = y, y2 = y;
        kernels::ref::axpy(0.37, x, y1);
        kernels::axpy(0.37, x, y2);
        for (size_t i = 0; i < n; ++i) CHECK(y1[i] == doctest::Approx(y2[i]).epsilon(1e-14));

        auto z1 = y, z2 = y;
        kernels::ref::axpby(-1.3, x, 0.21, z1);
        kernels::axpby(-1.3, x, 0.21, z2);
        for (size_t i = 0; i < n; ++i) CHECK(z1[i] == doctest::Approx(z2[i]).epsilon(1e-14));
    }
}

TEST_CASE("spmv variants agree on random sparse matrices") {
    auto gen = oracle::rng(2);
    for (int trial = 0; trial < 5; ++trial) {
        const CsrMatrix m = random_csr(gen, 117 + trial * 31, 95 + trial * 17, 0.08);
        const auto x = oracle::random_vector(gen, m.n_cols);
        std::vector<double> y_ref(m.n_rows), y_simd(m.n_rows);
        kernels::ref::csr_spmv(m.n_rows, m.row_ptr.data(), m.cols.data(), m.vals.data(), x.data(),
                               y_ref.data());
        kernels::csr_spmv(m.n_rows, m.row_ptr.data(), m.cols.data(), m.vals.data(), x.data(),
                          y_simd.data());
        for (int r = 0; r < m.n_rows; ++r)
            CHECK(std::abs(y_ref[r] - y_simd[r]) <= 1e-12 * (1.0 + std::abs(y_ref[r])));
    }
}

TEST_CASE("every supported isa can be forced and produces the same results") {
    IsaGuard guard;
    auto gen = oracle::rng(3);
    const auto x = oracle::random_vector(gen, 513);
    const auto y = oracle::random_vector(gen, 513);

    std::vector<kernels::Isa> isas{kernels::Isa::scalar};
    if (kernels::cpu_supports(kernels::Isa::avx2)) isas.push_back(kernels::Isa::avx2);
    if (kernels::cpu_supports(kernels::Isa::neon)) isas.push_back(kernels::Isa::neon);

    std::vector<double> dots;
    for (auto isa : isas) {
        kernels::set_isa(isa);
        CHECK(kernels::active_isa() == isa);
        dots.push_back(kernels::dot(x, y));
    }
    for (size_t i = 1; i < dots.size(); ++i)
        CHECK(std::abs(dots[i] - dots[0]) <= 1e-11 * std::max(1.0, std::abs(dots[0])));

    CHECK_THROWS_AS(kernels::set_isa(kernels::cpu_supports(kernels::Isa::avx2)
                                         ? kernels::Isa::neon
                                         : kernels::Isa::avx2),
                    ValidationError);
}

TEST_CASE("nrm2 is the square root of the self dot product") {
    auto gen = oracle::rng(4);
    const auto x = oracle::random_vector(gen, 777);
    CHECK(kernels::nrm2(x) ==
          doctest::Approx(std::sqrt(kernels::ref::dot(x, x))).epsilon(1e-13));
}

} // TEST_SUITE
