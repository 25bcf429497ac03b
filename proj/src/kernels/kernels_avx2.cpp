// AVX2+FMA kernel variants. This translation unit is compiled without global
// -mavx2 so the binary stays runnable on older CPUs; each function carries a
// target attribute and is only reachable through the runtime dispatcher.

#include "pdfem/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)
#include <immintrin.h>

#define PDFEM_AVX2 __attribute__((target("avx2,fma")))

namespace pdfem::kernels::avx2 {

PDFEM_AVX2 static double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(lo, _mm_unpackhi_pd(lo, lo)));
}

PDFEM_AVX2 double dot(std::span<const double> x, std::span<const double> y) {
    const size_t n = x.size();
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x.data() + i), _mm256_loadu_pd(y.data() + i), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(x.data() + i + 4), _mm256_loadu_pd(y.data() + i + 4), acc1);
    }
    double s = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) s += x[i] * y[i];
    return s;
}

PDFEM_AVX2 void axpy(double a, std::span<const double> x, std::span<double> y) {
    const size_t n = x.size();
    const __m256d va = _mm256_set1_pd(a);
    size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d vy = _mm256_loadu_pd(y.data() + i);
        vy = _mm256_fmadd_pd(va, _mm256_loadu_pd(x.data() + i), vy);
        _mm256_storeu_pd(y.data() + i, vy);
    }
    for (; i < n; ++i) y[i] += a * x[i];
}

PDFEM_AVX2 void axpby(double a, std::span<const double> x, double b, std::span<double> y) {
    const size_t n = x.size();
    const __m256d va = _mm256_set1_pd(a);
    const __m256d vb = _mm256_set1_pd(b);
    size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d vy = _mm256_mul_pd(vb, _mm256_loadu_pd(y.data() + i));
        vy = _mm256_fmadd_pd(va, _mm256_loadu_pd(x.data() + i), vy);
        _mm256_storeu_pd(y.data() + i, vy);
    }
    for (; i < n; ++i) y[i] = a * x[i] + b * y[i];
}

PDFEM_AVX2 void csr_spmv(int n_rows, const int* row_ptr, const int* cols, const double* vals,
                         const double* x, double* y) {
    for (int r = 0; r < n_rows; ++r) {
        const int begin = row_ptr[r], end = row_ptr[r + 1];
        __m256d acc = _mm256_setzero_pd();
        int k = begin;
        for (; k + 4 <= end; k += 4) {
            const __m128i idx = _mm_loadu_si128(reinterpret_cast<const __m128i*>(cols + k));
            const __m256d vx = _mm256_i32gather_pd(x, idx, 8);
            acc = _mm256_fmadd_pd(_mm256_loadu_pd(vals + k), vx, acc);
        }
        double s = hsum(acc);
        for (; k < end; ++k) s += vals[k] * x[cols[k]];
        y[r] = s;
    }
}

} // namespace pdfem::kernels::avx2

#endif // x86-64
