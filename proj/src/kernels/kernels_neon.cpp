// NEON kernel variants for aarch64. NEON has no double-precision gather, so
// csr_spmv only vectorizes the value stream.

#include "pdfem/kernels.hpp"

#if defined(__aarch64__)
#include <arm_neon.h>

namespace pdfem::kernels::neon {

double dot(std::span<const double> x, std::span<const double> y) {
    const size_t n = x.size();
    float64x2_t acc0 = vdupq_n_f64(0.0);
    float64x2_t acc1 = vdupq_n_f64(0.0);
    size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        acc0 = vfmaq_f64(acc0, vld1q_f64(x.data() + i), vld1q_f64(y.data() + i));
        acc1 = vfmaq_f64(acc1, vld1q_f64(x.data() + i + 2), vld1q_f64(y.data() + i + 2));
    }
    double s = vaddvq_f64(acc0) + vaddvq_f64(acc1);
    for (; i < n; ++i) s += x[i] * y[i];
    return s;
}

void axpy(double a, std::span<const double> x, std::span<double> y) {
    const size_t n = x.size();
    const float64x2_t va = vdupq_n_f64(a);
    size_t i = 0;
    for (; i + 2 <= n; i += 2)
        vst1q_f64(y.data() + i, vfmaq_f64(vld1q_f64(y.data() + i), va, vld1q_f64(x.data() + i)));
    for (; i < n; ++i) y[i] += a * x[i];
}

void axpby(double a, std::span<const double> x, double b, std::span<double> y) {
    const size_t n = x.size();
    const float64x2_t va = vdupq_n_f64(a);
    const float64x2_t vb = vdupq_n_f64(b);
    size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        float64x2_t vy = vmulq_f64(vb, vld1q_f64(y.data() + i));
        vst1q_f64(y.data() + i, vfmaq_f64(vy, va, vld1q_f64(x.data() + i)));
    }
    for (; i < n; ++i) y[i] = a * x[i] + b * y[i];
}

void csr_spmv(int n_rows, const int* row_ptr, const int* cols, const double* vals,
              const double* x, double* y) {
    for (int r = 0; r < n_rows; ++r) {
        const int begin = row_ptr[r], end = row_ptr[r + 1];
        float64x2_t acc = vdupq_n_f64(0.0);
        int k = begin;
        for (; k + 2 <= end; k += 2) {
            const float64x2_t vx = {x[cols[k]], x[cols[k + 1]]};
            acc = vfmaq_f64(acc, vld1q_f64(vals + k), vx);
        }
        double s = vaddvq_f64(acc);
        for (; k < end; ++k) s += vals[k] * x[cols[k]];
        y[r] = s;
    }
}

} // namespace pdfem::kernels::neon

#endif // aarch64
