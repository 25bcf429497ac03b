#include "pdfem/kernels.hpp"

namespace pdfem::kernels::ref {

double dot(std::span<const double> x, std::span<const double> y) {
    double s = 0.0;
    for (size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
    return s;
}

void axpy(double a, std::span<const double> x, std::span<double> y) {
    for (size_t i = 0; i < x.size(); ++i) y[i] += a * x[i];
}

void axpby(double a, std::span<const double> x, double b, std::span<double> y) {
    for (size_t i = 0; i < x.size(); ++i) y[i] = a * x[i] + b * y[i];
}

void csr_spmv(int n_rows, const int* row_ptr, const int* cols, const double* vals,
              const double* x, double* y) {
    for (int r = 0; r < n_rows; ++r) {
        double s = 0.0;
        for (int k = row_ptr[r]; k < row_ptr[r + 1]; ++k) s += vals[k] * x[cols[k]];
        y[r] = s;
    }
}

} // namespace pdfem::kernels::ref
