#pragma once

#include <cstddef>
#include <span>
#include <string>

namespace pdfem::kernels {

// Vector and sparse matrix-vector primitives behind the solver's inner loops.
// A scalar reference implementation always exists; AVX2 (x86-64) and NEON
// (aarch64) variants are selected once at runtime from CPU capabilities.
// The PDFEM_SIMD environment variable ("scalar", "avx2", "neon", "auto")
// or set_isa() override the selection; tests compare the variants pairwise.

enum class Isa { scalar, avx2, neon };

const char* isa_name(Isa isa);

/// Instruction set the dispatched kernels currently use.
Isa active_isa();

/// Force a specific instruction set. Throws ValidationError if the CPU
/// does not support it.
void set_isa(Isa isa);

double dot(std::span<const double> x, std::span<const double> y);
double nrm2(std::span<const double> x);

/// y += a*x
void axpy(double a, std::span<const double> x, std::span<double> y);

/// y = a*x + b*y
void axpby(double a, std::span<const double> x, double b, std::span<double> y);

/// y = A x for a CSR matrix with int32 column indices.
void csr_spmv(int n_rows, const int* row_ptr, const int* cols, const double* vals,
              const double* x, double* y);

// Reference kernels, always scalar. The dispatched versions above are
// equivalence-tested against these.
namespace ref {
double dot(std::span<const double> x, std::span<const double> y);
void axpy(double a, std::span<const double> x, std::span<double> y);
void axpby(double a, std::span<const double> x, double b, std::span<double> y);
void csr_spmv(int n_rows, const int* row_ptr, const int* cols, const double* vals,
              const double* x, double* y);
} // namespace ref

bool cpu_supports(Isa isa);

} // namespace pdfem::kernels
