// Runtime kernel dispatch. The instruction set is resolved once (from CPU
// capabilities and the PDFEM_SIMD environment variable) and can be overridden
// by tests through set_isa().

#include "pdfem/kernels.hpp"

#include <cmath>
#include <cstdlib>
#include <cstring>

#include "pdfem/common.hpp"

#if defined(__x86_64__) || defined(_M_X64)
namespace pdfem::kernels::avx2 {
double dot(std::span<const double>, std::span<const double>);
void axpy(double, std::span<const double>, std::span<double>);
void axpby(double, std::span<const double>, double, std::span<double>);
void csr_spmv(int, const int*, const int*, const double*, const double*, double*);
} // namespace pdfem::kernels::avx2
#endif

#if defined(__aarch64__)
namespace pdfem::kernels::neon {
double dot(std::span<const double>, std::span<const double>);
void axpy(double, std::span<const double>, std::span<double>);
void axpby(double, std::span<const double>, double, std::span<double>);
void csr_spmv(int, const int*, const int*, const double*, const double*, double*);
} // namespace pdfem::kernels::neon
#endif

namespace pdfem::kernels {

namespace {

struct Vtable {
    double (*dot)(std::span<const double>, std::span<const double>);
    void (*axpy)(double, std::span<const double>, std::span<double>);
    void (*axpby)(double, std::span<const double>, double, std::span<double>);
    void (*spmv)(int, const int*, const int*, const double*, const double*, double*);
};

constexpr Vtable kScalar{ref::dot, ref::axpy, ref::axpby, ref::csr_spmv};

Vtable vtable_for(Isa isa) {
    switch (isa) {
#if defined(__x86_64__) || defined(_M_X64)
        case Isa::avx2:
            return {avx2::dot, avx2::axpy, avx2::axpby, avx2::csr_spmv};
#endif
#if defined(__aarch64__)
        case Isa::neon:
            return {neon::dot, neon::axpy, neon::axpby, neon::csr_spmv};
#endif
        default:
            return kScalar;
    }
}

Isa detect() {
    const char* env = std::getenv("PDFEM_SIMD");
    if (env && std::strcmp(env, "scalar") == 0) return Isa::scalar;
#if defined(__x86_64__) || defined(_M_X64)
    if (env && std::strcmp(env, "avx2") == 0 && cpu_supports(Isa::avx2)) return Isa::avx2;
    if ((!env || std::strcmp(env, "auto") == 0) && cpu_supports(Isa::avx2)) return Isa::avx2;
#endif
#if defined(__aarch64__)
    if (!env || std::strcmp(env, "auto") == 0 || std::strcmp(env, "neon") == 0) return Isa::neon;
#endif
    return Isa::scalar;
}

Isa g_isa = detect();
Vtable g_vt = vtable_for(g_isa);

} // namespace

bool cpu_supports(Isa isa) {
    switch (isa) {
        case Isa::scalar:
            return true;
        case Isa::avx2:
#if defined(__x86_64__) || defined(_M_X64)
            return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
            return false;
#endif
        case Isa::neon:
#if defined(__aarch64__)
            return true;
#else
            return false;
#endif
    }
    return false;
}

const char* isa_name(Isa isa) {
    switch (isa) {
        case Isa::scalar: return "scalar";
        case Isa::avx2: return "avx2";
        case Isa::neon: return "neon";
    }
    return "?";
}

Isa active_isa() { return g_isa; }

void set_isa(Isa isa) {
    if (!cpu_supports(isa))
        throw ValidationError(std::string("kernels: CPU does not support ") + isa_name(isa));
    g_isa = isa;
    g_vt = vtable_for(isa);
}

double dot(std::span<const double> x, std::span<const double> y) { return g_vt.dot(x, y); }

double nrm2(std::span<const double> x) { return std::sqrt(g_vt.dot(x, x)); }

void axpy(double a, std::span<const double> x, std::span<double> y) { g_vt.axpy(a, x, y); }

void axpby(double a, std::span<const double> x, double b, std::span<double> y) {
    g_vt.axpby(a, x, b, y);
}

void csr_spmv(int n_rows, const int* row_ptr, const int* cols, const double* vals,
              const double* x, double* y) {
    g_vt.spmv(n_rows, row_ptr, cols, vals, x, y);
}

} // namespace pdfem::kernels
