#pragma once

#include <cstddef>

// Arithmetic kernels behind the numeric hot loops (HOG block normalization,
// PCA projection, linear-model training/prediction, PLS deflation).
// Each kernel has a scalar reference implementation plus SIMD variants
// (AVX2+FMA on x86-64, NEON on aarch64) selected once at startup from CPU
// features. Tests force each backend and compare against scalar.

namespace feat::simd {

enum class Backend { scalar, avx2, neon };

const char* backend_name(Backend b);

/// Backend chosen by dispatch (or forced by set_backend).
Backend active_backend();

/// Force a backend; returns false (and leaves dispatch unchanged) when the
/// requested backend is not compiled in or not supported by this CPU.
bool set_backend(Backend b);

/// Backends usable on this machine.
bool backend_available(Backend b);

double dot(const double* a, const double* b, std::size_t n);
double sum(const double* x, std::size_t n);
double sumsq(const double* x, std::size_t n);
/// y += alpha * x
void axpy(double alpha, const double* x, double* y, std::size_t n);
void scale(double* x, double alpha, std::size_t n);
/// out = a - b
void vsub(const double* a, const double* b, double* out, std::size_t n);
/// out = a + b
void vadd(const double* a, const double* b, double* out, std::size_t n);
/// out[i] = sqrt(a[i]^2 + b[i]^2)
void vmag(const double* a, const double* b, double* out, std::size_t n);
/// y = A x for row-major A (rows x cols)
void matvec(const double* A, std::size_t rows, std::size_t cols, const double* x, double* y);

/// One kernel table per backend; dispatch.cpp owns the selection.
struct KernelTable {
    double (*dot)(const double*, const double*, std::size_t);
    double (*sum)(const double*, std::size_t);
    double (*sumsq)(const double*, std::size_t);
    void (*axpy)(double, const double*, double*, std::size_t);
    void (*scale)(double*, double, std::size_t);
    void (*vsub)(const double*, const double*, double*, std::size_t);
    void (*vadd)(const double*, const double*, double*, std::size_t);
    void (*vmag)(const double*, const double*, double*, std::size_t);
};

namespace detail {
const KernelTable& scalar_table();
#if defined(FEAT_HAVE_AVX2)
const KernelTable& avx2_table();
#endif
#if defined(__aarch64__)
const KernelTable& neon_table();
#endif
}  // namespace detail

}  // namespace feat::simd
