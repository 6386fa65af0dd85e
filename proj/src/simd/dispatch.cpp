#include "feat/simd.hpp"

namespace feat::simd {
namespace {

bool cpu_has(Backend b) {
    switch (b) {
        case Backend::scalar:
            return true;
        case Backend::avx2:
#if defined(FEAT_HAVE_AVX2)
            return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
            return false;
#endif
        case Backend::neon:
#if defined(__aarch64__)
            return true;  // NEON is baseline on aarch64
#else
            return false;
#endif
    }
    return false;
}

const KernelTable& table_for(Backend b) {
#if defined(FEAT_HAVE_AVX2)
    if (b == Backend::avx2) return detail::avx2_table();
#endif
#if defined(__aarch64__)
    if (b == Backend::neon) return detail::neon_table();
#endif
    (void)b;
    return detail::scalar_table();
}

Backend pick_default() {
    if (cpu_has(Backend::avx2)) return Backend::avx2;
    if (cpu_has(Backend::neon)) return Backend::neon;
    return Backend::scalar;
}

struct State {
    Backend backend;
    const KernelTable* table;
    State() : backend(pick_default()), table(&table_for(backend)) {}
};

State& state() {
    static State s;
    return s;
}

}  // namespace

const char* backend_name(Backend b) {
    switch (b) {
        case Backend::scalar: return "scalar";
        case Backend::avx2: return "avx2";
        case Backend::neon: return "neon";
    }
    return "?";
}

Backend active_backend() { return state().backend; }

bool backend_available(Backend b) { return cpu_has(b); }

bool set_backend(Backend b) {
    if (!cpu_has(b)) return false;
    state().backend = b;
    state().table = &table_for(b);
    return true;
}

double dot(const double* a, const double* b, std::size_t n) { return state().table->dot(a, b, n); }
double sum(const double* x, std::size_t n) { return state().table->sum(x, n); }
double sumsq(const double* x, std::size_t n) { return state().table->sumsq(x, n); }
void axpy(double alpha, const double* x, double* y, std::size_t n) { state().table->axpy(alpha, x, y, n); }
void scale(double* x, double alpha, std::size_t n) { state().table->scale(x, alpha, n); }
void vsub(const double* a, const double* b, double* out, std::size_t n) { state().table->vsub(a, b, out, n); }
void vadd(const double* a, const double* b, double* out, std::size_t n) { state().table->vadd(a, b, out, n); }
void vmag(const double* a, const double* b, double* out, std::size_t n) { state().table->vmag(a, b, out, n); }

void matvec(const double* A, std::size_t rows, std::size_t cols, const double* x, double* y) {
    for (std::size_t r = 0; r < rows; ++r) y[r] = dot(A + r * cols, x, cols);
}

}  // namespace feat::simd
