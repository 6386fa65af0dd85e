#include <cmath>
#include <doctest.h>
#include <vector>

#include "feat/common.hpp"
#include "feat/simd.hpp"

using namespace feat;

namespace {

std::vector<double> random_vec(SplitMix64& rng, std::size_t n) {
    std::vector<double> v(n);
    for (double& x : v) x = rng.next_double() * 4.0 - 2.0;
    return v;
}

}  // namespace

TEST_SUITE_BEGIN("simd");

TEST_CASE("scalar backend is always available") {
    CHECK(simd::backend_available(simd::Backend::scalar));
}

TEST_CASE("simd backends agree with scalar on every kernel") {
    std::vector<simd::Backend> others;
    for (auto b : {simd::Backend::avx2, simd::Backend::neon})
        if (simd::backend_available(b)) others.push_back(b);
    if (others.empty()) return;  // scalar-only machine; nothing to compare

    SplitMix64 rng(0xfeed5eedULL);
    const simd::Backend before = simd::active_backend();
    // Sizes straddling the vector width, including 0, 1 and odd tails.
    for (std::size_t n : {0, 1, 2, 3, 4, 5, 7, 8, 9, 15, 16, 17, 31, 64, 257, 1000}) {
        const auto a = random_vec(rng, n);
        const auto b = random_vec(rng, n);
        const double alpha = rng.next_double() * 2.0 - 1.0;
        const double tol = 1e-13 * (1.0 + static_cast<double>(n));

        REQUIRE(simd::set_backend(simd::Backend::scalar));
        const double dot_ref = simd::dot(a.data(), b.data(), n);
        const double sum_ref = simd::sum(a.data(), n);
        const double sumsq_ref = simd::sumsq(a.data(), n);
        std::vector<double> axpy_ref = b, sub_ref(n), add_ref(n), mag_ref(n), scale_ref = a;
        simd::axpy(alpha, a.data(), axpy_ref.data(), n);
        simd::vsub(a.data(), b.data(), sub_ref.data(), n);
        simd::vadd(a.data(), b.data(), add_ref.data(), n);
        simd::vmag(a.data(), b.data(), mag_ref.data(), n);
        simd::scale(scale_ref.data(), alpha, n);

        for (auto backend : others) {
            CAPTURE(simd::backend_name(backend));
            CAPTURE(n);
            REQUIRE(simd::set_backend(backend));
            CHECK(simd::dot(a.data(), b.data(), n) == doctest::Approx(dot_ref).epsilon(tol));
            CHECK(simd::sum(a.data(), n) == doctest::Approx(sum_ref).epsilon(tol));
            CHECK(simd::sumsq(a.data(), n) == doctest::Approx(sumsq_ref).epsilon(tol));

            std::vector<double> axpy_v = b, sub_v(n), add_v(n), mag_v(n), scale_v = a;
            simd::axpy(alpha, a.data(), axpy_v.data(), n);
            simd::vsub(a.data(), b.data(), sub_v.data(), n);
            simd::vadd(a.data(), b.data(), add_v.data(), n);
            simd::vmag(a.data(), b.data(), mag_v.data(), n);
            simd::scale(scale_v.data(), alpha, n);
            for (std::size_t i = 0; i < n; ++i) {
                CHECK(axpy_v[i] == doctest::Approx(axpy_ref[i]).epsilon(1e-14));
                CHECK(sub_v[i] == sub_ref[i]);
                CHECK(add_v[i] == add_ref[i]);
                CHECK(mag_v[i] == doctest::Approx(mag_ref[i]).epsilon(1e-14));
                CHECK(scale_v[i] == doctest::Approx(scale_ref[i]).epsilon(1e-14));
            }
        }
    }
    simd::set_backend(before);
}

TEST_CASE("matvec matches per-row dot products") {
    SplitMix64 rng(7);
    const std::size_t rows = 13, cols = 37;
    const auto A = random_vec(rng, rows * cols);
    const auto x = random_vec(rng, cols);
    std::vector<double> y(rows);
    simd::matvec(A.data(), rows, cols, x.data(), y.data());
    for (std::size_t r = 0; r < rows; ++r) {
        double expect = 0.0;
        for (std::size_t c = 0; c < cols; ++c) expect += A[r * cols + c] * x[c];
        CHECK(y[r] == doctest::Approx(expect).epsilon(1e-12));
    }
}

TEST_SUITE_END();
