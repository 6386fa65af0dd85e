#include <cmath>
#include <doctest.h>

#include "feat/learn.hpp"
#include "feat/metrics.hpp"

using namespace feat;
using namespace feat::learn;

namespace {

void separable_blobs(SplitMix64& rng, std::size_t n, Matrix& X, std::vector<int>& y) {
    X = Matrix(n, 2);
    y.assign(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        const bool pos = i % 2 == 0;
        X(i, 0) = (pos ? 3.0 : -3.0) + rng.next_double() - 0.5;
        X(i, 1) = rng.next_double() - 0.5;
        y[i] = pos;
    }
}

}  // namespace

TEST_SUITE_BEGIN("learn_cv");

TEST_CASE("a one-cell grid returns that cell") {
    SplitMix64 rng(1);
    Matrix X;
    std::vector<int> y;
    separable_blobs(rng, 30, X, y);
    CvPlan plan;
    plan.folds = 3;
    plan.seed = 5;
    plan.grid["lambda"] = {1e-3};
    const auto r = grid_search_cv(X, y, ModelKind::logistic, plan);
    CHECK(r.cells.size() == 1);
    CHECK(r.best.at("lambda") == 1e-3);
    CHECK(r.best_f1 == doctest::Approx(1.0));
}

TEST_CASE("duplicate cells tie-break to the first enumeration") {
    SplitMix64 rng(2);
    Matrix X;
    std::vector<int> y;
    separable_blobs(rng, 24, X, y);
    CvPlan plan;
    plan.folds = 2;
    plan.seed = 9;
    plan.grid["lambda"] = {1e-3, 1e-3, 1e-3};  // identical cells
    const auto r = grid_search_cv(X, y, ModelKind::logistic, plan);
    REQUIRE(r.cells.size() == 3);
    CHECK(r.cells[0].mean_f1 == r.cells[1].mean_f1);
    CHECK(r.best.at("lambda") == r.cells[0].params.at("lambda"));
    CHECK(r.best_f1 == r.cells[0].mean_f1);
}

TEST_CASE("the degenerate cell loses on separable data") {
    SplitMix64 rng(3);
    Matrix X;
    std::vector<int> y;
    separable_blobs(rng, 36, X, y);
    CvPlan plan;
    plan.folds = 3;
    plan.seed = 4;
    plan.grid["lambda"] = {1e-4, 1e6};  // 1e6 crushes the weights to ~0
    const auto r = grid_search_cv(X, y, ModelKind::logistic, plan);
    CHECK(r.best.at("lambda") == 1e-4);

    // Direct CV recomputation oracle for the winning cell.
    CvPlan one;
    one.folds = 3;
    one.seed = 4;
    one.grid["lambda"] = {1e-4};
    const auto direct = grid_search_cv(X, y, ModelKind::logistic, one);
    CHECK(r.best_f1 == doctest::Approx(direct.best_f1));
    CHECK(r.cells[0].mean_f1 == doctest::Approx(direct.cells[0].mean_f1));
}

TEST_CASE("row-major enumeration over name-sorted parameters") {
    SplitMix64 rng(4);
    Matrix X;
    std::vector<int> y;
    separable_blobs(rng, 20, X, y);
    CvPlan plan;
    plan.folds = 2;
    plan.seed = 1;
    plan.grid["a_first"] = {1e-4, 1e-2};
    plan.grid["b_second"] = {10, 20, 30};
    const auto r = grid_search_cv(X, y, ModelKind::logistic, plan);
    REQUIRE(r.cells.size() == 6);
    // First parameter varies slowest.
    CHECK(r.cells[0].params.at("a_first") == 1e-4);
    CHECK(r.cells[0].params.at("b_second") == 10);
    CHECK(r.cells[1].params.at("b_second") == 20);
    CHECK(r.cells[3].params.at("a_first") == 1e-2);
}

TEST_CASE("stratified folds keep both classes in every fold") {
    // 9 positives, 21 negatives, 3 folds: every fold sees 3 positives.
    SplitMix64 rng(5);
    Matrix X(30, 1);
    std::vector<int> y(30);
    for (std::size_t i = 0; i < 30; ++i) {
        y[i] = i < 9;
        X(i, 0) = (y[i] ? 1.0 : -1.0) + rng.next_double() * 0.1;
    }
    CvPlan plan;
    plan.folds = 3;
    plan.seed = 77;
    plan.grid["lambda"] = {1e-3};
    // If any validation fold lacked a class, training on the rest could
    // throw SingleClass; a clean full run is the check.
    const auto r = grid_search_cv(X, y, ModelKind::logistic, plan);
    CHECK(r.best_f1 > 0.9);
}

TEST_CASE("folds beyond the minority count are rejected") {
    Matrix X(10, 1);
    std::vector<int> y(10, 0);
    y[0] = y[1] = 1;
    for (std::size_t i = 0; i < 10; ++i) X(i, 0) = static_cast<double>(i);
    CvPlan plan;
    plan.folds = 3;
    plan.grid["lambda"] = {1e-3};
    CHECK_THROWS_AS(grid_search_cv(X, y, ModelKind::logistic, plan), FeatError);
}

TEST_CASE("grid search is deterministic in the seed") {
    SplitMix64 rng(6);
    Matrix X(40, 2);
    std::vector<int> y(40);
    for (std::size_t i = 0; i < 40; ++i) {
        X(i, 0) = rng.next_double() * 2.0 - 1.0;
        X(i, 1) = rng.next_double() * 2.0 - 1.0;
        y[i] = X(i, 0) + 0.3 * X(i, 1) > 0.0;
    }
    const CvPlan plan = default_cv_plan(ModelKind::forest, 123);
    const auto a = grid_search_cv(X, y, ModelKind::forest, plan);
    const auto b = grid_search_cv(X, y, ModelKind::forest, plan);
    REQUIRE(a.cells.size() == b.cells.size());
    for (std::size_t i = 0; i < a.cells.size(); ++i)
        CHECK(a.cells[i].mean_f1 == b.cells[i].mean_f1);
}

TEST_CASE("leave-one-group-out: single-row groups on separable data") {
    SplitMix64 rng(7);
    Matrix X;
    std::vector<int> y;
    separable_blobs(rng, 12, X, y);
    std::vector<std::string> groups;
    for (std::size_t i = 0; i < 12; ++i) groups.push_back("g" + std::to_string(i));
    const auto r = leave_one_group_out(X, y, groups, ModelKind::logistic, {1e-3, 500, 1e-8},
                                       {}, {});
    CHECK(r.accuracy == 1.0);
    CHECK(r.groups.size() == 12);
}

TEST_CASE("random labels score near chance over 20 groups") {
    SplitMix64 rng(8);
    const std::size_t n = 200;
    Matrix X(n, 4);
    std::vector<int> y(n);
    std::vector<std::string> groups(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t c = 0; c < 4; ++c) X(i, c) = rng.next_double();
        y[i] = rng.next_below(2) != 0;  // independent of features
        groups[i] = "clip" + std::to_string(i % 20);
    }
    const auto r = leave_one_group_out(X, y, groups, ModelKind::logistic, {1e-2, 200, 1e-7},
                                       {}, {});
    // Binomial 3 sigma around 0.5 for n = 200.
    const double sigma = std::sqrt(0.25 / static_cast<double>(n));
    CHECK(std::abs(r.accuracy - 0.5) <= 3.0 * sigma + 1e-12);
}

TEST_CASE("a single group is rejected") {
    Matrix X(4, 1);
    const std::vector<int> y = {0, 1, 0, 1};
    const std::vector<std::string> groups(4, "only");
    CHECK_THROWS_AS(
        leave_one_group_out(X, y, groups, ModelKind::logistic, {}, {}, {}), FeatError);
}

TEST_SUITE_END();
