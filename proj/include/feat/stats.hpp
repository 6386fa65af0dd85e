#pragma once

#include <span>
#include <vector>

#include "feat/common.hpp"

namespace feat::stats {

struct TTestResult {
    double t = 0.0;
    double df = 0.0;
    double p = 1.0;            // two-sided
    std::size_t dropped = 0;   // NaN samples removed before testing
};

/// Independent two-sample t-test, pooled variance by default (df = n1+n2-2);
/// Welch's correction behind the flag. NaNs are dropped per group.
TTestResult ttest_ind(std::span<const double> a, std::span<const double> b, bool welch = false);

/// Two-sided p-value of the Student-t distribution via the regularized
/// incomplete beta function.
double student_t_two_sided_p(double t, double df);

/// Regularized incomplete beta I_x(a, b), continued-fraction evaluation.
double regularized_incomplete_beta(double a, double b, double x);

struct RegressionResult {
    Matrix beta;       // k x m
    Matrix se;         // k x m
    Matrix t;          // k x m (+-inf sentinel on zero residual variance)
    Matrix p;          // k x m
    Matrix residuals;  // n x m
    double df = 0.0;   // n - k
};

/// OLS of Y (n x m) on the design X (n x k) via QR; standard errors from
/// sigma^2 (X^T X)^-1.
RegressionResult regress(const Matrix& X, const Matrix& Y);

enum class IscAxis { time, features };

/// Subject-by-subject Pearson similarity of per-axis means: axis=time
/// correlates feature-mean time courses, axis=features correlates time-mean
/// feature profiles. Constant series produce NaN entries.
Matrix isc(std::span<const Matrix> subjects, IscAxis axis);

/// Pearson correlation; NaN when either input is constant.
double pearson(std::span<const double> x, std::span<const double> y);

}  // namespace feat::stats
