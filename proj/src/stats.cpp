#include "feat/stats.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

#include "feat/simd.hpp"

namespace feat::stats {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

/// Modified Lentz continued fraction for the incomplete beta (the classic
/// betacf form), good to ~1e-14 for the arguments used here.
double betacf(double a, double b, double x) {
    constexpr int kMaxIter = 300;
    constexpr double kEps = 3e-16;
    constexpr double kTiny = 1e-300;

    const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < kEps) break;
    }
    return h;
}

}  // namespace

double regularized_incomplete_beta(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                            a * std::log(x) + b * std::log1p(-x);
    const double front = std::exp(ln_front);
    if (x < (a + 1.0) / (a + b + 2.0)) return front * betacf(a, b, x) / a;
    return 1.0 - front * betacf(b, a, 1.0 - x) / b;  // symmetry for faster convergence
}

double student_t_two_sided_p(double t, double df) {
    if (df <= 0.0) return kNan;
    if (!std::isfinite(t)) return 0.0;
    const double x = df / (df + t * t);
    double p = regularized_incomplete_beta(df / 2.0, 0.5, x);
    return std::clamp(p, 0.0, 1.0);
}

TTestResult ttest_ind(std::span<const double> a, std::span<const double> b, bool welch) {
    std::vector<double> xa, xb;
    std::size_t dropped = 0;
    for (double v : a) {
        if (std::isnan(v)) ++dropped;
        else xa.push_back(v);
    }
    for (double v : b) {
        if (std::isnan(v)) ++dropped;
        else xb.push_back(v);
    }
    const std::size_t n1 = xa.size(), n2 = xb.size();
    if (n1 < 2 || n2 < 2) fail("TooFewSamples", "each group needs at least 2 finite samples");

    const double m1 = simd::sum(xa.data(), n1) / static_cast<double>(n1);
    const double m2 = simd::sum(xb.data(), n2) / static_cast<double>(n2);
    double ss1 = 0.0, ss2 = 0.0;
    for (double v : xa) ss1 += (v - m1) * (v - m1);
    for (double v : xb) ss2 += (v - m2) * (v - m2);

    TTestResult r;
    r.dropped = dropped;
    if (welch) {
        const double v1 = ss1 / (n1 - 1.0), v2 = ss2 / (n2 - 1.0);
        const double se2 = v1 / n1 + v2 / n2;
        if (se2 == 0.0) fail("ZeroVariance", "both groups constant");
        r.df = se2 * se2 /
               (v1 * v1 / (n1 * n1 * (n1 - 1.0)) + v2 * v2 / (n2 * n2 * (n2 - 1.0)));
        r.t = (m1 - m2) / std::sqrt(se2);
    } else {
        r.df = static_cast<double>(n1 + n2 - 2);
        const double pooled = (ss1 + ss2) / r.df;
        const double se2 = pooled * (1.0 / n1 + 1.0 / n2);
        if (se2 == 0.0) {
            if (m1 == m2) fail("ZeroVariance", "both groups constant and equal");
            r.t = m1 > m2 ? std::numeric_limits<double>::infinity()
                          : -std::numeric_limits<double>::infinity();
            r.p = 0.0;
            return r;
        }
        r.t = (m1 - m2) / std::sqrt(se2);
    }
    r.p = student_t_two_sided_p(r.t, r.df);
    return r;
}

RegressionResult regress(const Matrix& X, const Matrix& Y) {
    const std::size_t n = X.rows(), k = X.cols(), m = Y.cols();
    if (Y.rows() != n) fail("DimensionMismatch", "X and Y row counts differ");
    if (n <= k) fail("RankDeficientDesign", "need more rows than design columns");

    using RowMajorMap =
        Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;
    Eigen::MatrixXd Xe = RowMajorMap(X.data(), n, k);
    Eigen::MatrixXd Ye = RowMajorMap(Y.data(), n, m);

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(Xe);
    if (qr.rank() < static_cast<Eigen::Index>(k))
        fail("RankDeficientDesign", "design matrix is rank deficient");

    Eigen::MatrixXd beta = qr.solve(Ye);
    Eigen::MatrixXd resid = Ye - Xe * beta;
    Eigen::MatrixXd xtx_inv = (Xe.transpose() * Xe).inverse();

    RegressionResult r;
    r.df = static_cast<double>(n - k);
    r.beta = Matrix(k, m);
    r.se = Matrix(k, m);
    r.t = Matrix(k, m);
    r.p = Matrix(k, m);
    r.residuals = Matrix(n, m);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < m; ++j) r.residuals(i, j) = resid(i, j);

    for (std::size_t j = 0; j < m; ++j) {
        const double sigma2 = resid.col(j).squaredNorm() / r.df;
        for (std::size_t i = 0; i < k; ++i) {
            r.beta(i, j) = beta(i, j);
            const double se = std::sqrt(sigma2 * xtx_inv(i, i));
            r.se(i, j) = se;
            if (se == 0.0) {
                // Zero residual variance: exact fit sentinel.
                r.t(i, j) = beta(i, j) == 0.0 ? 0.0
                            : beta(i, j) > 0.0 ? std::numeric_limits<double>::infinity()
                                               : -std::numeric_limits<double>::infinity();
                r.p(i, j) = beta(i, j) == 0.0 ? 1.0 : 0.0;
            } else {
                r.t(i, j) = beta(i, j) / se;
                r.p(i, j) = student_t_two_sided_p(r.t(i, j), r.df);
            }
        }
    }
    return r;
}

double pearson(std::span<const double> x, std::span<const double> y) {
    const std::size_t n = x.size();
    const double mx = simd::sum(x.data(), n) / static_cast<double>(n);
    const double my = simd::sum(y.data(), n) / static_cast<double>(n);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = x[i] - mx, dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0) return kNan;
    return sxy / std::sqrt(sxx * syy);
}

Matrix isc(std::span<const Matrix> subjects, IscAxis axis) {
    const std::size_t s = subjects.size();
    if (s < 2) fail("TooFewSamples", "need at least 2 subjects");
    const std::size_t rows = subjects[0].rows(), cols = subjects[0].cols();
    for (const auto& m : subjects)
        if (m.rows() != rows || m.cols() != cols)
            fail("DimensionMismatch", "subject matrices must share one shape");

    // Per-axis mean profile per subject.
    std::vector<std::vector<double>> profile(s);
    for (std::size_t i = 0; i < s; ++i) {
        if (axis == IscAxis::time) {
            profile[i].resize(rows);
            for (std::size_t r = 0; r < rows; ++r)
                profile[i][r] = simd::sum(subjects[i].row(r).data(), cols) / static_cast<double>(cols);
        } else {
            profile[i].assign(cols, 0.0);
            for (std::size_t r = 0; r < rows; ++r)
                simd::vadd(profile[i].data(), subjects[i].row(r).data(), profile[i].data(), cols);
            simd::scale(profile[i].data(), 1.0 / static_cast<double>(rows), cols);
        }
    }

    auto is_constant = [](const std::vector<double>& v) {
        for (double x : v)
            if (x != v.front()) return false;
        return true;
    };

    Matrix out(s, s, 1.0);
    for (std::size_t i = 0; i < s; ++i) {
        if (is_constant(profile[i])) out(i, i) = kNan;
        for (std::size_t j = i + 1; j < s; ++j) {
            const double r = pearson(profile[i], profile[j]);
            out(i, j) = r;
            out(j, i) = r;
        }
    }
    return out;
}

}  // namespace feat::stats
