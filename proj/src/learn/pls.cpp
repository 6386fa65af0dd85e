#include <Eigen/Dense>
#include <cmath>

#include "feat/learn.hpp"
#include "feat/simd.hpp"

namespace feat::learn {

TrainedModel fit_pls(const Matrix& X, const Matrix& Y, std::size_t k) {
    const std::size_t n = X.rows(), d = X.cols(), m = Y.cols();
    if (Y.rows() != n) fail("DimensionMismatch", "X and Y row counts differ");
    if (n < 2) fail("TooFewSamples", "need at least 2 samples");
    if (k < 1 || k > std::min(n - 1, d)) fail("DimensionMismatch", "k must be in [1, min(n-1, d)]");
    if (!X.all_finite() || !Y.all_finite()) fail("NonFinite", "non-finite input");

    using RowMajorMap =
        Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;
    Eigen::MatrixXd Xr = RowMajorMap(X.data(), n, d);
    Eigen::MatrixXd Yr = RowMajorMap(Y.data(), n, m);
    const Eigen::RowVectorXd x_mean = Xr.colwise().mean();
    const Eigen::RowVectorXd y_mean = Yr.colwise().mean();
    Xr.rowwise() -= x_mean;
    Yr.rowwise() -= y_mean;

    const double x_scale = Xr.norm();
    if (x_scale <= 1e-300) fail("RankDeficient", "X has no variance");

    Eigen::MatrixXd W(d, k), P(d, k), C(m, k);

    for (std::size_t a = 0; a < k; ++a) {
        // Start u from the Y-residual column with the largest energy.
        Eigen::Index u_col = 0;
        Yr.colwise().squaredNorm().maxCoeff(&u_col);
        Eigen::VectorXd u = Yr.col(u_col);
        if (u.norm() <= 1e-14 * x_scale) fail("RankDeficient", "Y residual vanished");

        Eigen::VectorXd w(d), t(n), c(m);
        Eigen::VectorXd t_old = Eigen::VectorXd::Zero(n);
        for (int iter = 0; iter < 1000; ++iter) {
            w = Xr.transpose() * u;
            const double wn = w.norm();
            if (wn <= 1e-300) fail("RankDeficient", "zero-norm weight in deflation");
            w /= wn;
            t = Xr * w;
            const double tt = t.squaredNorm();
            if (tt <= 1e-300) fail("RankDeficient", "zero-norm score in deflation");
            c = Yr.transpose() * t / tt;
            const double cc = c.squaredNorm();
            if (cc <= 1e-300) fail("RankDeficient", "zero-norm loading in deflation");
            u = Yr * c / cc;
            if ((t - t_old).norm() <= 1e-12 * t.norm() || m == 1) break;
            t_old = t;
        }

        const double tt = t.squaredNorm();
        Eigen::VectorXd p = Xr.transpose() * t / tt;
        W.col(a) = w;
        P.col(a) = p;
        C.col(a) = c;
        Xr -= t * p.transpose();
        Yr -= t * c.transpose();
    }

    // B = W (P^T W)^-1 C^T maps centered X to centered Y.
    const Eigen::MatrixXd ptw = P.transpose() * W;
    const Eigen::MatrixXd B = W * ptw.inverse() * C.transpose();
    const Eigen::RowVectorXd intercept = y_mean - x_mean * B;

    TrainedModel model;
    model.kind = ModelKind::pls;
    model.pls.components = k;
    model.pls.x_mean.assign(x_mean.data(), x_mean.data() + d);
    model.pls.y_mean.assign(y_mean.data(), y_mean.data() + m);
    model.pls.coef = Matrix(d, m);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < m; ++j) model.pls.coef(i, j) = B(i, j);
    model.pls.intercept.assign(intercept.data(), intercept.data() + m);
    return model;
}

Matrix pls_predict(const TrainedModel& model, const Matrix& X) {
    if (model.kind != ModelKind::pls) fail("DimensionMismatch", "model is not a pls model");
    const std::size_t d = model.pls.coef.rows(), m = model.pls.coef.cols();
    if (X.cols() != d) fail("DimensionMismatch", "feature dimensionality mismatch");
    Matrix out(X.rows(), m);
    for (std::size_t i = 0; i < X.rows(); ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            double v = model.pls.intercept[j];
            for (std::size_t f = 0; f < d; ++f) v += X(i, f) * model.pls.coef(f, j);
            out(i, j) = v;
        }
    }
    return out;
}

}  // namespace feat::learn
