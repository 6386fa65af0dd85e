#include <Eigen/Dense>
#include <cmath>

#include "feat/features.hpp"
#include "feat/simd.hpp"

namespace feat::feats {

PcaModel fit_pca(const Matrix& X, double retain) {
    const std::size_t n = X.rows(), d = X.cols();
    if (n < 2) fail("RankZero", "need at least 2 rows");
    if (!X.all_finite()) fail("NonFinite", "non-finite input");
    if (retain <= 0.0 || retain > 1.0) fail("BadDimensions", "retain must be in (0,1]");

    Eigen::MatrixXd C = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                                       Eigen::RowMajor>>(X.data(), n, d);
    Eigen::RowVectorXd mean = C.colwise().mean();
    C.rowwise() -= mean;

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(C, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    const double total = sv.squaredNorm();
    if (total <= 1e-24) fail("RankZero", "all rows identical");

    const std::size_t r = static_cast<std::size_t>(sv.size());
    std::vector<double> ratio(r);
    for (std::size_t i = 0; i < r; ++i) ratio[i] = sv(i) * sv(i) / total;

    std::size_t k = r;
    double cum = 0.0;
    for (std::size_t i = 0; i < r; ++i) {
        cum += ratio[i];
        if (cum >= retain - 1e-12) {
            k = i + 1;
            break;
        }
    }
    // Drop numerically-zero directions the cumulative test may have kept.
    while (k > 1 && sv(k - 1) * sv(k - 1) <= total * 1e-28) --k;

    PcaModel model;
    model.mean.assign(mean.data(), mean.data() + d);
    model.components = Matrix(k, d);
    model.explained_variance_ratio.assign(ratio.begin(), ratio.begin() + k);
    Eigen::MatrixXd V = svd.matrixV();
    for (std::size_t i = 0; i < k; ++i) {
        // Deterministic sign: largest-|.| entry of each component positive.
        std::size_t arg = 0;
        double best = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
            if (std::abs(V(j, i)) > best) {
                best = std::abs(V(j, i));
                arg = j;
            }
        }
        const double sgn = V(arg, i) < 0.0 ? -1.0 : 1.0;
        for (std::size_t j = 0; j < d; ++j) model.components(i, j) = sgn * V(j, i);
    }
    return model;
}

Matrix pca_transform(const PcaModel& model, const Matrix& X) {
    if (X.cols() != model.dim()) fail("DimensionMismatch", "feature dimensionality mismatch");
    const std::size_t n = X.rows(), d = X.cols(), k = model.k();
    Matrix out(n, k);
    std::vector<double> centered(d);
    for (std::size_t r = 0; r < n; ++r) {
        simd::vsub(X.row(r).data(), model.mean.data(), centered.data(), d);
        simd::matvec(model.components.data(), k, d, centered.data(), out.row(r).data());
    }
    return out;
}

Matrix pca_inverse_transform(const PcaModel& model, const Matrix& scores) {
    if (scores.cols() != model.k()) fail("DimensionMismatch", "score dimensionality mismatch");
    const std::size_t n = scores.rows(), d = model.dim(), k = model.k();
    Matrix out(n, d);
    for (std::size_t r = 0; r < n; ++r) {
        double* dst = out.row(r).data();
        std::copy(model.mean.begin(), model.mean.end(), dst);
        for (std::size_t i = 0; i < k; ++i)
            simd::axpy(scores(r, i), model.components.row(i).data(), dst, d);
    }
    return out;
}

}  // namespace feat::feats
