#include <algorithm>
#include <cmath>

#include "feat/learn.hpp"
#include "feat/simd.hpp"

namespace feat::learn {

namespace {

void check_binary(const Matrix& X, std::span<const int> y) {
    if (X.rows() != y.size()) fail("DimensionMismatch", "X rows and label count differ");
    if (X.rows() < 2) fail("TooFewSamples", "need at least 2 samples");
    if (!X.all_finite()) fail("NonFinite", "non-finite feature value");
    bool pos = false, neg = false;
    for (int v : y) (v != 0 ? pos : neg) = true;
    if (!pos || !neg) fail("SingleClass", "both classes must be present");
}

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

/// log(1 + e^z) without overflow.
double log1pexp(double z) { return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

}  // namespace

double logistic_objective(const Matrix& X, std::span<const int> y, std::span<const double> w,
                          double bias, double l2) {
    const std::size_t n = X.rows(), d = X.cols();
    double loss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double z = simd::dot(X.row(i).data(), w.data(), d) + bias;
        // -y log s - (1-y) log(1-s) == log(1+e^z) - y z
        loss += log1pexp(z) - (y[i] != 0 ? z : 0.0);
    }
    return loss / static_cast<double>(n) + 0.5 * l2 * simd::sumsq(w.data(), d);
}

void logistic_gradient(const Matrix& X, std::span<const int> y, std::span<const double> w,
                       double bias, double l2, std::span<double> grad_w, double& grad_b) {
    const std::size_t n = X.rows(), d = X.cols();
    std::fill(grad_w.begin(), grad_w.end(), 0.0);
    grad_b = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double z = simd::dot(X.row(i).data(), w.data(), d) + bias;
        const double err = sigmoid(z) - (y[i] != 0 ? 1.0 : 0.0);
        simd::axpy(err, X.row(i).data(), grad_w.data(), d);
        grad_b += err;
    }
    simd::scale(grad_w.data(), 1.0 / static_cast<double>(n), d);
    grad_b /= static_cast<double>(n);
    simd::axpy(l2, w.data(), grad_w.data(), d);  // bias unregularized
}

TrainedModel train_logistic(const Matrix& X, std::span<const int> y, const LogisticConfig& cfg) {
    check_binary(X, y);
    const std::size_t d = X.cols();

    std::vector<double> w(d, 0.0), grad(d), trial(d);
    double b = 0.0, grad_b = 0.0;
    double objective = logistic_objective(X, y, w, b, cfg.l2);
    double step = 1.0;

    for (int iter = 0; iter < cfg.max_iter; ++iter) {
        logistic_gradient(X, y, w, b, cfg.l2, grad, grad_b);
        double inf_norm = std::abs(grad_b);
        for (double g : grad) inf_norm = std::max(inf_norm, std::abs(g));
        if (inf_norm < cfg.tol) break;

        const double gg = simd::sumsq(grad.data(), d) + grad_b * grad_b;
        // Backtracking line search with the Armijo condition; the accepted
        // step never increases the objective.
        step = std::min(step * 2.0, 1e6);
        bool accepted = false;
        for (int ls = 0; ls < 60; ++ls) {
            std::copy(w.begin(), w.end(), trial.begin());
            simd::axpy(-step, grad.data(), trial.data(), d);
            const double trial_b = b - step * grad_b;
            const double trial_obj = logistic_objective(X, y, trial, trial_b, cfg.l2);
            if (trial_obj <= objective - 1e-4 * step * gg) {
                w.swap(trial);
                b = trial_b;
                objective = trial_obj;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) break;  // step underflow: converged to working precision
    }

    TrainedModel m;
    m.kind = ModelKind::logistic;
    m.label_names = {"0", "1"};
    m.linear.push_back({std::move(w), b});
    return m;
}

double svm_objective(const Matrix& X, std::span<const int> y, std::span<const double> w,
                     double bias, double l2) {
    const std::size_t n = X.rows(), d = X.cols();
    double hinge = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double ysign = y[i] != 0 ? 1.0 : -1.0;
        const double margin = ysign * (simd::dot(X.row(i).data(), w.data(), d) + bias);
        hinge += std::max(0.0, 1.0 - margin);
    }
    return 0.5 * l2 * simd::sumsq(w.data(), d) + hinge / static_cast<double>(n);
}

TrainedModel train_svm(const Matrix& X, std::span<const int> y, const SvmConfig& cfg) {
    check_binary(X, y);
    if (cfg.l2 <= 0.0) fail("BadDimensions", "svm l2 must be > 0");
    const std::size_t n = X.rows(), d = X.cols();

    // Pegasos with eta_t = 1/(l2 * t) on the bias-augmented weight vector
    // (the bias rides along as a constant-1 coordinate), suffix-averaged
    // over the second half of the trajectory; the first iterates are
    // dominated by the huge early steps. The sample draw sequence depends
    // only on the seed and n, so flipping the labels negates the trajectory
    // exactly.
    SplitMix64 rng(cfg.seed);
    std::vector<double> w(d, 0.0), avg_w(d, 0.0);
    double b = 0.0, avg_b = 0.0;
    const std::uint64_t total = static_cast<std::uint64_t>(cfg.epochs) * n;
    const std::uint64_t avg_from = total / 2;
    std::uint64_t averaged = 0;

    for (std::uint64_t t = 1; t <= total; ++t) {
        const std::size_t i = rng.next_below(n);
        const double eta = 1.0 / (cfg.l2 * static_cast<double>(t));
        const double ysign = y[i] != 0 ? 1.0 : -1.0;
        const double margin = ysign * (simd::dot(X.row(i).data(), w.data(), d) + b);
        const double shrink = 1.0 - eta * cfg.l2;
        simd::scale(w.data(), shrink, d);
        b *= shrink;
        if (margin < 1.0) {
            simd::axpy(eta * ysign, X.row(i).data(), w.data(), d);
            b += eta * ysign;
        }
        if (t > avg_from) {
            simd::axpy(1.0, w.data(), avg_w.data(), d);
            avg_b += b;
            ++averaged;
        }
    }
    simd::scale(avg_w.data(), 1.0 / static_cast<double>(averaged), d);
    avg_b /= static_cast<double>(averaged);

    TrainedModel m;
    m.kind = ModelKind::svm;
    m.label_names = {"0", "1"};
    m.linear.push_back({std::move(avg_w), avg_b});
    return m;
}

TrainedModel train_linear_ovr(ModelKind kind, const Matrix& X, std::span<const int> y,
                              std::span<const std::string> label_names, const LogisticConfig& lcfg,
                              const SvmConfig& scfg) {
    if (kind != ModelKind::logistic && kind != ModelKind::svm)
        fail("DimensionMismatch", "one-vs-rest applies to linear kinds only");
    const std::size_t n_labels = label_names.size();
    TrainedModel m;
    m.kind = kind;
    m.label_names.assign(label_names.begin(), label_names.end());
    std::vector<int> yb(y.size());
    for (std::size_t li = 0; li < n_labels; ++li) {
        for (std::size_t i = 0; i < y.size(); ++i) yb[i] = y[i] == static_cast<int>(li) ? 1 : 0;
        TrainedModel sub = kind == ModelKind::logistic ? train_logistic(X, yb, lcfg)
                                                       : train_svm(X, yb, scfg);
        m.linear.push_back(std::move(sub.linear[0]));
    }
    return m;
}

std::size_t TrainedModel::input_dim() const {
    switch (kind) {
        case ModelKind::logistic:
        case ModelKind::svm:
            return linear.empty() ? 0 : linear[0].weights.size();
        case ModelKind::forest: {
            int max_f = -1;
            for (const auto& tree : forest.trees)
                for (const auto& node : tree.nodes) max_f = std::max(max_f, node.feature);
            return static_cast<std::size_t>(max_f + 1);
        }
        case ModelKind::pls:
            return pls.x_mean.size();
    }
    return 0;
}

int Tree::predict(std::span<const double> x) const {
    int idx = 0;
    while (nodes[idx].feature >= 0)
        idx = x[nodes[idx].feature] <= nodes[idx].threshold ? nodes[idx].left : nodes[idx].right;
    return idx;
}

Matrix predict_proba(const TrainedModel& model, const Matrix& X) {
    const std::size_t n = X.rows();
    switch (model.kind) {
        case ModelKind::logistic:
        case ModelKind::svm: {
            for (const auto& lp : model.linear)
                if (lp.weights.size() != X.cols())
                    fail("DimensionMismatch", "feature dimensionality mismatch");
            if (model.linear.size() == 1) {
                Matrix out(n, 2);
                const auto& lp = model.linear[0];
                for (std::size_t i = 0; i < n; ++i) {
                    const double z = simd::dot(X.row(i).data(), lp.weights.data(), X.cols()) + lp.bias;
                    const double s = model.kind == ModelKind::logistic
                                         ? sigmoid(z)
                                         : std::clamp(0.5 + 0.5 * z, 0.0, 1.0);
                    out(i, 0) = 1.0 - s;
                    out(i, 1) = s;
                }
                return out;
            }
            Matrix out(n, model.linear.size());
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t li = 0; li < model.linear.size(); ++li) {
                    const auto& lp = model.linear[li];
                    const double z = simd::dot(X.row(i).data(), lp.weights.data(), X.cols()) + lp.bias;
                    out(i, li) = model.kind == ModelKind::logistic
                                     ? sigmoid(z)
                                     : std::clamp(0.5 + 0.5 * z, 0.0, 1.0);
                }
            }
            return out;
        }
        case ModelKind::forest: {
            if (model.input_dim() > X.cols())
                fail("DimensionMismatch", "feature dimensionality mismatch");
            const int nc = model.forest.n_classes;
            Matrix out(n, nc);
            for (std::size_t i = 0; i < n; ++i) {
                for (const auto& tree : model.forest.trees) {
                    const int leaf = tree.predict(X.row(i));
                    out(i, tree.nodes[leaf].majority) += 1.0;
                }
                simd::scale(out.row(i).data(), 1.0 / static_cast<double>(model.forest.trees.size()),
                            nc);
            }
            return out;
        }
        case ModelKind::pls:
            fail("DimensionMismatch", "pls models predict landmarks, not class probabilities");
    }
    return {};
}

std::vector<int> predict_label(const TrainedModel& model, const Matrix& X) {
    const Matrix p = predict_proba(model, X);
    std::vector<int> out(p.rows());
    for (std::size_t i = 0; i < p.rows(); ++i) {
        std::size_t arg = 0;
        for (std::size_t j = 1; j < p.cols(); ++j)
            if (p(i, j) > p(i, arg)) arg = j;
        out[i] = static_cast<int>(arg);
    }
    return out;
}

}  // namespace feat::learn
