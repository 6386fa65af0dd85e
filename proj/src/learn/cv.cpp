#include <algorithm>
#include <cmath>
#include <numeric>

#include "feat/learn.hpp"
#include "feat/metrics.hpp"

namespace feat::learn {

const char* kind_name(ModelKind k) {
    switch (k) {
        case ModelKind::logistic: return "logistic";
        case ModelKind::svm: return "svm";
        case ModelKind::forest: return "forest";
        case ModelKind::pls: return "pls";
    }
    return "?";
}

ModelKind kind_from_name(const std::string& name) {
    if (name == "logistic") return ModelKind::logistic;
    if (name == "svm") return ModelKind::svm;
    if (name == "forest") return ModelKind::forest;
    if (name == "pls") return ModelKind::pls;
    fail("DimensionMismatch", "unknown model kind '" + name + "'");
}

namespace {

/// Per-class seeded shuffle, then round-robin dealing: class balance with a
/// deterministic assignment.
std::vector<int> stratified_folds(std::span<const int> y, int folds, std::uint64_t seed) {
    std::vector<int> fold_of(y.size(), -1);
    int max_label = 0;
    for (int v : y) max_label = std::max(max_label, v);
    SplitMix64 rng(seed);
    for (int c = 0; c <= max_label; ++c) {
        std::vector<std::size_t> idx;
        for (std::size_t i = 0; i < y.size(); ++i)
            if (y[i] == c) idx.push_back(i);
        rng.shuffle(idx);
        for (std::size_t j = 0; j < idx.size(); ++j)
            fold_of[idx[j]] = static_cast<int>(j % static_cast<std::size_t>(folds));
    }
    return fold_of;
}

TrainedModel train_with_params(ModelKind kind, const Matrix& X, std::span<const int> y,
                               const std::map<std::string, double>& params, std::uint64_t seed) {
    auto get = [&](const char* name, double fallback) {
        const auto it = params.find(name);
        return it == params.end() ? fallback : it->second;
    };
    switch (kind) {
        case ModelKind::logistic: {
            LogisticConfig cfg;
            cfg.l2 = get("lambda", cfg.l2);
            cfg.max_iter = static_cast<int>(get("max_iter", cfg.max_iter));
            return train_logistic(X, y, cfg);
        }
        case ModelKind::svm: {
            SvmConfig cfg;
            cfg.l2 = get("lambda", cfg.l2);
            cfg.epochs = static_cast<int>(get("epochs", cfg.epochs));
            cfg.seed = seed;
            return train_svm(X, y, cfg);
        }
        case ModelKind::forest: {
            ForestConfig cfg;
            cfg.n_trees = static_cast<int>(get("n_trees", cfg.n_trees));
            cfg.max_depth = static_cast<int>(get("max_depth", cfg.max_depth));
            cfg.min_leaf = static_cast<int>(get("min_leaf", cfg.min_leaf));
            cfg.mtry = static_cast<int>(get("mtry", cfg.mtry));
            cfg.seed = seed;
            int n_classes = 0;
            for (int v : y) n_classes = std::max(n_classes, v + 1);
            return train_forest(X, y, std::max(n_classes, 2), cfg);
        }
        case ModelKind::pls:
            break;
    }
    fail("DimensionMismatch", "grid search supports logistic, svm, and forest");
}

double binary_f1(std::span<const int> pred, std::span<const int> truth) {
    metrics::ConfusionCounts c;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        if (pred[i] != 0 && truth[i] != 0) ++c.tp;
        else if (pred[i] != 0) ++c.fp;
        else if (truth[i] != 0) ++c.fn;
        else ++c.tn;
    }
    return metrics::f1(c);
}

}  // namespace

CvPlan default_cv_plan(ModelKind kind, std::uint64_t seed) {
    CvPlan plan;
    plan.seed = seed;
    switch (kind) {
        case ModelKind::logistic:
        case ModelKind::svm:
            plan.grid["lambda"] = {1e-4, 1e-2, 1.0};
            break;
        case ModelKind::forest:
            plan.grid["n_trees"] = {100};
            plan.grid["max_depth"] = {8, 0};  // 0 = unlimited
            break;
        case ModelKind::pls:
            break;
    }
    return plan;
}

GridSearchResult grid_search_cv(const Matrix& X, std::span<const int> y, ModelKind kind,
                                const CvPlan& plan) {
    if (plan.folds < 2) fail("TooFewSamples", "need at least 2 folds");
    if (plan.grid.empty()) fail("TooFewSamples", "empty parameter grid");
    for (const auto& [name, values] : plan.grid)
        if (values.empty()) fail("TooFewSamples", "empty candidate list for " + name);

    std::size_t minority = y.size();
    int max_label = 0;
    for (int v : y) max_label = std::max(max_label, v);
    for (int c = 0; c <= max_label; ++c) {
        const auto cnt = static_cast<std::size_t>(std::count(y.begin(), y.end(), c));
        if (cnt > 0) minority = std::min(minority, cnt);
    }
    if (static_cast<std::size_t>(plan.folds) > minority)
        fail("TooFewSamples", "folds exceed the minority class count");

    const std::vector<int> fold_of = stratified_folds(y, plan.folds, plan.seed);

    // Row-major enumeration over name-sorted parameters (std::map order):
    // the first parameter varies slowest. Ties keep the earliest cell.
    std::vector<std::string> names;
    std::vector<std::size_t> sizes;
    std::size_t total = 1;
    for (const auto& [name, values] : plan.grid) {
        names.push_back(name);
        sizes.push_back(values.size());
        total *= values.size();
    }

    GridSearchResult result;
    result.best_f1 = -1.0;
    for (std::size_t cell = 0; cell < total; ++cell) {
        std::map<std::string, double> params;
        std::size_t rem = cell;
        for (std::size_t pi = names.size(); pi-- > 0;) {
            const auto& values = plan.grid.at(names[pi]);
            params[names[pi]] = values[rem % sizes[pi]];
            rem /= sizes[pi];
        }

        double f1_sum = 0.0;
        for (int fold = 0; fold < plan.folds; ++fold) {
            std::vector<std::size_t> tr, va;
            for (std::size_t i = 0; i < y.size(); ++i)
                (fold_of[i] == fold ? va : tr).push_back(i);

            Matrix Xtr(tr.size(), X.cols()), Xva(va.size(), X.cols());
            std::vector<int> ytr(tr.size()), yva(va.size());
            for (std::size_t i = 0; i < tr.size(); ++i) {
                std::copy_n(X.row(tr[i]).data(), X.cols(), Xtr.row(i).data());
                ytr[i] = y[tr[i]];
            }
            for (std::size_t i = 0; i < va.size(); ++i) {
                std::copy_n(X.row(va[i]).data(), X.cols(), Xva.row(i).data());
                yva[i] = y[va[i]];
            }

            const TrainedModel model = train_with_params(kind, Xtr, ytr, params, plan.seed);
            const std::vector<int> pred = predict_label(model, Xva);
            if (max_label <= 1) {
                f1_sum += binary_f1(pred, yva);
            } else {
                std::vector<std::string> ps, ts, ls;
                for (int v : pred) ps.push_back(std::to_string(v));
                for (int v : yva) ts.push_back(std::to_string(v));
                for (int c = 0; c <= max_label; ++c) ls.push_back(std::to_string(c));
                f1_sum += metrics::per_label_f1(ps, ts, ls).macro_average;
            }
        }

        GridCell gc;
        gc.params = params;
        gc.mean_f1 = f1_sum / plan.folds;
        if (gc.mean_f1 > result.best_f1) {
            result.best_f1 = gc.mean_f1;
            result.best = params;
        }
        result.cells.push_back(std::move(gc));
    }
    return result;
}

LogoResult leave_one_group_out(const Matrix& X, std::span<const int> y,
                               std::span<const std::string> groups, ModelKind kind,
                               const LogisticConfig& lcfg, const SvmConfig& scfg,
                               const ForestConfig& fcfg, int n_classes) {
    if (groups.size() != X.rows()) fail("DimensionMismatch", "group count must match row count");
    std::vector<std::string> order;
    for (const auto& g : groups)
        if (std::find(order.begin(), order.end(), g) == order.end()) order.push_back(g);
    if (order.size() < 2) fail("SingleGroup", "need at least 2 groups");

    LogoResult result;
    result.groups = order;
    std::size_t correct = 0, totaln = 0;
    for (const auto& g : order) {
        std::vector<std::size_t> tr, te;
        for (std::size_t i = 0; i < groups.size(); ++i)
            (groups[i] == g ? te : tr).push_back(i);

        Matrix Xtr(tr.size(), X.cols()), Xte(te.size(), X.cols());
        std::vector<int> ytr(tr.size());
        for (std::size_t i = 0; i < tr.size(); ++i) {
            std::copy_n(X.row(tr[i]).data(), X.cols(), Xtr.row(i).data());
            ytr[i] = y[tr[i]];
        }
        for (std::size_t i = 0; i < te.size(); ++i)
            std::copy_n(X.row(te[i]).data(), X.cols(), Xte.row(i).data());

        TrainedModel model;
        switch (kind) {
            case ModelKind::logistic: model = train_logistic(Xtr, ytr, lcfg); break;
            case ModelKind::svm: model = train_svm(Xtr, ytr, scfg); break;
            case ModelKind::forest: model = train_forest(Xtr, ytr, n_classes, fcfg); break;
            case ModelKind::pls: fail("DimensionMismatch", "pls is not a classifier");
        }
        const std::vector<int> pred = predict_label(model, Xte);
        for (std::size_t i = 0; i < te.size(); ++i) {
            correct += pred[i] == y[te[i]] ? 1 : 0;
            ++totaln;
        }
        result.predictions.push_back(pred);
    }
    result.accuracy = static_cast<double>(correct) / static_cast<double>(totaln);
    return result;
}

}  // namespace feat::learn
