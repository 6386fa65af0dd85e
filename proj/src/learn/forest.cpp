#include <algorithm>
#include <cmath>
#include <numeric>

#include "feat/learn.hpp"

namespace feat::learn {

namespace {

struct TreeBuilder {
    const Matrix& X;
    std::span<const int> y;
    int n_classes;
    const ForestConfig& cfg;
    int mtry;
    SplitMix64 rng;
    Tree tree;
    std::vector<int> feature_order;  // scratch for candidate draws

    TreeBuilder(const Matrix& x, std::span<const int> labels, int nc, const ForestConfig& c,
                int mtry_, std::uint64_t seed)
        : X(x), y(labels), n_classes(nc), cfg(c), mtry(mtry_), rng(seed) {}

    int make_leaf(const std::vector<std::size_t>& idx) {
        TreeNode node;
        node.class_fraction.assign(n_classes, 0.0);
        for (std::size_t i : idx) node.class_fraction[y[i]] += 1.0;
        int majority = 0;
        for (int c = 1; c < n_classes; ++c)
            if (node.class_fraction[c] > node.class_fraction[majority]) majority = c;
        for (double& f : node.class_fraction) f /= static_cast<double>(idx.size());
        node.majority = majority;
        tree.nodes.push_back(std::move(node));
        return static_cast<int>(tree.nodes.size()) - 1;
    }

    struct Split {
        int feature = -1;
        double threshold = 0.0;
        double gini = std::numeric_limits<double>::infinity();
    };

    /// Weighted Gini of the best midpoint threshold on one feature, honoring
    /// min_leaf on both children. Lower threshold wins ties within a feature.
    void best_split_on(int f, const std::vector<std::size_t>& idx, Split& best) {
        std::vector<std::pair<double, int>> vals;
        vals.reserve(idx.size());
        for (std::size_t i : idx) vals.emplace_back(X(i, static_cast<std::size_t>(f)), y[i]);
        std::sort(vals.begin(), vals.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });

        const std::size_t n = vals.size();
        std::vector<double> left(n_classes, 0.0), right(n_classes, 0.0);
        for (const auto& [v, c] : vals) right[c] += 1.0;

        std::size_t nl = 0;
        for (std::size_t i = 0; i + 1 < n; ++i) {
            left[vals[i].second] += 1.0;
            right[vals[i].second] -= 1.0;
            ++nl;
            if (vals[i].first == vals[i + 1].first) continue;  // not a unique-value boundary
            const std::size_t nr = n - nl;
            if (nl < static_cast<std::size_t>(cfg.min_leaf) ||
                nr < static_cast<std::size_t>(cfg.min_leaf))
                continue;
            double gl = 1.0, gr = 1.0;
            for (int c = 0; c < n_classes; ++c) {
                gl -= (left[c] / nl) * (left[c] / nl);
                gr -= (right[c] / nr) * (right[c] / nr);
            }
            const double weighted = (nl * gl + nr * gr) / static_cast<double>(n);
            if (weighted < best.gini) {
                best.gini = weighted;
                best.feature = f;
                best.threshold = 0.5 * (vals[i].first + vals[i + 1].first);
            }
        }
    }

    int build(const std::vector<std::size_t>& idx, int depth) {
        bool pure = true;
        for (std::size_t i : idx)
            if (y[i] != y[idx.front()]) {
                pure = false;
                break;
            }
        if (pure || idx.size() < 2 * static_cast<std::size_t>(cfg.min_leaf) ||
            (cfg.max_depth > 0 && depth >= cfg.max_depth))
            return make_leaf(idx);

        // Fresh identity order, then partial Fisher-Yates for mtry candidates.
        const std::size_t d = X.cols();
        feature_order.resize(d);
        std::iota(feature_order.begin(), feature_order.end(), 0);
        const int k = std::min<std::size_t>(mtry, d);
        for (int j = 0; j < k; ++j)
            std::swap(feature_order[j], feature_order[j + rng.next_below(d - j)]);

        Split best;
        for (int j = 0; j < k; ++j) best_split_on(feature_order[j], idx, best);
        if (best.feature < 0) return make_leaf(idx);

        std::vector<std::size_t> li, ri;
        for (std::size_t i : idx)
            (X(i, static_cast<std::size_t>(best.feature)) <= best.threshold ? li : ri).push_back(i);

        TreeNode node;
        node.feature = best.feature;
        node.threshold = best.threshold;
        const int self = static_cast<int>(tree.nodes.size());
        tree.nodes.push_back(std::move(node));
        const int left = build(li, depth + 1);
        const int right = build(ri, depth + 1);
        tree.nodes[self].left = left;
        tree.nodes[self].right = right;
        return self;
    }
};

}  // namespace

TrainedModel train_forest(const Matrix& X, std::span<const int> y, int n_classes,
                          const ForestConfig& cfg) {
    const std::size_t n = X.rows(), d = X.cols();
    if (n != y.size()) fail("DimensionMismatch", "X rows and label count differ");
    if (n < 2 * static_cast<std::size_t>(std::max(cfg.min_leaf, 1)))
        fail("TooFewSamples", "need at least 2*min_leaf samples");
    for (int v : y)
        if (v < 0 || v >= n_classes) fail("DimensionMismatch", "label out of range");

    const int mtry = cfg.mtry > 0 ? cfg.mtry
                                  : static_cast<int>(std::ceil(std::sqrt(static_cast<double>(d))));

    TrainedModel m;
    m.kind = ModelKind::forest;
    m.forest.n_classes = n_classes;
    if (n_classes == 2) {
        m.label_names = {"0", "1"};
    } else {
        for (int c = 0; c < n_classes; ++c) m.label_names.push_back(std::to_string(c));
    }

    SplitMix64 master(cfg.seed);
    for (int t = 0; t < cfg.n_trees; ++t) {
        const std::uint64_t tree_seed = master.next();
        TreeBuilder builder(X, y, n_classes, cfg, mtry, tree_seed);
        std::vector<std::size_t> idx(n);
        if (cfg.bootstrap) {
            for (std::size_t i = 0; i < n; ++i) idx[i] = builder.rng.next_below(n);
        } else {
            std::iota(idx.begin(), idx.end(), 0);
        }
        builder.build(idx, 0);
        m.forest.trees.push_back(std::move(builder.tree));
    }
    return m;
}

}  // namespace feat::learn
