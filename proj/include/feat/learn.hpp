#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "feat/common.hpp"
#include "feat/features.hpp"

namespace feat::learn {

enum class ModelKind { logistic, svm, forest, pls };

const char* kind_name(ModelKind k);
ModelKind kind_from_name(const std::string& name);

struct LinearParams {
    std::vector<double> weights;
    double bias = 0.0;
};

struct TreeNode {
    int feature = -1;       // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    std::vector<double> class_fraction;  // leaf only
    int majority = 0;                    // leaf vote
};

struct Tree {
    std::vector<TreeNode> nodes;  // node 0 is the root
    int predict(std::span<const double> x) const;
};

struct ForestParams {
    std::vector<Tree> trees;
    int n_classes = 2;
};

struct PlsParams {
    std::vector<double> x_mean, y_mean;
    Matrix coef;                    // d x m, prediction = x * coef + intercept
    std::vector<double> intercept;  // m
    std::size_t components = 0;
};

/// Feature-pipeline metadata carried by models trained on extracted
/// features, so prediction can verify/reproduce the extraction.
struct PipelineMeta {
    std::optional<feats::PcaModel> pca;
    std::optional<feats::HogConfig> hog;
    int crop = 0;
    bool include_landmarks = false;

    friend bool operator==(const PipelineMeta&, const PipelineMeta&) = default;
};

struct TrainedModel {
    int version = 1;
    ModelKind kind = ModelKind::logistic;
    std::vector<std::string> label_names;  // 2 for binary; L for one-vs-rest / forest
    PipelineMeta pipeline;

    std::vector<LinearParams> linear;  // 1 entry for binary, L for one-vs-rest
    ForestParams forest;
    PlsParams pls;

    std::size_t input_dim() const;
};

struct LogisticConfig {
    double l2 = 1e-2;
    int max_iter = 500;
    double tol = 1e-8;
};

struct SvmConfig {
    double l2 = 1e-2;
    int epochs = 30;
    std::uint64_t seed = 0;
};

struct ForestConfig {
    int n_trees = 100;
    int max_depth = 0;  // 0 = unlimited
    int min_leaf = 1;
    int mtry = 0;  // 0 = ceil(sqrt(d))
    bool bootstrap = true;
    std::uint64_t seed = 0;
};

/// Full-batch gradient descent with backtracking line search on
/// mean log-loss + l2/2 ||w||^2 (bias unregularized). Stops when the
/// gradient infinity norm drops below tol.
TrainedModel train_logistic(const Matrix& X, std::span<const int> y, const LogisticConfig& cfg);

/// Mean log-loss + l2/2 ||w||^2, exposed for the line-search monotonicity
/// and finite-difference tests.
double logistic_objective(const Matrix& X, std::span<const int> y, std::span<const double> w,
                          double bias, double l2);
void logistic_gradient(const Matrix& X, std::span<const int> y, std::span<const double> w,
                       double bias, double l2, std::span<double> grad_w, double& grad_b);

/// Pegasos-style stochastic subgradient on the hinge loss with iterate
/// averaging; deterministic given the seed.
TrainedModel train_svm(const Matrix& X, std::span<const int> y, const SvmConfig& cfg);

/// l2/2 ||w||^2 + mean hinge.
double svm_objective(const Matrix& X, std::span<const int> y, std::span<const double> w,
                     double bias, double l2);

/// Bootstrap-sampled CART trees, Gini splits over mtry random feature
/// candidates, thresholds at midpoints of sorted unique values.
/// Draw order (splitmix64 throughout): one master stream seeded with
/// cfg.seed yields one seed per tree; each tree stream first draws its n
/// bootstrap indices (next() % n), then at every node, visited depth-first
/// left-before-right, draws the mtry candidate features via partial
/// Fisher-Yates over the feature index array.
TrainedModel train_forest(const Matrix& X, std::span<const int> y, int n_classes,
                          const ForestConfig& cfg);

/// One-vs-rest wrapper for logistic/svm on multi-class labels.
TrainedModel train_linear_ovr(ModelKind kind, const Matrix& X, std::span<const int> y,
                              std::span<const std::string> label_names, const LogisticConfig& lcfg,
                              const SvmConfig& scfg);

/// n x labels score matrix: logistic = sigmoid, forest = tree-vote fraction,
/// svm = clamped margin score (not a calibrated probability).
Matrix predict_proba(const TrainedModel& model, const Matrix& X);

/// Argmax column of predict_proba (schema label order breaks ties).
std::vector<int> predict_label(const TrainedModel& model, const Matrix& X);

/// NIPALS PLS2 with mean centering on both blocks.
TrainedModel fit_pls(const Matrix& X, const Matrix& Y, std::size_t k);

/// X * coef + intercept for a PLS model.
Matrix pls_predict(const TrainedModel& model, const Matrix& X);

struct CvPlan {
    int folds = 3;
    std::map<std::string, std::vector<double>> grid;
    std::uint64_t seed = 0;
};

struct GridCell {
    std::map<std::string, double> params;
    double mean_f1 = 0.0;
};

struct GridSearchResult {
    std::map<std::string, double> best;
    double best_f1 = 0.0;
    std::vector<GridCell> cells;  // row-major over name-sorted parameters
};

/// Stratified k-fold grid search maximizing mean validation F1. Folds are
/// dealt round-robin per class after a seeded shuffle; ties go to the first
/// cell in row-major grid-enumeration order.
GridSearchResult grid_search_cv(const Matrix& X, std::span<const int> y, ModelKind kind,
                                const CvPlan& plan);

/// Default hyperparameter grid per model kind.
CvPlan default_cv_plan(ModelKind kind, std::uint64_t seed);

struct LogoResult {
    std::vector<std::string> groups;           // first-occurrence order
    std::vector<std::vector<int>> predictions; // per group
    double accuracy = 0.0;
};

/// Leave-one-group-out: train on all rows outside the group, predict the
/// group, pooled accuracy.
LogoResult leave_one_group_out(const Matrix& X, std::span<const int> y,
                               std::span<const std::string> groups, ModelKind kind,
                               const LogisticConfig& lcfg, const SvmConfig& scfg,
                               const ForestConfig& fcfg, int n_classes = 2);

/// Versioned JSON with decimal-string numerics (exact round-trip).
std::string model_to_json(const TrainedModel& model);
TrainedModel model_from_json(const std::string& text);
void save_model(const TrainedModel& model, const std::string& path);
TrainedModel load_model(const std::string& path);

}  // namespace feat::learn
