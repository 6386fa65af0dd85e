#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "feat/geometry.hpp"

namespace feat::metrics {

struct ConfusionCounts {
    std::uint64_t tp = 0;
    std::uint64_t fp = 0;
    std::uint64_t fn = 0;
    std::uint64_t tn = 0;
};

/// tp / (tp + fp); 0 when the denominator is 0.
double precision(const ConfusionCounts& c);
/// tp / (tp + fn); 0 when the denominator is 0.
double recall(const ConfusionCounts& c);
/// 2pr / (p + r); 0 when p + r == 0.
double f1(const ConfusionCounts& c);

/// Detection AP: predictions sorted by descending score (input order on
/// ties), greedily matched to the unmatched truth with the highest IoU at or
/// above the threshold (lowest truth index on ties); area under the
/// all-points-interpolated precision-recall curve. Conventions: no truths
/// and no predictions -> 1; otherwise no truths -> 0.
double average_precision(std::span<const geom::FaceBox> preds,
                         std::span<const geom::FaceBox> truths, double iou_threshold = 0.5);

/// Multi-frame AP: boxes match only within the same frame; the PR curve is
/// pooled over frames by global score order.
double average_precision_frames(std::span<const std::int64_t> pred_frames,
                                std::span<const geom::FaceBox> preds,
                                std::span<const std::int64_t> truth_frames,
                                std::span<const geom::FaceBox> truths,
                                double iou_threshold = 0.5);

/// Mean per-point Euclidean distance divided by the truth interocular
/// distance (x100 for Table-3-style reports).
double landmark_nrmse(const geom::LandmarkSet& pred, const geom::LandmarkSet& truth);

struct PerLabelF1 {
    std::vector<std::string> labels;
    std::vector<double> f1;
    std::vector<ConfusionCounts> counts;
    double macro_average = 0.0;
};

/// One-vs-rest confusion counts and F1 per label plus the unweighted mean.
PerLabelF1 per_label_f1(std::span<const std::string> pred_labels,
                        std::span<const std::string> true_labels,
                        std::span<const std::string> labels);

}  // namespace feat::metrics
