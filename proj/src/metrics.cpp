#include "feat/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace feat::metrics {

double precision(const ConfusionCounts& c) {
    const std::uint64_t den = c.tp + c.fp;
    return den == 0 ? 0.0 : static_cast<double>(c.tp) / static_cast<double>(den);
}

double recall(const ConfusionCounts& c) {
    const std::uint64_t den = c.tp + c.fn;
    return den == 0 ? 0.0 : static_cast<double>(c.tp) / static_cast<double>(den);
}

double f1(const ConfusionCounts& c) {
    const double p = precision(c), r = recall(c);
    return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r);
}

namespace {

/// TP/FP flags for predictions taken in global descending-score order
/// (input order on ties), matching within a frame.
std::vector<bool> greedy_match(std::span<const std::int64_t> pred_frames,
                               std::span<const geom::FaceBox> preds,
                               std::span<const std::int64_t> truth_frames,
                               std::span<const geom::FaceBox> truths, double iou_threshold,
                               std::vector<std::size_t>& order) {
    order.resize(preds.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return preds[a].score > preds[b].score;
    });

    std::vector<bool> truth_used(truths.size(), false);
    std::vector<bool> is_tp(preds.size(), false);
    for (std::size_t rank = 0; rank < order.size(); ++rank) {
        const std::size_t pi = order[rank];
        double best = 0.0;
        std::size_t best_t = truths.size();
        for (std::size_t ti = 0; ti < truths.size(); ++ti) {
            if (truth_used[ti] || truth_frames[ti] != pred_frames[pi]) continue;
            const double v = geom::iou(preds[pi], truths[ti]);
            if (v >= iou_threshold && v > best) {  // ties keep the lowest truth index
                best = v;
                best_t = ti;
            }
        }
        if (best_t < truths.size()) {
            truth_used[best_t] = true;
            is_tp[rank] = true;
        }
    }
    return is_tp;
}

/// Area under the all-points-interpolated PR curve.
double ap_from_flags(const std::vector<bool>& is_tp, std::size_t n_truth) {
    if (n_truth == 0) return is_tp.empty() ? 1.0 : 0.0;
    if (is_tp.empty()) return 0.0;

    const std::size_t n = is_tp.size();
    std::vector<double> prec(n), rec(n);
    std::size_t tp = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (is_tp[i]) ++tp;
        prec[i] = static_cast<double>(tp) / static_cast<double>(i + 1);
        rec[i] = static_cast<double>(tp) / static_cast<double>(n_truth);
    }
    // Running max from the right makes precision monotone, then integrate
    // over recall increments.
    for (std::size_t i = n - 1; i-- > 0;) prec[i] = std::max(prec[i], prec[i + 1]);
    double ap = 0.0;
    double prev_rec = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        ap += (rec[i] - prev_rec) * prec[i];
        prev_rec = rec[i];
    }
    return ap;
}

}  // namespace

double average_precision(std::span<const geom::FaceBox> preds,
                         std::span<const geom::FaceBox> truths, double iou_threshold) {
    const std::vector<std::int64_t> pf(preds.size(), 0), tf(truths.size(), 0);
    std::vector<std::size_t> order;
    return ap_from_flags(greedy_match(pf, preds, tf, truths, iou_threshold, order), truths.size());
}

double average_precision_frames(std::span<const std::int64_t> pred_frames,
                                std::span<const geom::FaceBox> preds,
                                std::span<const std::int64_t> truth_frames,
                                std::span<const geom::FaceBox> truths, double iou_threshold) {
    if (pred_frames.size() != preds.size() || truth_frames.size() != truths.size())
        fail("DimensionMismatch", "frame id count must match box count");
    std::vector<std::size_t> order;
    return ap_from_flags(greedy_match(pred_frames, preds, truth_frames, truths, iou_threshold, order),
                         truths.size());
}

double landmark_nrmse(const geom::LandmarkSet& pred, const geom::LandmarkSet& truth) {
    const double interocular = geom::interocular_distance(truth);
    double total = 0.0;
    for (std::size_t i = 0; i < 68; ++i)
        total += std::hypot(pred[i].x - truth[i].x, pred[i].y - truth[i].y);
    return total / 68.0 / interocular;
}

PerLabelF1 per_label_f1(std::span<const std::string> pred_labels,
                        std::span<const std::string> true_labels,
                        std::span<const std::string> labels) {
    if (pred_labels.size() != true_labels.size())
        fail("LengthMismatch", "prediction and truth label counts differ");

    PerLabelF1 out;
    out.labels.assign(labels.begin(), labels.end());
    out.counts.resize(labels.size());
    for (std::size_t li = 0; li < labels.size(); ++li) {
        ConfusionCounts& c = out.counts[li];
        for (std::size_t i = 0; i < pred_labels.size(); ++i) {
            const bool p = pred_labels[i] == labels[li];
            const bool t = true_labels[i] == labels[li];
            if (p && t) ++c.tp;
            else if (p) ++c.fp;
            else if (t) ++c.fn;
            else ++c.tn;
        }
        out.f1.push_back(f1(c));
    }
    out.macro_average =
        std::accumulate(out.f1.begin(), out.f1.end(), 0.0) / static_cast<double>(out.f1.size());
    return out;
}

}  // namespace feat::metrics
