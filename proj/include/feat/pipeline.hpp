#pragma once

#include <array>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "feat/features.hpp"
#include "feat/fexdata.hpp"
#include "feat/geometry.hpp"
#include "feat/learn.hpp"
#include "feat/stats.hpp"

namespace feat::pipeline {

struct ExtractionConfig {
    int crop = 112;  // with the default HOG config this yields 5,408 features
    feats::HogConfig hog;
    double pca_retain = 0.95;
    bool include_landmarks = true;

    friend bool operator==(const ExtractionConfig&, const ExtractionConfig&) = default;
};

/// The neutral template mapped into crop coordinates (interocular
/// 100 template units -> 0.4 * crop px, centered).
geom::LandmarkSet template_in_crop(int crop);

/// Inverse-mapped bilinear warp with edge clamping of the full image into
/// crop x crop output coordinates under the given similarity.
feats::GrayImage warp_to_crop(const feats::GrayImage& img, const geom::SimilarityTransform& to_crop,
                              int crop);

/// Align landmarks to the in-crop template, warp the image by the same
/// similarity, mask with the brow-shifted convex hull, compute HOG,
/// optionally PCA-project, optionally append the 136 aligned coordinates.
feats::FeatureVector extract_features(const feats::GrayImage& img, const geom::LandmarkSet& lm,
                                      const ExtractionConfig& cfg,
                                      const feats::PcaModel* pca = nullptr);

/// The two raw extraction products before PCA/concatenation; lets callers
/// fit a PCA on a whole corpus of HOG blocks first.
struct ExtractedParts {
    std::vector<double> hog;
    std::array<double, 136> aligned_landmarks;
};
ExtractedParts extract_parts(const feats::GrayImage& img, const geom::LandmarkSet& lm,
                             const ExtractionConfig& cfg);

/// Compose a feature vector from raw parts under the same rules as
/// extract_features.
feats::FeatureVector compose_features(const ExtractedParts& parts, const ExtractionConfig& cfg,
                                      const feats::PcaModel* pca);

/// One model slot per AU (kAuNames order); empty slots produce NaN columns.
using AuModelSet = std::array<std::optional<learn::TrainedModel>, fex::kNumAus>;

/// Batch AU detection: one FexRow per input image with 20 probability
/// columns. All present models must carry identical pipeline metadata.
fex::FexTable detect_aus(std::span<const feats::GrayImage> images,
                         std::span<const geom::LandmarkSet> landmarks, const AuModelSet& models);

struct ReplicateReport {
    std::vector<std::string> conditions;  // sorted; conditions[1] is the positive class
    std::size_t n_sessions = 0;
    double df = 0.0;
    /// Per AU: t is positive when the AU is higher in the positive condition.
    std::array<stats::TTestResult, fex::kNumAus> ttests;
    double logo_accuracy = 0.0;
    std::array<double, fex::kNumAus> coefficients{};
    double intercept = 0.0;

    std::string to_json() const;
};

/// The evaluation workflow: session means, per-AU two-sample t-tests across
/// conditions, leave-one-session-out logistic classification, and all-data
/// logistic coefficients.
ReplicateReport replicate_goodnews(const fex::FexTable& table,
                                   const std::map<std::string, std::string>& condition_of_session);

/// Order-stable parallel map: fn(i) for i in [0, n), jobs threads.
void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn);

}  // namespace feat::pipeline
