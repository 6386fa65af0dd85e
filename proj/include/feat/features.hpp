#pragma once

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "feat/common.hpp"
#include "feat/fexdata.hpp"
#include "feat/geometry.hpp"

namespace feat::feats {

struct GrayImage {
    int width = 0;
    int height = 0;
    std::vector<double> pixels;  // row-major luminance in [0,1]

    GrayImage() = default;
    GrayImage(int w, int h, double fill = 0.0)
        : width(w), height(h), pixels(static_cast<std::size_t>(w) * h, fill) {}

    double at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * width + x]; }
    double& at(int x, int y) { return pixels[static_cast<std::size_t>(y) * width + x]; }
};

struct HogConfig {
    int orientations = 8;
    int cell = 8;          // px per cell side
    int block = 2;         // cells per block side
    int block_stride = 1;  // cells
    bool signed_gradients = false;

    /// Closed-form descriptor length for a cell-divisible image.
    std::size_t feature_length(int width, int height) const;

    friend bool operator==(const HogConfig&, const HogConfig&) = default;
};

enum class Provenance { hog, hog_pca, landmarks_hog };

struct FeatureVector {
    std::vector<double> values;
    Provenance provenance = Provenance::hog;
};

/// HOG descriptor: centered-difference gradients (replicated borders),
/// magnitude votes split linearly between the two nearest orientation bins,
/// per-block L2 normalization with eps = 1e-12. An optional mask zeroes
/// pixels outside it before gradients are taken.
std::vector<double> hog(const GrayImage& img, const geom::Mask* mask, const HogConfig& cfg);

struct PcaModel {
    std::vector<double> mean;
    Matrix components;  // k x d, orthonormal rows
    std::vector<double> explained_variance_ratio;

    std::size_t k() const { return components.rows(); }
    std::size_t dim() const { return mean.size(); }

    friend bool operator==(const PcaModel&, const PcaModel&) = default;
};

/// SVD of the centered matrix; keeps the smallest k whose cumulative
/// explained variance reaches `retain`.
PcaModel fit_pca(const Matrix& X, double retain);

/// (X - mean) * components^T
Matrix pca_transform(const PcaModel& model, const Matrix& X);

/// scores * components + mean
Matrix pca_inverse_transform(const PcaModel& model, const Matrix& scores);

enum class BaselineMode { median };
enum class SessionStat { mean, max, min };

/// Per-session, per-column subtraction of the session median over the AU and
/// emotion columns. NaNs are ignored by the median and propagate through the
/// subtraction. Even-length sessions use the lower median.
fex::FexTable baseline_normalize(const fex::FexTable& table, BaselineMode mode);

/// Subtract an externally recorded baseline row (AU + emotion values) from
/// every row of the table.
fex::FexTable baseline_normalize(const fex::FexTable& table, const fex::AUVector& baseline_aus,
                                 const fex::EmotionVector& baseline_emotions);

/// One row per session: per-column statistic with NaN skipping; frame is 0,
/// time_s the session start.
fex::FexTable summarize_sessions(const fex::FexTable& table, SessionStat stat);

struct BandFeature {
    double power = 0.0;  // mean squared filtered amplitude
    int crossings = 0;   // upward crossings of +threshold
};

/// Zero-phase band-pass per band (forward-backward 2nd-order Butterworth
/// high-pass at `low` cascaded with low-pass at `high`), then power and
/// threshold-crossing counts of the filtered signal.
std::vector<BandFeature> wavelet_band_features(std::span<const double> signal, double rate,
                                               std::span<const std::pair<double, double>> bands,
                                               double threshold);

/// The filtered signal itself, for spectral-attenuation checks.
std::vector<double> bandpass_filtfilt(std::span<const double> signal, double rate, double low,
                                      double high);

/// Crossing counts over the bands x thresholds grid (row-major: all
/// thresholds of band 0, then band 1, ...).
std::vector<double> bag_of_temporal_filters(std::span<const double> signal, double rate,
                                            std::span<const std::pair<double, double>> bands,
                                            std::span<const double> thresholds);

}  // namespace feat::feats
