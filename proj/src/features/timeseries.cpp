#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "feat/features.hpp"
#include "feat/simd.hpp"

namespace feat::feats {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

/// Lower median of the finite values; NaN when none.
double lower_median(std::vector<double>& scratch) {
    if (scratch.empty()) return kNan;
    std::sort(scratch.begin(), scratch.end());
    return scratch[(scratch.size() - 1) / 2];
}

template <typename Fn>
void for_each_session(const fex::FexTable& table, Fn&& fn) {
    // Contiguous index runs per session label, first-occurrence order.
    std::vector<std::pair<std::string, std::vector<std::size_t>>> groups;
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        const auto& s = table.rows[i].session;
        auto it = std::find_if(groups.begin(), groups.end(),
                               [&](const auto& g) { return g.first == s; });
        if (it == groups.end()) {
            groups.emplace_back(s, std::vector<std::size_t>{});
            it = groups.end() - 1;
        }
        it->second.push_back(i);
    }
    for (auto& g : groups) fn(g.first, g.second);
}

}  // namespace

fex::FexTable baseline_normalize(const fex::FexTable& table, BaselineMode) {
    if (table.rows.empty()) fail("EmptySession", "table has no rows");
    fex::FexTable out = table;
    for_each_session(table, [&](const std::string&, const std::vector<std::size_t>& idx) {
        std::vector<double> scratch;
        auto apply = [&](auto member, std::size_t count) {
            for (std::size_t c = 0; c < count; ++c) {
                scratch.clear();
                for (std::size_t i : idx) {
                    const double v = (table.rows[i].*member)[c];
                    if (!std::isnan(v)) scratch.push_back(v);
                }
                const double med = lower_median(scratch);
                for (std::size_t i : idx) (out.rows[i].*member)[c] -= med;
            }
        };
        apply(&fex::FexRow::aus, fex::kNumAus);
        apply(&fex::FexRow::emotions, fex::kNumEmotions);
    });
    return out;
}

fex::FexTable baseline_normalize(const fex::FexTable& table, const fex::AUVector& baseline_aus,
                                 const fex::EmotionVector& baseline_emotions) {
    if (table.rows.empty()) fail("EmptySession", "table has no rows");
    fex::FexTable out = table;
    for (auto& row : out.rows) {
        for (std::size_t c = 0; c < fex::kNumAus; ++c) row.aus[c] -= baseline_aus[c];
        for (std::size_t c = 0; c < fex::kNumEmotions; ++c) row.emotions[c] -= baseline_emotions[c];
    }
    return out;
}

fex::FexTable summarize_sessions(const fex::FexTable& table, SessionStat stat) {
    fex::FexTable out;  // extra columns are not summarizable and are dropped
    for_each_session(table, [&](const std::string& session, const std::vector<std::size_t>& idx) {
        fex::FexRow row;
        row.frame = 0;
        row.time_s = table.rows[idx.front()].time_s;
        row.session = session;
        auto reduce = [&](auto member, std::size_t count) {
            for (std::size_t c = 0; c < count; ++c) {
                double acc = kNan;
                std::size_t n = 0;
                for (std::size_t i : idx) {
                    const double v = (table.rows[i].*member)[c];
                    if (std::isnan(v)) continue;
                    if (n == 0) {
                        acc = v;
                    } else {
                        switch (stat) {
                            case SessionStat::mean: acc += v; break;
                            case SessionStat::max: acc = std::max(acc, v); break;
                            case SessionStat::min: acc = std::min(acc, v); break;
                        }
                    }
                    ++n;
                }
                if (stat == SessionStat::mean && n > 0) acc /= static_cast<double>(n);
                (row.*member)[c] = acc;
            }
        };
        reduce(&fex::FexRow::facebox, fex::kNumFaceboxCols);
        reduce(&fex::FexRow::landmarks, fex::kNumLandmarkCols);
        reduce(&fex::FexRow::aus, fex::kNumAus);
        reduce(&fex::FexRow::emotions, fex::kNumEmotions);
        out.rows.push_back(std::move(row));
    });
    return out;
}

namespace {

struct Biquad {
    double b0, b1, b2, a1, a2;  // a0 normalized to 1

    void apply(std::vector<double>& x) const {
        double z1 = 0.0, z2 = 0.0;  // direct form II transposed
        for (double& v : x) {
            const double in = v;
            v = b0 * in + z1;
            z1 = b1 * in - a1 * v + z2;
            z2 = b2 * in - a2 * v;
        }
    }
};

// RBJ cookbook biquads with Butterworth Q = 1/sqrt(2).
Biquad butterworth_lowpass(double cutoff, double rate) {
    const double w0 = 2.0 * std::numbers::pi * cutoff / rate;
    const double alpha = std::sin(w0) / std::numbers::sqrt2;
    const double c = std::cos(w0);
    const double a0 = 1.0 + alpha;
    return {(1.0 - c) / 2.0 / a0, (1.0 - c) / a0, (1.0 - c) / 2.0 / a0, -2.0 * c / a0,
            (1.0 - alpha) / a0};
}

Biquad butterworth_highpass(double cutoff, double rate) {
    const double w0 = 2.0 * std::numbers::pi * cutoff / rate;
    const double alpha = std::sin(w0) / std::numbers::sqrt2;
    const double c = std::cos(w0);
    const double a0 = 1.0 + alpha;
    return {(1.0 + c) / 2.0 / a0, -(1.0 + c) / a0, (1.0 + c) / 2.0 / a0, -2.0 * c / a0,
            (1.0 - alpha) / a0};
}

void check_band(std::size_t n, double rate, double low, double high) {
    if (n < 8) fail("BadBand", "need at least 8 samples");
    if (!(low > 0.0 && low < high && high <= rate / 2.0))
        fail("BadBand", "band must satisfy 0 < low < high <= rate/2");
}

}  // namespace

std::vector<double> bandpass_filtfilt(std::span<const double> signal, double rate, double low,
                                      double high) {
    check_band(signal.size(), rate, low, high);
    const std::size_t n = signal.size();
    const std::size_t pad =
        std::min(n - 1, static_cast<std::size_t>(std::ceil(3.0 * rate / low)));

    // Odd reflection padding keeps startup transients out of the signal span.
    std::vector<double> x;
    x.reserve(n + 2 * pad);
    for (std::size_t i = pad; i >= 1; --i) x.push_back(2.0 * signal[0] - signal[i]);
    x.insert(x.end(), signal.begin(), signal.end());
    for (std::size_t i = 1; i <= pad; ++i) x.push_back(2.0 * signal[n - 1] - signal[n - 1 - i]);

    const Biquad hp = butterworth_highpass(low, rate);
    const Biquad lp = butterworth_lowpass(high, rate);
    hp.apply(x);
    lp.apply(x);
    std::reverse(x.begin(), x.end());
    hp.apply(x);
    lp.apply(x);
    std::reverse(x.begin(), x.end());

    return {x.begin() + static_cast<std::ptrdiff_t>(pad),
            x.begin() + static_cast<std::ptrdiff_t>(pad + n)};
}

namespace {

int count_upward_crossings(std::span<const double> y, double threshold) {
    int c = 0;
    for (std::size_t i = 1; i < y.size(); ++i)
        if (y[i - 1] <= threshold && y[i] > threshold) ++c;
    return c;
}

}  // namespace

std::vector<BandFeature> wavelet_band_features(std::span<const double> signal, double rate,
                                               std::span<const std::pair<double, double>> bands,
                                               double threshold) {
    std::vector<BandFeature> out;
    out.reserve(bands.size());
    for (const auto& [low, high] : bands) {
        const auto filtered = bandpass_filtfilt(signal, rate, low, high);
        BandFeature f;
        f.power = simd::sumsq(filtered.data(), filtered.size()) / static_cast<double>(filtered.size());
        f.crossings = count_upward_crossings(filtered, threshold);
        out.push_back(f);
    }
    return out;
}

std::vector<double> bag_of_temporal_filters(std::span<const double> signal, double rate,
                                            std::span<const std::pair<double, double>> bands,
                                            std::span<const double> thresholds) {
    std::vector<double> out;
    out.reserve(bands.size() * thresholds.size());
    for (const auto& [low, high] : bands) {
        const auto filtered = bandpass_filtfilt(signal, rate, low, high);
        for (double thr : thresholds)
            out.push_back(static_cast<double>(count_upward_crossings(filtered, thr)));
    }
    return out;
}

}  // namespace feat::feats
