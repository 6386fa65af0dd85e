#include "feat/synthetic.hpp"

#include <algorithm>
#include <cmath>

#include "feat/render.hpp"

namespace feat::synth {

namespace {

using geom::Point;

/// Hand-tuned displacement directions per AU (template units at full
/// activation), indexed like fex::kAuNames. Only plausibility matters; the
/// semantic anchors used by tests are AU01 (inner brows up), AU12 (mouth
/// corners up/out), AU15 (corners down), AU17 (chin/lower lip up),
/// AU43 (upper lids drop).
std::array<std::array<Point, 68>, fex::kNumAus> build_fields() {
    std::array<std::array<Point, 68>, fex::kNumAus> fields{};
    auto& f = fields;
    enum {
        AU01, AU02, AU04, AU05, AU06, AU07, AU09, AU10, AU12, AU14,
        AU15, AU17, AU18, AU20, AU23, AU24, AU25, AU26, AU28, AU43
    };

    // AU01 inner brow raiser: inner brow points up.
    f[AU01][20] = {0, -4};  f[AU01][21] = {0, -6};
    f[AU01][22] = {0, -6};  f[AU01][23] = {0, -4};
    // AU02 outer brow raiser.
    f[AU02][17] = {0, -6};  f[AU02][18] = {0, -4};
    f[AU02][25] = {0, -4};  f[AU02][26] = {0, -6};
    // AU04 brow lowerer: brows down and slightly inward.
    for (int i = 17; i <= 21; ++i) f[AU04][i] = {1.0, 5.0};
    for (int i = 22; i <= 26; ++i) f[AU04][i] = {-1.0, 5.0};
    // AU05 upper lid raiser.
    f[AU05][37] = {0, -3};  f[AU05][38] = {0, -3};
    f[AU05][43] = {0, -3};  f[AU05][44] = {0, -3};
    // AU06 cheek raiser: lower lids up, slight squint.
    f[AU06][40] = {0, -2.5};  f[AU06][41] = {0, -2.5};
    f[AU06][46] = {0, -2.5};  f[AU06][47] = {0, -2.5};
    // AU07 lid tightener: both lids toward the eye midline.
    f[AU07][37] = {0, 1.5};  f[AU07][38] = {0, 1.5};
    f[AU07][43] = {0, 1.5};  f[AU07][44] = {0, 1.5};
    f[AU07][40] = {0, -1.5}; f[AU07][41] = {0, -1.5};
    f[AU07][46] = {0, -1.5}; f[AU07][47] = {0, -1.5};
    // AU09 nose wrinkler: nose base up, inner brows slightly down.
    for (int i = 31; i <= 35; ++i) f[AU09][i] = {0, -3};
    f[AU09][21] = {0, 2};  f[AU09][22] = {0, 2};
    // AU10 upper lip raiser.
    f[AU10][50] = {0, -3};  f[AU10][51] = {0, -3.5};  f[AU10][52] = {0, -3};
    f[AU10][61] = {0, -2};  f[AU10][62] = {0, -2.5};  f[AU10][63] = {0, -2};
    // AU12 lip corner puller: corners up and out.
    f[AU12][48] = {-6, -8};  f[AU12][54] = {6, -8};
    f[AU12][49] = {-3, -4};  f[AU12][53] = {3, -4};
    f[AU12][59] = {-3, -4};  f[AU12][55] = {3, -4};
    f[AU12][60] = {-4, -5};  f[AU12][64] = {4, -5};
    // AU14 dimpler: corners straight out.
    f[AU14][48] = {-4, 0};  f[AU14][54] = {4, 0};
    f[AU14][60] = {-3, 0};  f[AU14][64] = {3, 0};
    // AU15 lip corner depressor.
    f[AU15][48] = {-2, 6};  f[AU15][54] = {2, 6};
    f[AU15][49] = {-1, 3};  f[AU15][53] = {1, 3};
    f[AU15][60] = {-1, 4};  f[AU15][64] = {1, 4};
    // AU17 chin raiser: chin and lower lip up.
    f[AU17][7] = {0, -4};  f[AU17][8] = {0, -5};  f[AU17][9] = {0, -4};
    f[AU17][57] = {0, -3}; f[AU17][58] = {0, -2.5}; f[AU17][56] = {0, -2.5};
    f[AU17][65] = {0, -2}; f[AU17][66] = {0, -2.5}; f[AU17][67] = {0, -2};
    // AU18 lip pucker: corners inward.
    f[AU18][48] = {5, 0};  f[AU18][54] = {-5, 0};
    f[AU18][49] = {3, 0};  f[AU18][53] = {-3, 0};
    f[AU18][60] = {4, 0};  f[AU18][64] = {-4, 0};
    // AU20 lip stretcher: corners out and slightly down.
    f[AU20][48] = {-6, 1};  f[AU20][54] = {6, 1};
    f[AU20][59] = {-3, 1};  f[AU20][55] = {3, 1};
    // AU23 lip tightener: lips compress toward the mouth line.
    f[AU23][50] = {0, 1.5};  f[AU23][51] = {0, 1.5};  f[AU23][52] = {0, 1.5};
    f[AU23][56] = {0, -1.5}; f[AU23][57] = {0, -1.5}; f[AU23][58] = {0, -1.5};
    // AU24 lip pressor.
    f[AU24][61] = {0, 1.5};  f[AU24][62] = {0, 1.5};  f[AU24][63] = {0, 1.5};
    f[AU24][65] = {0, -1.5}; f[AU24][66] = {0, -1.5}; f[AU24][67] = {0, -1.5};
    // AU25 lips part: inner lips separate.
    f[AU25][61] = {0, -2};  f[AU25][62] = {0, -2.5};  f[AU25][63] = {0, -2};
    f[AU25][65] = {0, 3};   f[AU25][66] = {0, 3.5};   f[AU25][67] = {0, 3};
    // AU26 jaw drop: jaw and lower lip down.
    for (int i = 6; i <= 10; ++i) f[AU26][i] = {0, 8};
    f[AU26][55] = {0, 5};  f[AU26][56] = {0, 6};  f[AU26][57] = {0, 6.5};
    f[AU26][58] = {0, 6};  f[AU26][59] = {0, 5};
    f[AU26][65] = {0, 5};  f[AU26][66] = {0, 5.5}; f[AU26][67] = {0, 5};
    // AU28 lip suck: both lips toward the mouth line, slightly inward.
    f[AU28][50] = {0, 2};  f[AU28][51] = {0, 2};  f[AU28][52] = {0, 2};
    f[AU28][56] = {0, -2}; f[AU28][57] = {0, -2}; f[AU28][58] = {0, -2};
    // AU43 eye closer: upper lids drop to the lower lids.
    f[AU43][37] = {0, 4.5};  f[AU43][38] = {0, 4.5};
    f[AU43][43] = {0, 4.5};  f[AU43][44] = {0, 4.5};
    f[AU43][40] = {0, -1};   f[AU43][41] = {0, -1};
    f[AU43][46] = {0, -1};   f[AU43][47] = {0, -1};
    return fields;
}

}  // namespace

const std::array<Point, 68>& displacement_field(std::size_t au_index) {
    static const auto fields = build_fields();
    return fields[au_index];
}

geom::LandmarkSet displaced_landmarks(const fex::AUVector& aus) {
    geom::LandmarkSet lm = geom::neutral_template();
    for (std::size_t a = 0; a < fex::kNumAus; ++a) {
        const double w = std::isnan(aus[a]) ? 0.0 : aus[a];
        if (w == 0.0) continue;
        const auto& field = displacement_field(a);
        for (std::size_t i = 0; i < 68; ++i) {
            lm[i].x += w * field[i].x;
            lm[i].y += w * field[i].y;
        }
    }
    return lm;
}

geom::LandmarkSet landmarks_in_image(const geom::LandmarkSet& lm, int size) {
    // Interocular 100 (template units) -> 0.4 * size px, face centered.
    const double s = 0.4 * size / 100.0;
    geom::LandmarkSet out;
    for (std::size_t i = 0; i < 68; ++i)
        out[i] = {lm[i].x * s + size / 2.0, lm[i].y * s + size / 2.0};
    return out;
}

feats::GrayImage face_image(const geom::LandmarkSet& image_landmarks, int size) {
    feats::GrayImage img(size, size, 0.92);  // light background

    // Distance-based anti-aliasing against each stroke segment.
    auto draw_segment = [&](Point a, Point b, double half_width) {
        const int x0 = std::max(0, static_cast<int>(std::floor(std::min(a.x, b.x) - half_width - 1.0)));
        const int x1 = std::min(size - 1, static_cast<int>(std::ceil(std::max(a.x, b.x) + half_width + 1.0)));
        const int y0 = std::max(0, static_cast<int>(std::floor(std::min(a.y, b.y) - half_width - 1.0)));
        const int y1 = std::min(size - 1, static_cast<int>(std::ceil(std::max(a.y, b.y) + half_width + 1.0)));
        const double abx = b.x - a.x, aby = b.y - a.y;
        const double len2 = abx * abx + aby * aby;
        for (int y = y0; y <= y1; ++y) {
            for (int x = x0; x <= x1; ++x) {
                const double px = x + 0.5 - a.x, py = y + 0.5 - a.y;
                const double t = len2 > 0.0 ? std::clamp((px * abx + py * aby) / len2, 0.0, 1.0) : 0.0;
                const double dx = px - t * abx, dy = py - t * aby;
                const double dist = std::hypot(dx, dy);
                // 1px soft edge beyond the core width.
                const double cov = std::clamp(half_width + 0.5 - dist, 0.0, 1.0);
                if (cov > 0.0) {
                    double& p = img.at(x, y);
                    p = std::min(p, 0.92 - cov * 0.80);
                }
            }
        }
    };

    for (const auto& stroke : render::face_strokes()) {
        for (const auto& [lo, hi] : stroke.segments_range) {
            for (int i = lo; i < hi; ++i)
                draw_segment(image_landmarks[i], image_landmarks[i + 1], 0.9);
            if (stroke.closed)
                draw_segment(image_landmarks[hi], image_landmarks[lo], 0.9);
        }
    }
    return img;
}

SyntheticFace make_face(const fex::AUVector& aus, int size) {
    const geom::LandmarkSet lm = landmarks_in_image(displaced_landmarks(aus), size);
    return {face_image(lm, size), lm};
}

VizTrainingSet make_viz_training_set(std::size_t n, std::uint64_t seed) {
    SplitMix64 rng(seed);
    VizTrainingSet set;
    set.aus = Matrix(n, fex::kNumAus);
    set.landmarks = Matrix(n, 136);
    for (std::size_t r = 0; r < n; ++r) {
        fex::AUVector aus{};
        for (std::size_t a = 0; a < fex::kNumAus; ++a) {
            // Sparse activations: most AUs off in any one sample.
            const double v = rng.next_double() < 0.3 ? rng.next_double() : 0.0;
            aus[a] = v;
            set.aus(r, a) = v;
        }
        const auto flat = displaced_landmarks(aus).flat();
        std::copy(flat.begin(), flat.end(), set.landmarks.row(r).data());
    }
    return set;
}

}  // namespace feat::synth
