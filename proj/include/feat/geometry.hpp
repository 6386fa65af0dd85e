#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "feat/common.hpp"

// Landmark geometry for the 68-point iBUG scheme (0-16 jaw, 17-26 brows,
// 27-35 nose, 36-47 eyes, 48-67 mouth). Image convention: y grows downward.

namespace feat::geom {

struct Point {
    double x = 0.0;
    double y = 0.0;
    friend bool operator==(const Point&, const Point&) = default;
};

struct LandmarkSet {
    std::array<Point, 68> pts{};

    Point& operator[](std::size_t i) { return pts[i]; }
    const Point& operator[](std::size_t i) const { return pts[i]; }

    bool all_finite() const;
    /// Flat view x_0..x_67, y_0..y_67 (Fex CSV column order).
    std::array<double, 136> flat() const;
    static LandmarkSet from_flat(std::span<const double> v);
};

struct FaceBox {
    double x = 0.0;
    double y = 0.0;
    double width = 0.0;
    double height = 0.0;
    double score = 1.0;
};

/// p -> scale * R(rotation) * p + (tx, ty)
struct SimilarityTransform {
    double scale = 1.0;
    double rotation = 0.0;  // radians
    double tx = 0.0;
    double ty = 0.0;

    Point apply(Point p) const;
    LandmarkSet apply(const LandmarkSet& lm) const;
    SimilarityTransform inverse() const;
};

struct SimilarityFit {
    SimilarityTransform transform;
    double residual_rms = 0.0;
};

/// Distance between the outer eye corners (landmarks 36 and 45).
double interocular_distance(const LandmarkSet& lm);

/// Least-squares similarity minimizing sum ||T(src_i) - dst_i||^2.
SimilarityFit fit_similarity(const LandmarkSet& src, const LandmarkSet& dst);

LandmarkSet align_to_template(const LandmarkSet& lm, const LandmarkSet& tmpl);

/// Counter-clockwise hull (in standard x-right/y-up orientation), collinear
/// interior points dropped. Needs >= 3 non-collinear input points.
std::vector<Point> convex_hull(std::span<const Point> points);

struct Mask {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> on;  // row-major 0/1

    std::uint8_t at(int x, int y) const { return on[static_cast<std::size_t>(y) * width + x]; }
    std::size_t count() const;
};

/// Convex-hull face mask over all 68 landmarks plus the brow points shifted
/// up by 1.5x the per-side mean brow-to-upper-eyelid distance. A pixel is on
/// when its center lies inside or on the hull.
Mask face_mask(const LandmarkSet& lm, int width, int height);

/// Brow points 17-26 with the 1.5x upward shift applied (the extra hull
/// points used by face_mask); exposed for the mask monotonicity test.
std::array<Point, 10> shifted_brows(const LandmarkSet& lm);

double iou(const FaceBox& a, const FaceBox& b);

/// Built-in neutral template: centered at the origin, interocular 100 px.
/// Identical to data/neutral_template.csv shipped with the repo.
const LandmarkSet& neutral_template();

/// Read a 68-line "x,y" CSV (the neutral_template.csv format).
LandmarkSet read_landmark_csv(const std::string& path);

}  // namespace feat::geom
