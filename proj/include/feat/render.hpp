#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "feat/fexdata.hpp"
#include "feat/features.hpp"
#include "feat/geometry.hpp"
#include "feat/learn.hpp"

// SVG rendering of stylized faces, AU-driven face generation through the PLS
// visualization model, detection overlays, and bar charts. All output is
// byte-deterministic: floats at 4 decimals, no timestamps.

namespace feat::render {

/// Fixed sketch topology over the 68 landmarks. The nose (bridge + base) is
/// one stroke group drawn as a two-subpath path, so a face is exactly
/// 8 path elements.
struct Stroke {
    const char* name;
    std::vector<std::array<int, 2>> segments_range;  // inclusive index ranges
    bool closed;
};

const std::vector<Stroke>& face_strokes();

struct FaceSketch {
    geom::LandmarkSet landmarks;
};

struct Overlays {
    /// Neutral landmarks; arrows are drawn neutral -> current per landmark.
    std::optional<geom::LandmarkSet> vector_field_from;
    /// Per-landmark heat values mapping stroke colors onto a fixed 5-stop
    /// blue->red ramp over [0, max].
    std::optional<std::array<double, 68>> heat;
};

/// Landmarks predicted from a 20-dim AU vector by the PLS visualization
/// model; the zero vector returns the model's mean (neutral) face.
geom::LandmarkSet au_to_landmarks(const learn::TrainedModel& model, const fex::AUVector& aus);

std::string render_face(const FaceSketch& sketch, const Overlays& overlays, int size);

/// Composite overlay: optional embedded image, facebox rectangle, landmark
/// dots, AU bar chart, emotion bar chart.
std::string plot_detections(const fex::FexRow& row, const feats::GrayImage* image);

struct CoefficientFaces {
    std::string positive_svg;
    std::string negative_svg;
    std::string coefficient_chart_svg;  // positive bars red, negative blue
};

/// Faces generated from a 20-dim classifier coefficient vector:
/// positive face = au_to_landmarks(clamp(+scale*coef, 0, 1)) and the
/// negative face from the negated coefficients.
CoefficientFaces coefficient_faces(const learn::TrainedModel& classifier,
                                   const learn::TrainedModel& viz, double scale);

/// 5-stop blue->red ramp, t in [0,1], as "#rrggbb".
std::string heat_color(double t);

}  // namespace feat::render
