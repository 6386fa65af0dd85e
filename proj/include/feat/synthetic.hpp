#pragma once

#include <array>

#include "feat/features.hpp"
#include "feat/fexdata.hpp"
#include "feat/geometry.hpp"

// Procedural fixture generator: a parametric AU-to-landmark displacement
// model over the neutral template, and a sketch-stroke renderer producing
// grayscale face images. Everything here is deterministic, so every fixture
// in the test suite and the demo data can be regenerated from code.

namespace feat::synth {

/// Per-AU 68-point displacement at activation 1.0, template coordinates.
const std::array<geom::Point, 68>& displacement_field(std::size_t au_index);

/// neutral template + sum of au[i] * displacement_field(i).
geom::LandmarkSet displaced_landmarks(const fex::AUVector& aus);

/// Landmarks mapped into a size x size image (same mapping the renderer
/// uses: template interocular 100 -> 0.4 * size).
geom::LandmarkSet landmarks_in_image(const geom::LandmarkSet& lm, int size);

/// Anti-aliased dark sketch strokes on a light background.
feats::GrayImage face_image(const geom::LandmarkSet& image_landmarks, int size);

/// Convenience: activation vector -> rendered image + its landmarks.
struct SyntheticFace {
    feats::GrayImage image;
    geom::LandmarkSet landmarks;
};
SyntheticFace make_face(const fex::AUVector& aus, int size);

/// Random AU activations with landmarks from the displacement model; the
/// training corpus for the PLS visualization model.
struct VizTrainingSet {
    Matrix aus;        // n x 20
    Matrix landmarks;  // n x 136
};
VizTrainingSet make_viz_training_set(std::size_t n, std::uint64_t seed);

}  // namespace feat::synth
