#include <cmath>
#include <doctest.h>
#include <fstream>
#include <sstream>

#include "feat/render.hpp"
#include "feat/synthetic.hpp"
#include "support/xml_check.hpp"

using namespace feat;
using namespace feat::render;
using testsupport::count_occurrences;
using testsupport::xml_check;

namespace {

/// One shared visualization model trained on the synthetic displacement
/// corpus (the generator is exactly affine, so 20 components fit it).
const learn::TrainedModel& viz_model() {
    static const learn::TrainedModel model = [] {
        const auto set = synth::make_viz_training_set(400, 0x71aULL);
        return learn::fit_pls(set.aus, set.landmarks, 20);
    }();
    return model;
}

std::vector<double> rect_heights(const std::string& svg, const std::string& cls) {
    std::vector<double> heights;
    std::size_t pos = 0;
    while ((pos = svg.find("class=\"" + cls + "\"", pos)) != std::string::npos) {
        const std::size_t start = svg.rfind("<rect", pos);
        const std::size_t h = svg.find("height=\"", start);
        heights.push_back(std::stod(svg.substr(h + 8)));
        pos += 1;
    }
    return heights;
}

}  // namespace

TEST_SUITE_BEGIN("render");

TEST_CASE("zero AU vector returns the model intercept, which is the neutral face") {
    fex::AUVector zero{};
    const geom::LandmarkSet face = au_to_landmarks(viz_model(), zero);
    const auto& intercept = viz_model().pls.intercept;
    const auto flat = face.flat();
    for (std::size_t i = 0; i < 136; ++i) CHECK(flat[i] == intercept[i]);

    // The generator is affine, so the learned neutral is the template.
    const geom::LandmarkSet tmpl = geom::neutral_template();
    for (std::size_t i = 0; i < 68; ++i) {
        CHECK(face[i].x == doctest::Approx(tmpl[i].x).epsilon(1e-6));
        CHECK(face[i].y == doctest::Approx(tmpl[i].y).epsilon(1e-6));
    }
}

TEST_CASE("au_to_landmarks is affine: superposition within 1e-8") {
    SplitMix64 rng(1);
    fex::AUVector a{}, b{}, sum{};
    for (std::size_t i = 0; i < fex::kNumAus; ++i) {
        a[i] = rng.next_double() * 0.5;
        b[i] = rng.next_double() * 0.5;
        sum[i] = a[i] + b[i];
    }
    fex::AUVector zero{};
    const auto fa = au_to_landmarks(viz_model(), a).flat();
    const auto fb = au_to_landmarks(viz_model(), b).flat();
    const auto f0 = au_to_landmarks(viz_model(), zero).flat();
    const auto fs = au_to_landmarks(viz_model(), sum).flat();
    for (std::size_t i = 0; i < 136; ++i)
        CHECK(std::abs(fa[i] + fb[i] - f0[i] - fs[i]) <= 1e-8);
}

TEST_CASE("AU12 recovers the fixture displacement at the mouth corners") {
    fex::AUVector aus{};
    aus[8] = 1.0;  // AU12
    const geom::LandmarkSet face = au_to_landmarks(viz_model(), aus);
    const geom::LandmarkSet neutral = geom::neutral_template();
    const auto& field = synth::displacement_field(8);
    for (const int corner : {48, 54}) {
        const double dx = face[corner].x - neutral[corner].x;
        const double dy = face[corner].y - neutral[corner].y;
        const double ex = field[corner].x, ey = field[corner].y;
        const double err = std::hypot(dx - ex, dy - ey);
        CHECK(err <= 0.1 * std::hypot(ex, ey));  // within 10% magnitude
        CHECK(dy < 0.0);                         // corners move up
    }
}

TEST_CASE("neutral face renders as exactly 8 path elements of well-formed XML") {
    fex::AUVector zero{};
    const FaceSketch sketch{au_to_landmarks(viz_model(), zero)};
    const std::string svg = render_face(sketch, {}, 400);
    CHECK(xml_check(svg).empty());
    CHECK(count_occurrences(svg, "<path") == 8);
    CHECK(count_occurrences(svg, "<line") == 0);
}

TEST_CASE("identical input renders byte-identical output") {
    fex::AUVector aus{};
    aus[0] = 0.4;
    aus[8] = 0.9;
    const FaceSketch sketch{au_to_landmarks(viz_model(), aus)};
    Overlays ov;
    ov.vector_field_from = au_to_landmarks(viz_model(), fex::AUVector{});
    CHECK(render_face(sketch, ov, 400) == render_face(sketch, ov, 400));
}

TEST_CASE("zero-displacement vector field draws no arrows") {
    fex::AUVector zero{};
    const geom::LandmarkSet neutral = au_to_landmarks(viz_model(), zero);
    Overlays ov;
    ov.vector_field_from = neutral;
    const std::string svg = render_face({neutral}, ov, 400);
    CHECK(count_occurrences(svg, "<line") == 0);
    CHECK(count_occurrences(svg, "arrowhead") == 0);

    fex::AUVector aus{};
    aus[8] = 1.0;
    const std::string moved = render_face({au_to_landmarks(viz_model(), aus)}, ov, 400);
    CHECK(count_occurrences(moved, "<line") > 0);
}

TEST_CASE("heat overlay recolors strokes through the fixed ramp") {
    CHECK(heat_color(0.0) == "#1f3bbf");
    CHECK(heat_color(1.0) == "#cc1a1f");
    fex::AUVector zero{};
    const geom::LandmarkSet neutral = au_to_landmarks(viz_model(), zero);
    Overlays ov;
    std::array<double, 68> heat{};
    heat.fill(1.0);
    ov.heat = heat;
    const std::string svg = render_face({neutral}, ov, 400);
    CHECK(xml_check(svg).empty());
    CHECK(count_occurrences(svg, heat_color(1.0)) == 8);  // every stroke at full heat
}

TEST_CASE("plot_detections: facebox only gives one rectangle and no bars") {
    fex::FexRow row;
    row.facebox = {40.0, 50.0, 120.0, 140.0, 0.97};
    const std::string svg = plot_detections(row, nullptr);
    CHECK(xml_check(svg).empty());
    CHECK(count_occurrences(svg, "<rect") == 1);
    CHECK(count_occurrences(svg, "class=\"bar\"") == 0);
    CHECK(count_occurrences(svg, "class=\"facebox\"") == 1);
}

TEST_CASE("plot_detections: AU01 at 1.0 renders a full-height bar") {
    fex::FexRow row;
    row.aus[0] = 1.0;  // AU01
    row.aus[8] = 0.5;
    const std::string svg = plot_detections(row, nullptr);
    CHECK(xml_check(svg).empty());
    const auto heights = rect_heights(svg, "bar");
    REQUIRE(heights.size() == 2);
    CHECK(heights[0] == doctest::Approx(320.0));       // chart height
    CHECK(heights[1] == doctest::Approx(160.0).epsilon(0.005));  // proportional
}

TEST_CASE("bar heights are proportional to values within rasterization granularity") {
    fex::FexRow row;
    const double values[4] = {0.125, 0.25, 0.5, 1.0};
    row.aus[0] = values[0];
    row.aus[1] = values[1];
    row.aus[2] = values[2];
    row.aus[3] = values[3];
    const auto heights = rect_heights(plot_detections(row, nullptr), "bar");
    REQUIRE(heights.size() == 4);
    for (int i = 0; i < 4; ++i)
        CHECK(std::abs(heights[i] - values[i] * 320.0) <= 0.5);
}

TEST_CASE("plot_detections embeds the image and keeps landmarks when present") {
    const auto face = synth::make_face(fex::AUVector{}, 200);
    fex::FexRow row;
    const auto flat = face.landmarks.flat();
    std::copy(flat.begin(), flat.end(), row.landmarks.begin());
    row.facebox = {40.0, 40.0, 120.0, 120.0, 0.9};
    const std::string svg = plot_detections(row, &face.image);
    CHECK(xml_check(svg).empty());
    CHECK(count_occurrences(svg, "<image") == 1);
    CHECK(count_occurrences(svg, "data:image/png;base64,") == 1);
    CHECK(count_occurrences(svg, "class=\"landmark\"") == 68);
}

TEST_CASE("empty row is rejected") {
    CHECK_THROWS_AS(plot_detections(fex::FexRow{}, nullptr), FeatError);
}

TEST_CASE("plot_detections matches the reviewed golden file byte for byte") {
    fex::AUVector aus{};
    aus[0] = 0.8;   // AU01
    aus[8] = 0.35;  // AU12
    const auto face = synth::make_face(aus, 160);
    fex::FexRow row;
    row.frame = 3;
    row.time_s = 0.1;
    const auto flat = face.landmarks.flat();
    std::copy(flat.begin(), flat.end(), row.landmarks.begin());
    row.facebox = {30.0, 30.0, 100.0, 110.0, 0.88};
    row.aus = aus;
    for (std::size_t i = 0; i < fex::kNumEmotions; ++i)
        row.emotions[i] = 0.1 * static_cast<double>(i);
    const std::string svg = plot_detections(row, &face.image);

    std::ifstream golden(std::string(FEAT_SOURCE_DIR) + "/tests/golden/plot_detections.svg",
                         std::ios::binary);
    REQUIRE(golden.good());
    std::stringstream buf;
    buf << golden.rdbuf();
    CHECK(svg == buf.str());
}

TEST_CASE("coefficient faces: zero coefficients give two neutral faces") {
    learn::TrainedModel clf;
    clf.kind = learn::ModelKind::logistic;
    clf.label_names = {"0", "1"};
    clf.linear.push_back({std::vector<double>(20, 0.0), 0.0});
    const auto faces = coefficient_faces(clf, viz_model(), 1.0);
    fex::AUVector zero{};
    const std::string neutral =
        render_face({au_to_landmarks(viz_model(), zero)},
                    Overlays{au_to_landmarks(viz_model(), zero), std::nullopt}, 400);
    CHECK(faces.positive_svg == neutral);
    CHECK(faces.negative_svg == neutral);
    CHECK(xml_check(faces.coefficient_chart_svg).empty());
    CHECK(count_occurrences(faces.coefficient_chart_svg, "class=\"bar\"") == 0);
}

TEST_CASE("single positive AU12 coefficient passes through to the positive face") {
    learn::TrainedModel clf;
    clf.kind = learn::ModelKind::logistic;
    clf.label_names = {"0", "1"};
    std::vector<double> w(20, 0.0);
    w[8] = 1.0;  // AU12
    clf.linear.push_back({w, 0.0});
    const auto faces = coefficient_faces(clf, viz_model(), 1.0);

    fex::AUVector aus{};
    aus[8] = 1.0;
    fex::AUVector zero{};
    Overlays ov;
    ov.vector_field_from = au_to_landmarks(viz_model(), zero);
    CHECK(faces.positive_svg == render_face({au_to_landmarks(viz_model(), aus)}, ov, 400));
    CHECK(faces.negative_svg == render_face({au_to_landmarks(viz_model(), zero)}, ov, 400));
    // Positive bars red, negative blue.
    CHECK(count_occurrences(faces.coefficient_chart_svg, "#d62728") == 1);
    CHECK(count_occurrences(faces.coefficient_chart_svg, "#1f77b4") == 0);
}

TEST_CASE("good/bad fixture: positive-face mouth corners sit higher than negative") {
    learn::TrainedModel clf;
    clf.kind = learn::ModelKind::logistic;
    clf.label_names = {"bad", "good"};
    std::vector<double> w(20, 0.0);
    w[8] = 0.9;   // AU12 up for the positive class
    w[11] = 0.5;  // AU17
    w[0] = -0.7;  // AU01 for the negative class
    clf.linear.push_back({w, 0.0});
    const auto faces = coefficient_faces(clf, viz_model(), 1.0);

    fex::AUVector pos{}, neg{};
    for (std::size_t i = 0; i < 20; ++i) {
        pos[i] = std::clamp(w[i], 0.0, 1.0);
        neg[i] = std::clamp(-w[i], 0.0, 1.0);
    }
    const geom::LandmarkSet pos_face = au_to_landmarks(viz_model(), pos);
    const geom::LandmarkSet neg_face = au_to_landmarks(viz_model(), neg);
    CHECK(pos_face[48].y < neg_face[48].y);  // smaller y = higher in the image
    CHECK(pos_face[54].y < neg_face[54].y);
}

TEST_CASE("dimension mismatches are rejected") {
    learn::TrainedModel clf;
    clf.kind = learn::ModelKind::logistic;
    clf.linear.push_back({std::vector<double>(7, 0.0), 0.0});
    CHECK_THROWS_AS(coefficient_faces(clf, viz_model(), 1.0), FeatError);
    learn::TrainedModel not_pls;
    not_pls.kind = learn::ModelKind::logistic;
    CHECK_THROWS_AS(au_to_landmarks(not_pls, fex::AUVector{}), FeatError);
}

TEST_SUITE_END();
