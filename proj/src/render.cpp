#include "feat/render.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <sstream>

#include "feat/image_io.hpp"

namespace feat::render {

namespace {

/// Fixed 4-decimal float formatting keeps SVG output byte-identical.
std::string f4(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.4f", v);
    // Avoid the "-0.0000" / "0.0000" split for the same geometric point.
    if (std::strcmp(buf, "-0.0000") == 0) return "0.0000";
    return buf;
}

struct Svg {
    std::ostringstream out;

    Svg(int w, int h) {
        out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
            << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
            << "\" viewBox=\"0 0 " << w << ' ' << h << "\">\n";
    }

    std::string finish() {
        out << "</svg>\n";
        return out.str();
    }
};

/// Template coordinates (origin-centered, ~+-80) to canvas pixels.
geom::Point to_canvas(geom::Point p, int size) {
    const double s = size / 280.0;
    return {p.x * s + size / 2.0, p.y * s + size / 2.0};
}

}  // namespace

const std::vector<Stroke>& face_strokes() {
    static const std::vector<Stroke> strokes = {
        {"jaw", {{0, 16}}, false},        {"brow_left", {{17, 21}}, false},
        {"brow_right", {{22, 26}}, false}, {"nose", {{27, 30}, {31, 35}}, false},
        {"eye_left", {{36, 41}}, true},   {"eye_right", {{42, 47}}, true},
        {"lip_outer", {{48, 59}}, true},  {"lip_inner", {{60, 67}}, true},
    };
    return strokes;
}

std::string heat_color(double t) {
    // 5-stop blue -> red ramp.
    static constexpr double stops[5][3] = {{0.12, 0.23, 0.75},
                                           {0.30, 0.55, 0.90},
                                           {0.85, 0.85, 0.85},
                                           {0.95, 0.55, 0.30},
                                           {0.80, 0.10, 0.12}};
    t = std::clamp(t, 0.0, 1.0);
    const double pos = t * 4.0;
    int i = static_cast<int>(pos);
    double frac = pos - i;
    if (i >= 4) {  // exact top stop, no lerp round-off
        i = 4;
        frac = 0.0;
    }
    const int j = std::min(i + 1, 4);
    char buf[8];
    std::snprintf(buf, sizeof(buf), "#%02x%02x%02x",
                  static_cast<int>(std::lround(255.0 * (stops[i][0] + frac * (stops[j][0] - stops[i][0])))),
                  static_cast<int>(std::lround(255.0 * (stops[i][1] + frac * (stops[j][1] - stops[i][1])))),
                  static_cast<int>(std::lround(255.0 * (stops[i][2] + frac * (stops[j][2] - stops[i][2])))));
    return buf;
}

geom::LandmarkSet au_to_landmarks(const learn::TrainedModel& model, const fex::AUVector& aus) {
    if (model.kind != learn::ModelKind::pls)
        fail("DimensionMismatch", "visualization model must be a pls model");
    if (model.pls.coef.rows() != fex::kNumAus || model.pls.coef.cols() != 136)
        fail("DimensionMismatch", "visualization model must map 20 AUs to 136 coordinates");
    Matrix x(1, fex::kNumAus);
    std::copy(aus.begin(), aus.end(), x.row(0).data());
    const Matrix y = learn::pls_predict(model, x);
    return geom::LandmarkSet::from_flat(y.row(0));
}

namespace {

void draw_strokes(Svg& svg, const geom::LandmarkSet& lm, int size,
                  const std::optional<std::array<double, 68>>& heat) {
    double heat_max = 0.0;
    if (heat)
        for (double v : *heat) heat_max = std::max(heat_max, v);

    for (const auto& stroke : face_strokes()) {
        std::string color = "#1a1a1a";
        if (heat) {
            double acc = 0.0;
            int cnt = 0;
            for (const auto& [lo, hi] : stroke.segments_range)
                for (int i = lo; i <= hi; ++i) {
                    acc += (*heat)[i];
                    ++cnt;
                }
            color = heat_color(heat_max > 0.0 ? acc / cnt / heat_max : 0.0);
        }
        svg.out << "<path d=\"";
        bool first_seg = true;
        for (const auto& [lo, hi] : stroke.segments_range) {
            for (int i = lo; i <= hi; ++i) {
                const geom::Point p = to_canvas(lm[i], size);
                svg.out << (i == lo ? (first_seg ? "M" : " M") : " L") << f4(p.x) << ' ' << f4(p.y);
            }
            if (stroke.closed) svg.out << " Z";
            first_seg = false;
        }
        svg.out << "\" fill=\"none\" stroke=\"" << color
                << "\" stroke-width=\"2\" stroke-linecap=\"round\" stroke-linejoin=\"round\"/>\n";
    }
}

}  // namespace

std::string render_face(const FaceSketch& sketch, const Overlays& overlays, int size) {
    Svg svg(size, size);
    svg.out << "<rect width=\"" << size << "\" height=\"" << size << "\" fill=\"#fbfbf8\"/>\n";
    draw_strokes(svg, sketch.landmarks, size, overlays.heat);

    if (overlays.vector_field_from) {
        const auto& base = *overlays.vector_field_from;
        for (int i = 0; i < 68; ++i) {
            const geom::Point a = to_canvas(base[i], size);
            const geom::Point b = to_canvas(sketch.landmarks[i], size);
            const double dx = b.x - a.x, dy = b.y - a.y;
            const double len = std::hypot(dx, dy);
            if (len < 1e-9) continue;  // zero-length arrows suppressed
            svg.out << "<line x1=\"" << f4(a.x) << "\" y1=\"" << f4(a.y) << "\" x2=\"" << f4(b.x)
                    << "\" y2=\"" << f4(b.y) << "\" stroke=\"#2e6fd6\" stroke-width=\"1.2\"/>\n";
            // Arrow head: two short back-strokes.
            const double ux = dx / len, uy = dy / len;
            const double hx = -uy, hy = ux;
            const double s = std::min(4.0, len * 0.5);
            svg.out << "<path d=\"M" << f4(b.x) << ' ' << f4(b.y) << " L"
                    << f4(b.x - s * ux + 0.5 * s * hx) << ' ' << f4(b.y - s * uy + 0.5 * s * hy)
                    << " M" << f4(b.x) << ' ' << f4(b.y) << " L"
                    << f4(b.x - s * ux - 0.5 * s * hx) << ' ' << f4(b.y - s * uy - 0.5 * s * hy)
                    << "\" fill=\"none\" stroke=\"#2e6fd6\" stroke-width=\"1.2\" class=\"arrowhead\"/>\n";
        }
    }
    return svg.finish();
}

namespace {

void bar_chart(Svg& svg, double x0, double y0, double w, double h, const std::string& title,
               std::span<const std::string> names, std::span<const double> values,
               const std::string& fill) {
    svg.out << "<text x=\"" << f4(x0) << "\" y=\"" << f4(y0 - 6.0)
            << "\" font-family=\"monospace\" font-size=\"12\">" << title << "</text>\n";
    svg.out << "<line x1=\"" << f4(x0) << "\" y1=\"" << f4(y0 + h) << "\" x2=\"" << f4(x0 + w)
            << "\" y2=\"" << f4(y0 + h) << "\" stroke=\"#555555\" stroke-width=\"1\"/>\n";
    const double slot = w / static_cast<double>(names.size());
    for (std::size_t i = 0; i < names.size(); ++i) {
        const double v = values[i];
        const double bx = x0 + slot * static_cast<double>(i) + slot * 0.15;
        if (!std::isnan(v)) {
            const double bh = std::clamp(v, 0.0, 1.0) * h;
            svg.out << "<rect x=\"" << f4(bx) << "\" y=\"" << f4(y0 + h - bh) << "\" width=\""
                    << f4(slot * 0.7) << "\" height=\"" << f4(bh) << "\" fill=\"" << fill
                    << "\" class=\"bar\"/>\n";
        }
        svg.out << "<text x=\"" << f4(bx + slot * 0.35) << "\" y=\"" << f4(y0 + h + 12.0)
                << "\" font-family=\"monospace\" font-size=\"7\" text-anchor=\"middle\">"
                << names[i] << "</text>\n";
    }
}

}  // namespace

std::string plot_detections(const fex::FexRow& row, const feats::GrayImage* image) {
    const bool any = row.has_facebox() || row.has_landmarks() ||
                     std::any_of(row.aus.begin(), row.aus.end(), [](double v) { return !std::isnan(v); }) ||
                     std::any_of(row.emotions.begin(), row.emotions.end(),
                                 [](double v) { return !std::isnan(v); });
    if (!any) fail("EmptyRow", "row has no populated group");

    constexpr int kW = 900, kH = 380;
    constexpr double panel_x = 20.0, panel_y = 30.0, panel = 320.0;
    Svg svg(kW, kH);

    // Image-panel transform: fit either the image bounds or the bounding box
    // of whatever geometry the row carries, padded 10%.
    double src_x = 0.0, src_y = 0.0, src_w = 1.0, src_h = 1.0;
    if (image) {
        src_w = image->width;
        src_h = image->height;
    } else {
        double lo_x = 1e300, lo_y = 1e300, hi_x = -1e300, hi_y = -1e300;
        auto grow = [&](double x, double y) {
            lo_x = std::min(lo_x, x);
            lo_y = std::min(lo_y, y);
            hi_x = std::max(hi_x, x);
            hi_y = std::max(hi_y, y);
        };
        if (const auto fb = row.facebox_or()) {
            grow(fb->x, fb->y);
            grow(fb->x + fb->width, fb->y + fb->height);
        }
        if (row.has_landmarks()) {
            const auto lm = row.landmarks_or();
            for (const auto& p : lm->pts) grow(p.x, p.y);
        }
        if (lo_x < hi_x && lo_y < hi_y) {
            const double pad_x = 0.1 * (hi_x - lo_x), pad_y = 0.1 * (hi_y - lo_y);
            src_x = lo_x - pad_x;
            src_y = lo_y - pad_y;
            src_w = hi_x - lo_x + 2.0 * pad_x;
            src_h = hi_y - lo_y + 2.0 * pad_y;
        }
    }
    const double fit = std::min(panel / src_w, panel / src_h);
    const double off_x = panel_x + (panel - src_w * fit) / 2.0;
    const double off_y = panel_y + (panel - src_h * fit) / 2.0;
    auto map_x = [&](double x) { return off_x + (x - src_x) * fit; };
    auto map_y = [&](double y) { return off_y + (y - src_y) * fit; };

    if (image) {
        svg.out << "<image x=\"" << f4(map_x(0.0)) << "\" y=\"" << f4(map_y(0.0)) << "\" width=\""
                << f4(image->width * fit) << "\" height=\"" << f4(image->height * fit)
                << "\" href=\"data:image/png;base64," << img::base64(img::encode_png(*image))
                << "\"/>\n";
    }
    if (const auto fb = row.facebox_or()) {
        svg.out << "<rect x=\"" << f4(map_x(fb->x)) << "\" y=\"" << f4(map_y(fb->y)) << "\" width=\""
                << f4(fb->width * fit) << "\" height=\"" << f4(fb->height * fit)
                << "\" fill=\"none\" stroke=\"#e3342f\" stroke-width=\"2\" class=\"facebox\"/>\n";
    }
    if (row.has_landmarks()) {
        const auto lm = row.landmarks_or();
        for (const auto& p : lm->pts)
            svg.out << "<circle cx=\"" << f4(map_x(p.x)) << "\" cy=\"" << f4(map_y(p.y))
                    << "\" r=\"1.6\" fill=\"#2e6fd6\" class=\"landmark\"/>\n";
    }

    if (std::any_of(row.aus.begin(), row.aus.end(), [](double v) { return !std::isnan(v); })) {
        std::vector<std::string> names(fex::kAuNames.begin(), fex::kAuNames.end());
        bar_chart(svg, 370.0, panel_y, 260.0, panel, "action units", names,
                  std::span<const double>(row.aus.data(), row.aus.size()), "#6b8e23");
    }
    if (std::any_of(row.emotions.begin(), row.emotions.end(),
                    [](double v) { return !std::isnan(v); })) {
        std::vector<std::string> names(fex::kEmotionNames.begin(), fex::kEmotionNames.end());
        bar_chart(svg, 660.0, panel_y, 220.0, panel, "emotions", names,
                  std::span<const double>(row.emotions.data(), row.emotions.size()), "#b8860b");
    }
    return svg.finish();
}

CoefficientFaces coefficient_faces(const learn::TrainedModel& classifier,
                                   const learn::TrainedModel& viz, double scale) {
    if (classifier.linear.empty() || classifier.linear[0].weights.size() != fex::kNumAus)
        fail("DimensionMismatch", "classifier must have 20 AU coefficients");
    const auto& coef = classifier.linear[0].weights;

    fex::AUVector pos{}, neg{};
    for (std::size_t i = 0; i < fex::kNumAus; ++i) {
        pos[i] = std::clamp(scale * coef[i], 0.0, 1.0);
        neg[i] = std::clamp(-scale * coef[i], 0.0, 1.0);
    }

    fex::AUVector zero{};
    const geom::LandmarkSet neutral = au_to_landmarks(viz, zero);

    CoefficientFaces out;
    Overlays overlays;
    overlays.vector_field_from = neutral;
    out.positive_svg = render_face({au_to_landmarks(viz, pos)}, overlays, 400);
    out.negative_svg = render_face({au_to_landmarks(viz, neg)}, overlays, 400);

    // Coefficient bar chart: positive red, negative blue, height ~ |coef|.
    double max_abs = 0.0;
    for (double c : coef) max_abs = std::max(max_abs, std::abs(c));
    constexpr int kW = 640, kH = 260;
    constexpr double x0 = 30.0, mid_y = 120.0, half = 90.0;
    Svg svg(kW, kH);
    svg.out << "<rect width=\"" << kW << "\" height=\"" << kH << "\" fill=\"#ffffff\"/>\n";
    svg.out << "<line x1=\"" << f4(x0) << "\" y1=\"" << f4(mid_y) << "\" x2=\"" << f4(x0 + 580.0)
            << "\" y2=\"" << f4(mid_y) << "\" stroke=\"#555555\" stroke-width=\"1\"/>\n";
    const double slot = 580.0 / fex::kNumAus;
    for (std::size_t i = 0; i < fex::kNumAus; ++i) {
        const double norm = max_abs > 0.0 ? coef[i] / max_abs : 0.0;
        const double bh = std::abs(norm) * half;
        const double bx = x0 + slot * static_cast<double>(i) + slot * 0.15;
        if (bh > 0.0) {
            svg.out << "<rect x=\"" << f4(bx) << "\" y=\"" << f4(norm > 0.0 ? mid_y - bh : mid_y)
                    << "\" width=\"" << f4(slot * 0.7) << "\" height=\"" << f4(bh) << "\" fill=\""
                    << (norm > 0.0 ? "#d62728" : "#1f77b4") << "\" class=\"bar\"/>\n";
        }
        svg.out << "<text x=\"" << f4(bx + slot * 0.35) << "\" y=\"" << f4(mid_y + half + 24.0)
                << "\" font-family=\"monospace\" font-size=\"8\" text-anchor=\"middle\">"
                << fex::kAuNames[i] << "</text>\n";
    }
    out.coefficient_chart_svg = svg.finish();
    return out;
}

}  // namespace feat::render
