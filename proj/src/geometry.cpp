#include "feat/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <fstream>

#include "feat/simd.hpp"

namespace feat::geom {

bool LandmarkSet::all_finite() const {
    for (const auto& p : pts)
        if (!std::isfinite(p.x) || !std::isfinite(p.y)) return false;
    return true;
}

std::array<double, 136> LandmarkSet::flat() const {
    std::array<double, 136> v{};
    for (std::size_t i = 0; i < 68; ++i) {
        v[i] = pts[i].x;
        v[68 + i] = pts[i].y;
    }
    return v;
}

LandmarkSet LandmarkSet::from_flat(std::span<const double> v) {
    LandmarkSet lm;
    for (std::size_t i = 0; i < 68; ++i) lm.pts[i] = {v[i], v[68 + i]};
    return lm;
}

Point SimilarityTransform::apply(Point p) const {
    const double c = std::cos(rotation), s = std::sin(rotation);
    return {scale * (c * p.x - s * p.y) + tx, scale * (s * p.x + c * p.y) + ty};
}

LandmarkSet SimilarityTransform::apply(const LandmarkSet& lm) const {
    LandmarkSet out;
    for (std::size_t i = 0; i < 68; ++i) out.pts[i] = apply(lm.pts[i]);
    return out;
}

SimilarityTransform SimilarityTransform::inverse() const {
    const double inv_s = 1.0 / scale;
    const double c = std::cos(-rotation), s = std::sin(-rotation);
    return {inv_s, -rotation, -inv_s * (c * tx - s * ty), -inv_s * (s * tx + c * ty)};
}

double interocular_distance(const LandmarkSet& lm) {
    const double d = std::hypot(lm[45].x - lm[36].x, lm[45].y - lm[36].y);
    if (d == 0.0) fail("DegenerateFace", "coincident outer eye corners");
    return d;
}

SimilarityFit fit_similarity(const LandmarkSet& src, const LandmarkSet& dst) {
    // Complex least squares: with centered points as complex numbers, the
    // optimal a = scale*e^{i*rot} is <dst~, src~> / <src~, src~>.
    std::complex<double> mu_s{0, 0}, mu_d{0, 0};
    for (std::size_t i = 0; i < 68; ++i) {
        mu_s += std::complex<double>(src[i].x, src[i].y);
        mu_d += std::complex<double>(dst[i].x, dst[i].y);
    }
    mu_s /= 68.0;
    mu_d /= 68.0;

    std::complex<double> num{0, 0};
    double den = 0.0;
    for (std::size_t i = 0; i < 68; ++i) {
        const std::complex<double> zs = std::complex<double>(src[i].x, src[i].y) - mu_s;
        const std::complex<double> zd = std::complex<double>(dst[i].x, dst[i].y) - mu_d;
        num += zd * std::conj(zs);
        den += std::norm(zs);
    }
    if (den <= 0.0) fail("DegenerateFace", "source landmarks have zero spread");
    const std::complex<double> a = num / den;
    if (std::abs(a) < 1e-300) fail("DegenerateFace", "degenerate target spread");

    SimilarityTransform t;
    t.scale = std::abs(a);
    t.rotation = std::arg(a);
    const std::complex<double> tr = mu_d - a * mu_s;
    t.tx = tr.real();
    t.ty = tr.imag();

    double ss = 0.0;
    for (std::size_t i = 0; i < 68; ++i) {
        const Point p = t.apply(src[i]);
        ss += (p.x - dst[i].x) * (p.x - dst[i].x) + (p.y - dst[i].y) * (p.y - dst[i].y);
    }
    return {t, std::sqrt(ss / 68.0)};
}

LandmarkSet align_to_template(const LandmarkSet& lm, const LandmarkSet& tmpl) {
    return fit_similarity(lm, tmpl).transform.apply(lm);
}

namespace {

double cross(const Point& o, const Point& a, const Point& b) {
    return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

}  // namespace

std::vector<Point> convex_hull(std::span<const Point> points) {
    if (points.size() < 3) fail("DegenerateHull", "need at least 3 points");
    std::vector<Point> p(points.begin(), points.end());
    std::sort(p.begin(), p.end(), [](const Point& a, const Point& b) {
        return a.x < b.x || (a.x == b.x && a.y < b.y);
    });
    p.erase(std::unique(p.begin(), p.end()), p.end());

    const std::size_t n = p.size();
    std::vector<Point> h(2 * n);
    std::size_t k = 0;
    for (std::size_t i = 0; i < n; ++i) {  // lower chain
        while (k >= 2 && cross(h[k - 2], h[k - 1], p[i]) <= 0) --k;
        h[k++] = p[i];
    }
    for (std::size_t i = n - 1, t = k + 1; i-- > 0;) {  // upper chain
        while (k >= t && cross(h[k - 2], h[k - 1], p[i]) <= 0) --k;
        h[k++] = p[i];
    }
    h.resize(k - 1);  // last point repeats the first
    if (h.size() < 3) fail("DegenerateHull", "all points collinear");
    return h;
}

std::array<Point, 10> shifted_brows(const LandmarkSet& lm) {
    // Upper-eyelid reference heights: (37,38) for brow points 17-21,
    // (43,44) for 22-26; shift each side up by 1.5x its mean gap.
    const double lid_a = 0.5 * (lm[37].y + lm[38].y);
    const double lid_b = 0.5 * (lm[43].y + lm[44].y);
    double d_a = 0.0, d_b = 0.0;
    for (int i = 17; i <= 21; ++i) d_a += lid_a - lm[i].y;
    for (int i = 22; i <= 26; ++i) d_b += lid_b - lm[i].y;
    d_a /= 5.0;
    d_b /= 5.0;

    std::array<Point, 10> out{};
    for (int i = 0; i < 5; ++i) out[i] = {lm[17 + i].x, lm[17 + i].y - 1.5 * d_a};
    for (int i = 0; i < 5; ++i) out[5 + i] = {lm[22 + i].x, lm[22 + i].y - 1.5 * d_b};
    return out;
}

namespace {

// Scanline fill of a convex polygon: a pixel is on when its center lies
// inside or on the hull. For each row, intersect the center line with every
// edge and fill the closed x-interval.
Mask rasterize_convex(const std::vector<Point>& hull, int width, int height) {
    Mask m;
    m.width = width;
    m.height = height;
    m.on.assign(static_cast<std::size_t>(width) * height, 0);

    const std::size_t n = hull.size();
    for (int py = 0; py < height; ++py) {
        const double yc = py + 0.5;
        double x_lo = std::numeric_limits<double>::infinity();
        double x_hi = -std::numeric_limits<double>::infinity();
        bool hit = false;
        for (std::size_t i = 0; i < n; ++i) {
            const Point& a = hull[i];
            const Point& b = hull[(i + 1) % n];
            const double y0 = std::min(a.y, b.y), y1 = std::max(a.y, b.y);
            if (yc < y0 || yc > y1) continue;
            hit = true;
            if (a.y == b.y) {  // horizontal edge on the scanline
                x_lo = std::min({x_lo, a.x, b.x});
                x_hi = std::max({x_hi, a.x, b.x});
            } else {
                const double x = a.x + (yc - a.y) * (b.x - a.x) / (b.y - a.y);
                x_lo = std::min(x_lo, x);
                x_hi = std::max(x_hi, x);
            }
        }
        if (!hit) continue;
        const int px0 = static_cast<int>(std::ceil(x_lo - 0.5));
        const int px1 = static_cast<int>(std::floor(x_hi - 0.5));
        for (int px = std::max(px0, 0); px <= std::min(px1, width - 1); ++px)
            m.on[static_cast<std::size_t>(py) * width + px] = 1;
    }
    return m;
}

}  // namespace

std::size_t Mask::count() const {
    std::size_t c = 0;
    for (auto v : on) c += v;
    return c;
}

Mask face_mask(const LandmarkSet& lm, int width, int height) {
    std::vector<Point> pts(lm.pts.begin(), lm.pts.end());
    const auto brows = shifted_brows(lm);
    pts.insert(pts.end(), brows.begin(), brows.end());
    return rasterize_convex(convex_hull(pts), width, height);
}

double iou(const FaceBox& a, const FaceBox& b) {
    const double ix = std::max(0.0, std::min(a.x + a.width, b.x + b.width) - std::max(a.x, b.x));
    const double iy = std::max(0.0, std::min(a.y + a.height, b.y + b.height) - std::max(a.y, b.y));
    const double inter = ix * iy;
    const double uni = a.width * a.height + b.width * b.height - inter;
    return uni > 0.0 ? inter / uni : 0.0;
}

const LandmarkSet& neutral_template() {
    static const LandmarkSet tmpl = [] {
        static constexpr double raw[68][2] = {
#include "neutral_template.inc"
        };
        LandmarkSet lm;
        for (std::size_t i = 0; i < 68; ++i) lm.pts[i] = {raw[i][0], raw[i][1]};
        return lm;
    }();
    return tmpl;
}

LandmarkSet read_landmark_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail("IoFailure", "cannot open " + path);
    LandmarkSet lm;
    std::string line;
    std::size_t i = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (i >= 68) fail("MalformedNumber", "more than 68 lines in " + path);
        const auto comma = line.find(',');
        double x, y;
        if (comma == std::string::npos || !parse_double(std::string_view(line).substr(0, comma), x) ||
            !parse_double(std::string_view(line).substr(comma + 1), y))
            fail("MalformedNumber", "bad landmark line " + std::to_string(i) + " in " + path);
        lm.pts[i++] = {x, y};
    }
    if (i != 68) fail("MalformedNumber", "expected 68 lines, got " + std::to_string(i));
    return lm;
}

}  // namespace feat::geom
