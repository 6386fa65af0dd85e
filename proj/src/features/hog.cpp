#include <cmath>
#include <numbers>

#include "feat/features.hpp"
#include "feat/simd.hpp"

namespace feat::feats {

std::size_t HogConfig::feature_length(int width, int height) const {
    const int cx = width / cell, cy = height / cell;
    if (cx < block || cy < block) return 0;
    const std::size_t bx = static_cast<std::size_t>((cx - block) / block_stride) + 1;
    const std::size_t by = static_cast<std::size_t>((cy - block) / block_stride) + 1;
    return bx * by * static_cast<std::size_t>(block) * block * orientations;
}

std::vector<double> hog(const GrayImage& img, const geom::Mask* mask, const HogConfig& cfg) {
    const int w = img.width, h = img.height;
    if (w <= 0 || h <= 0 || w % cfg.cell != 0 || h % cfg.cell != 0)
        fail("BadDimensions", "image " + std::to_string(w) + "x" + std::to_string(h) +
                                  " not divisible by cell " + std::to_string(cfg.cell));
    if (mask && (mask->width != w || mask->height != h))
        fail("MaskShapeMismatch", "mask does not match image dimensions");

    std::vector<double> pix = img.pixels;
    if (mask) {
        for (std::size_t i = 0; i < pix.size(); ++i)
            if (!mask->on[i]) pix[i] = 0.0;
    }

    // Centered differences with replicated borders, rows vectorized.
    const std::size_t npx = pix.size();
    std::vector<double> gx(npx), gy(npx), mag(npx);
    for (int y = 0; y < h; ++y) {
        const double* row = pix.data() + static_cast<std::size_t>(y) * w;
        double* gxr = gx.data() + static_cast<std::size_t>(y) * w;
        if (w >= 3) {
            simd::vsub(row + 2, row, gxr + 1, static_cast<std::size_t>(w) - 2);
            simd::scale(gxr + 1, 0.5, static_cast<std::size_t>(w) - 2);
        }
        gxr[0] = 0.5 * (row[std::min(1, w - 1)] - row[0]);
        gxr[w - 1] = 0.5 * (row[w - 1] - row[std::max(w - 2, 0)]);

        const double* above = pix.data() + static_cast<std::size_t>(std::max(y - 1, 0)) * w;
        const double* below = pix.data() + static_cast<std::size_t>(std::min(y + 1, h - 1)) * w;
        double* gyr = gy.data() + static_cast<std::size_t>(y) * w;
        simd::vsub(below, above, gyr, static_cast<std::size_t>(w));
        simd::scale(gyr, 0.5, static_cast<std::size_t>(w));
    }
    simd::vmag(gx.data(), gy.data(), mag.data(), npx);

    // Per-cell orientation histograms.
    const int cx = w / cfg.cell, cy = h / cfg.cell;
    const int nb = cfg.orientations;
    const double range = cfg.signed_gradients ? 360.0 : 180.0;
    const double bin_width = range / nb;
    std::vector<double> hist(static_cast<std::size_t>(cx) * cy * nb, 0.0);

    for (int y = 0; y < h; ++y) {
        const int cyi = y / cfg.cell;
        for (int x = 0; x < w; ++x) {
            const std::size_t i = static_cast<std::size_t>(y) * w + x;
            const double m = mag[i];
            if (m == 0.0) continue;
            double ang = std::atan2(gy[i], gx[i]) * 180.0 / std::numbers::pi;
            if (cfg.signed_gradients) {
                if (ang < 0.0) ang += 360.0;
            } else {
                if (ang < 0.0) ang += 180.0;
                if (ang >= 180.0) ang -= 180.0;
            }
            // Linear split between the two nearest bin centers (wrap-around).
            const double pos = ang / bin_width - 0.5;
            const double fl = std::floor(pos);
            const double frac = pos - fl;
            int b0 = static_cast<int>(fl);
            b0 = ((b0 % nb) + nb) % nb;
            const int b1 = (b0 + 1) % nb;
            double* cell_hist =
                hist.data() + (static_cast<std::size_t>(cyi) * cx + x / cfg.cell) * nb;
            cell_hist[b0] += m * (1.0 - frac);
            cell_hist[b1] += m * frac;
        }
    }

    // Block gathering + L2 normalization.
    const int bx = (cx - cfg.block) / cfg.block_stride + 1;
    const int by = (cy - cfg.block) / cfg.block_stride + 1;
    if (bx < 1 || by < 1)
        fail("BadDimensions", "image too small for block size");
    const std::size_t block_len = static_cast<std::size_t>(cfg.block) * cfg.block * nb;
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(bx) * by * block_len);
    std::vector<double> blockv(block_len);
    for (int yb = 0; yb < by; ++yb) {
        for (int xb = 0; xb < bx; ++xb) {
            std::size_t j = 0;
            for (int dy = 0; dy < cfg.block; ++dy) {
                const int cyi = yb * cfg.block_stride + dy;
                for (int dx = 0; dx < cfg.block; ++dx) {
                    const int cxi = xb * cfg.block_stride + dx;
                    const double* src = hist.data() + (static_cast<std::size_t>(cyi) * cx + cxi) * nb;
                    for (int o = 0; o < nb; ++o) blockv[j++] = src[o];
                }
            }
            const double norm = std::sqrt(simd::sumsq(blockv.data(), block_len)) + 1e-12;
            simd::scale(blockv.data(), 1.0 / norm, block_len);
            out.insert(out.end(), blockv.begin(), blockv.end());
        }
    }
    return out;
}

}  // namespace feat::feats
