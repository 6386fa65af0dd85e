#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "feat/features.hpp"

namespace feat::img {

/// Reads an 8-bit grayscale PNG or binary PGM (P5); color PNGs are converted
/// to luminance. Format is detected from the file magic.
feats::GrayImage read_image(const std::string& path);

void write_pgm(const feats::GrayImage& img, const std::string& path);

void write_png(const feats::GrayImage& img, const std::string& path);

/// In-memory 8-bit grayscale PNG encoding (for SVG embedding).
std::vector<std::uint8_t> encode_png(const feats::GrayImage& img);

std::string base64(const std::vector<std::uint8_t>& data);

}  // namespace feat::img
