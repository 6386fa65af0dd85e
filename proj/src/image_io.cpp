#include "feat/image_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <png.h>

namespace feat::img {

namespace {

std::uint8_t to_byte(double v) {
    return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
}

feats::GrayImage read_pgm(std::ifstream& in, const std::string& path) {
    std::string magic;
    in >> magic;
    if (magic != "P5") fail("IoFailure", "unsupported PGM variant in " + path);
    // Header tokens with '#' comment lines allowed.
    auto next_int = [&]() -> long {
        std::string tok;
        while (in >> tok) {
            if (tok[0] == '#') {
                std::string rest;
                std::getline(in, rest);
                continue;
            }
            return std::stol(tok);
        }
        fail("IoFailure", "truncated PGM header in " + path);
    };
    const long w = next_int(), h = next_int(), maxval = next_int();
    if (w <= 0 || h <= 0 || maxval != 255) fail("IoFailure", "unsupported PGM header in " + path);
    in.get();  // the single whitespace after maxval

    feats::GrayImage img(static_cast<int>(w), static_cast<int>(h));
    std::vector<std::uint8_t> buf(static_cast<std::size_t>(w) * h);
    in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    if (static_cast<std::size_t>(in.gcount()) != buf.size())
        fail("IoFailure", "truncated PGM data in " + path);
    for (std::size_t i = 0; i < buf.size(); ++i) img.pixels[i] = buf[i] / 255.0;
    return img;
}

struct PngReadCloser {
    png_structp png = nullptr;
    png_infop info = nullptr;
    std::FILE* fp = nullptr;
    ~PngReadCloser() {
        if (png) png_destroy_read_struct(&png, info ? &info : nullptr, nullptr);
        if (fp) std::fclose(fp);
    }
};

feats::GrayImage read_png_file(const std::string& path) {
    PngReadCloser s;
    s.fp = std::fopen(path.c_str(), "rb");
    if (!s.fp) fail("IoFailure", "cannot open " + path);
    s.png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    s.info = png_create_info_struct(s.png);
    if (!s.png || !s.info) fail("IoFailure", "libpng init failed");
    if (setjmp(png_jmpbuf(s.png))) fail("IoFailure", "corrupt PNG: " + path);

    png_init_io(s.png, s.fp);
    png_read_info(s.png, s.info);

    png_set_strip_16(s.png);
    png_set_strip_alpha(s.png);
    png_set_expand(s.png);  // palette/low-bit-depth to 8-bit
    const png_byte color = png_get_color_type(s.png, s.info);
    if (color & PNG_COLOR_MASK_COLOR) png_set_rgb_to_gray(s.png, 1, -1.0, -1.0);
    png_read_update_info(s.png, s.info);

    const png_uint_32 w = png_get_image_width(s.png, s.info);
    const png_uint_32 h = png_get_image_height(s.png, s.info);
    feats::GrayImage img(static_cast<int>(w), static_cast<int>(h));
    std::vector<std::uint8_t> row(w);
    for (png_uint_32 y = 0; y < h; ++y) {
        png_read_row(s.png, row.data(), nullptr);
        for (png_uint_32 x = 0; x < w; ++x)
            img.pixels[static_cast<std::size_t>(y) * w + x] = row[x] / 255.0;
    }
    return img;
}

struct PngWriteCloser {
    png_structp png = nullptr;
    png_infop info = nullptr;
    ~PngWriteCloser() {
        if (png) png_destroy_write_struct(&png, info ? &info : nullptr);
    }
};

}  // namespace

feats::GrayImage read_image(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail("IoFailure", "cannot open " + path);
    char magic[2] = {0, 0};
    in.read(magic, 2);
    in.seekg(0);
    if (magic[0] == 'P' && magic[1] == '5') return read_pgm(in, path);
    in.close();
    return read_png_file(path);
}

void write_pgm(const feats::GrayImage& img, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail("IoFailure", "cannot open " + path + " for writing");
    out << "P5\n" << img.width << ' ' << img.height << "\n255\n";
    std::vector<std::uint8_t> buf(img.pixels.size());
    for (std::size_t i = 0; i < buf.size(); ++i) buf[i] = to_byte(img.pixels[i]);
    out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    if (!out) fail("IoFailure", "write failed: " + path);
}

std::vector<std::uint8_t> encode_png(const feats::GrayImage& img) {
    PngWriteCloser s;
    s.png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    s.info = png_create_info_struct(s.png);
    if (!s.png || !s.info) fail("IoFailure", "libpng init failed");

    std::vector<std::uint8_t> out;
    if (setjmp(png_jmpbuf(s.png))) fail("IoFailure", "PNG encode failed");
    png_set_write_fn(
        s.png, &out,
        [](png_structp p, png_bytep data, png_size_t len) {
            auto* v = static_cast<std::vector<std::uint8_t>*>(png_get_io_ptr(p));
            v->insert(v->end(), data, data + len);
        },
        nullptr);

    png_set_IHDR(s.png, s.info, static_cast<png_uint_32>(img.width),
                 static_cast<png_uint_32>(img.height), 8, PNG_COLOR_TYPE_GRAY,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(s.png, s.info);

    std::vector<std::uint8_t> row(static_cast<std::size_t>(img.width));
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) row[static_cast<std::size_t>(x)] = to_byte(img.at(x, y));
        png_write_row(s.png, row.data());
    }
    png_write_end(s.png, s.info);
    return out;
}

void write_png(const feats::GrayImage& img, const std::string& path) {
    const auto bytes = encode_png(img);
    std::ofstream out(path, std::ios::binary);
    if (!out) fail("IoFailure", "cannot open " + path + " for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) fail("IoFailure", "write failed: " + path);
}

std::string base64(const std::vector<std::uint8_t>& data) {
    static const char* tbl = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
    std::string out;
    out.reserve((data.size() + 2) / 3 * 4);
    std::size_t i = 0;
    for (; i + 3 <= data.size(); i += 3) {
        const std::uint32_t v = (data[i] << 16) | (data[i + 1] << 8) | data[i + 2];
        out.push_back(tbl[(v >> 18) & 63]);
        out.push_back(tbl[(v >> 12) & 63]);
        out.push_back(tbl[(v >> 6) & 63]);
        out.push_back(tbl[v & 63]);
    }
    if (i + 1 == data.size()) {
        const std::uint32_t v = data[i] << 16;
        out.push_back(tbl[(v >> 18) & 63]);
        out.push_back(tbl[(v >> 12) & 63]);
        out += "==";
    } else if (i + 2 == data.size()) {
        const std::uint32_t v = (data[i] << 16) | (data[i + 1] << 8);
        out.push_back(tbl[(v >> 18) & 63]);
        out.push_back(tbl[(v >> 12) & 63]);
        out.push_back(tbl[(v >> 6) & 63]);
        out.push_back('=');
    }
    return out;
}

}  // namespace feat::img
