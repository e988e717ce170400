#include "semlens/png_io.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>

#include "semlens/errors.hpp"

namespace semlens {

namespace {

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

[[noreturn]] void fail(const std::string& what, const std::string& path) {
    throw IoError(what + ": " + path);
}

}  // namespace

void write_rgb_png(const std::string& path, const Tensor& rgb) {
    if (rgb.shape.c != 3) throw ShapeMismatch("PNG export expects a 3-channel tensor");
    const int H = rgb.shape.h, W = rgb.shape.w;
    FilePtr fp(std::fopen(path.c_str(), "wb"));
    if (!fp) fail("cannot open for writing", path);

    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png_create_info_struct(png);
    if (!png || !info || setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        fail("libpng write failure", path);
    }
    png_init_io(png, fp.get());
    png_set_IHDR(png, info, W, H, 8, PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);

    std::vector<unsigned char> row(static_cast<std::size_t>(W) * 3);
    for (int y = 0; y < H; ++y) {
        for (int x = 0; x < W; ++x) {
            for (int c = 0; c < 3; ++c) {
                const double v = std::clamp(rgb.at(c, y, x), 0.0, 1.0);
                row[static_cast<std::size_t>(x) * 3 + c] =
                    static_cast<unsigned char>(std::lround(v * 255.0));
            }
        }
        png_write_row(png, row.data());
    }
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

Tensor read_rgb_png(const std::string& path) {
    FilePtr fp(std::fopen(path.c_str(), "rb"));
    if (!fp) fail("cannot open", path);

    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png_create_info_struct(png);
    if (!png || !info || setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        fail("libpng read failure", path);
    }
    png_init_io(png, fp.get());
    png_read_info(png, info);

    // normalize any input to 8-bit RGB
    png_set_strip_16(png);
    png_set_palette_to_rgb(png);
    png_set_expand_gray_1_2_4_to_8(png);
    if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
    png_set_strip_alpha(png);
    png_set_gray_to_rgb(png);
    png_read_update_info(png, info);

    const int H = static_cast<int>(png_get_image_height(png, info));
    const int W = static_cast<int>(png_get_image_width(png, info));
    Tensor out(3, H, W);
    std::vector<unsigned char> row(png_get_rowbytes(png, info));
    for (int y = 0; y < H; ++y) {
        png_read_row(png, row.data(), nullptr);
        for (int x = 0; x < W; ++x)
            for (int c = 0; c < 3; ++c)
                out.at(c, y, x) = row[static_cast<std::size_t>(x) * 3 + c] / 255.0;
    }
    png_destroy_read_struct(&png, &info, nullptr);
    return out;
}

void write_gray16_png(const std::string& path, const std::vector<std::uint16_t>& data, int h, int w) {
    if (data.size() != static_cast<std::size_t>(h) * w) throw ShapeMismatch("label map size mismatch");
    FilePtr fp(std::fopen(path.c_str(), "wb"));
    if (!fp) fail("cannot open for writing", path);

    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png_create_info_struct(png);
    if (!png || !info || setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        fail("libpng write failure", path);
    }
    png_init_io(png, fp.get());
    png_set_IHDR(png, info, w, h, 16, PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);

    std::vector<unsigned char> row(static_cast<std::size_t>(w) * 2);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const std::uint16_t v = data[static_cast<std::size_t>(y) * w + x];
            row[static_cast<std::size_t>(x) * 2] = static_cast<unsigned char>(v >> 8);  // network order
            row[static_cast<std::size_t>(x) * 2 + 1] = static_cast<unsigned char>(v & 0xff);
        }
        png_write_row(png, row.data());
    }
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

std::vector<std::uint16_t> read_gray16_png(const std::string& path, int& h, int& w) {
    FilePtr fp(std::fopen(path.c_str(), "rb"));
    if (!fp) fail("cannot open", path);

    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png_create_info_struct(png);
    if (!png || !info || setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        fail("libpng read failure", path);
    }
    png_init_io(png, fp.get());
    png_read_info(png, info);
    if (png_get_color_type(png, info) != PNG_COLOR_TYPE_GRAY || png_get_bit_depth(png, info) != 16) {
        png_destroy_read_struct(&png, &info, nullptr);
        fail("expected 16-bit grayscale PNG", path);
    }
    h = static_cast<int>(png_get_image_height(png, info));
    w = static_cast<int>(png_get_image_width(png, info));

    std::vector<std::uint16_t> out(static_cast<std::size_t>(h) * w);
    std::vector<unsigned char> row(png_get_rowbytes(png, info));
    for (int y = 0; y < h; ++y) {
        png_read_row(png, row.data(), nullptr);
        for (int x = 0; x < w; ++x)
            out[static_cast<std::size_t>(y) * w + x] = static_cast<std::uint16_t>(
                (row[static_cast<std::size_t>(x) * 2] << 8) | row[static_cast<std::size_t>(x) * 2 + 1]);
    }
    png_destroy_read_struct(&png, &info, nullptr);
    return out;
}

Tensor resize_nearest(const Tensor& src, int out_h, int out_w) {
    if (out_h < 1 || out_w < 1) throw InvalidParam("resize target must be positive");
    Tensor out(src.shape.c, out_h, out_w);
    for (int c = 0; c < src.shape.c; ++c) {
        for (int y = 0; y < out_h; ++y) {
            const int sy = std::min(src.shape.h - 1, static_cast<int>(static_cast<double>(y) * src.shape.h / out_h));
            for (int x = 0; x < out_w; ++x) {
                const int sx = std::min(src.shape.w - 1, static_cast<int>(static_cast<double>(x) * src.shape.w / out_w));
                out.at(c, y, x) = src.at(c, sy, sx);
            }
        }
    }
    return out;
}

}  // namespace semlens
