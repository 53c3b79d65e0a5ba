#include "corvo/io/png_io.hpp"

#include <bit>
#include <cstdio>

#include <png.h>

#include "corvo/core/errors.hpp"

namespace corvo {

static_assert(sizeof(Rgb8) == 3, "Rgb8 must be packed");

namespace {

struct FileHandle {
    FILE* fp = nullptr;
    explicit FileHandle(const std::string& path, const char* mode) : fp(std::fopen(path.c_str(), mode)) {}
    ~FileHandle() {
        if (fp) std::fclose(fp);
    }
};

// libpng reports errors through longjmp; keep frames POD-only and translate
// to exceptions after cleanup.
[[noreturn]] void fail(const std::string& path, const char* what) {
    throw LoadError(path + ": " + what);
}

}  // namespace

Image<std::uint16_t> read_png16(const std::string& path) {
    FileHandle file(path, "rb");
    if (!file.fp) fail(path, "cannot open");

    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_read_struct(&png, &info, nullptr);
        fail(path, "libpng init failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        fail(path, "png decode failed");
    }
    png_init_io(png, file.fp);
    png_read_info(png, info);

    const int w = static_cast<int>(png_get_image_width(png, info));
    const int h = static_cast<int>(png_get_image_height(png, info));
    if (png_get_bit_depth(png, info) != 16 || png_get_color_type(png, info) != PNG_COLOR_TYPE_GRAY) {
        png_destroy_read_struct(&png, &info, nullptr);
        fail(path, "expected 16-bit grayscale depth PNG");
    }
    if constexpr (std::endian::native == std::endian::little) png_set_swap(png);
    png_read_update_info(png, info);

    Image<std::uint16_t> img(w, h);
    std::vector<png_bytep> rows(h);
    for (int v = 0; v < h; ++v) rows[v] = reinterpret_cast<png_bytep>(img.row(v));
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);
    return img;
}

void write_png16(const std::string& path, const Image<std::uint16_t>& img) {
    FileHandle file(path, "wb");
    if (!file.fp) fail(path, "cannot open for writing");

    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_write_struct(&png, &info);
        fail(path, "libpng init failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        fail(path, "png encode failed");
    }
    png_init_io(png, file.fp);
    png_set_IHDR(png, info, img.width(), img.height(), 16, PNG_COLOR_TYPE_GRAY,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    if constexpr (std::endian::native == std::endian::little) png_set_swap(png);

    std::vector<png_bytep> rows(img.height());
    for (int v = 0; v < img.height(); ++v)
        rows[v] = reinterpret_cast<png_bytep>(const_cast<std::uint16_t*>(img.row(v)));
    png_write_image(png, rows.data());
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

Image<Rgb8> read_png_rgb8(const std::string& path) {
    FileHandle file(path, "rb");
    if (!file.fp) fail(path, "cannot open");

    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_read_struct(&png, &info, nullptr);
        fail(path, "libpng init failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        fail(path, "png decode failed");
    }
    png_init_io(png, file.fp);
    png_read_info(png, info);

    // Normalize every input flavor to 8-bit RGB.
    png_set_strip_16(png);
    png_set_palette_to_rgb(png);
    png_set_expand_gray_1_2_4_to_8(png);
    png_set_strip_alpha(png);
    png_set_gray_to_rgb(png);
    png_read_update_info(png, info);

    const int w = static_cast<int>(png_get_image_width(png, info));
    const int h = static_cast<int>(png_get_image_height(png, info));
    if (png_get_channels(png, info) != 3) {
        png_destroy_read_struct(&png, &info, nullptr);
        fail(path, "could not normalize PNG to RGB");
    }

    Image<Rgb8> img(w, h);
    std::vector<png_bytep> rows(h);
    for (int v = 0; v < h; ++v) rows[v] = reinterpret_cast<png_bytep>(img.row(v));
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);
    return img;
}

void write_png_rgb8(const std::string& path, const Image<Rgb8>& img) {
    FileHandle file(path, "wb");
    if (!file.fp) fail(path, "cannot open for writing");

    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_write_struct(&png, &info);
        fail(path, "libpng init failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        fail(path, "png encode failed");
    }
    png_init_io(png, file.fp);
    png_set_IHDR(png, info, img.width(), img.height(), 8, PNG_COLOR_TYPE_RGB,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);

    std::vector<png_bytep> rows(img.height());
    for (int v = 0; v < img.height(); ++v)
        rows[v] = reinterpret_cast<png_bytep>(const_cast<Rgb8*>(img.row(v)));
    png_write_image(png, rows.data());
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

Image<double> intensity_from_rgb(const Image<Rgb8>& rgb) {
    Image<double> out(rgb.width(), rgb.height());
    for (std::size_t i = 0; i < rgb.size(); ++i) out[i] = luma01(rgb[i]);
    return out;
}

}  // namespace corvo
