#pragma once

#include <cstdint>
#include <string>

#include "corvo/core/image.hpp"

namespace corvo {

struct Rgb8 {
    std::uint8_t r = 0, g = 0, b = 0;
    bool operator==(const Rgb8&) const = default;
};

// 16-bit single-channel PNG, host byte order in memory (depth images).
Image<std::uint16_t> read_png16(const std::string& path);
void write_png16(const std::string& path, const Image<std::uint16_t>& img);

// 8-bit PNG of any color type, expanded to RGB.
Image<Rgb8> read_png_rgb8(const std::string& path);
void write_png_rgb8(const std::string& path, const Image<Rgb8>& img);

// Shared grayscale conversion — the renderer quantizes through the same
// function the loader applies, so rendered and re-loaded sequences agree
// bit for bit.
inline double luma01(const Rgb8& c) {
    return (0.299 * c.r + 0.587 * c.g + 0.114 * c.b) / 255.0;
}

Image<double> intensity_from_rgb(const Image<Rgb8>& rgb);

}  // namespace corvo
