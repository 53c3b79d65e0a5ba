#pragma once

#include <cassert>
#include <cstdint>
#include <vector>

namespace corvo {

/// Dense row-major 2-D grid. Pixel access is (u, v) = (column, row).
template <typename T>
class Image {
public:
    Image() = default;
    Image(int width, int height, const T& fill = T{})
        : width_(width), height_(height), data_(static_cast<size_t>(width) * height, fill) {}

    int width() const { return width_; }
    int height() const { return height_; }
    size_t size() const { return data_.size(); }
    bool empty() const { return data_.empty(); }

    T& at(int u, int v) {
        assert(in_bounds(u, v));
        return data_[static_cast<size_t>(v) * width_ + u];
    }
    const T& at(int u, int v) const {
        assert(in_bounds(u, v));
        return data_[static_cast<size_t>(v) * width_ + u];
    }

    T& operator[](size_t i) { return data_[i]; }
    const T& operator[](size_t i) const { return data_[i]; }

    bool in_bounds(int u, int v) const {
        return u >= 0 && u < width_ && v >= 0 && v < height_;
    }

    T* data() { return data_.data(); }
    const T* data() const { return data_.data(); }

    T* row(int v) { return data_.data() + static_cast<size_t>(v) * width_; }
    const T* row(int v) const { return data_.data() + static_cast<size_t>(v) * width_; }

    bool same_size(int w, int h) const { return width_ == w && height_ == h; }

    friend bool operator==(const Image& a, const Image& b) {
        return a.width_ == b.width_ && a.height_ == b.height_ && a.data_ == b.data_;
    }

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<T> data_;
};

using Mask = Image<std::uint8_t>;

}  // namespace corvo
