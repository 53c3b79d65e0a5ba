#pragma once

#include <Eigen/Core>

#include "corvo/core/camera.hpp"
#include "corvo/core/image.hpp"

namespace corvo {

// Per-pixel unit surface normals, oriented toward the camera (n . p < 0).
struct NormalMap {
    Image<Eigen::Vector3d> normals;
    Mask valid;

    int width() const { return normals.width(); }
    int height() const { return normals.height(); }
};

struct NormalMapParams {
    // Side length (pixels) of the averaging window. 1 disables smoothing.
    int cell_size = 10;
};

// Cross-product normals from the four axis neighbours of each pixel.
NormalMap compute_raw_normals(const PointCloud& cloud);

// Box-average of raw normals over a cell_size x cell_size window, renormalized.
// A pixel stays valid if itself and more than half of its in-image window are valid.
NormalMap smooth_normals(const NormalMap& raw, const NormalMapParams& params);

namespace reference {
NormalMap compute_raw_normals(const PointCloud& cloud);
NormalMap smooth_normals(const NormalMap& raw, const NormalMapParams& params);
}  // namespace reference

}  // namespace corvo
