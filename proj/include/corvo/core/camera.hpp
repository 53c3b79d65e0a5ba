#pragma once

#include <Eigen/Core>

#include "corvo/core/errors.hpp"
#include "corvo/core/image.hpp"

namespace corvo {

/// Pinhole camera model plus the divisor that converts stored depth units to meters
/// (5000 for TUM-style 16-bit depth PNGs).
struct CameraIntrinsics {
    double fx = 525.0;
    double fy = 525.0;
    double cx = 319.5;
    double cy = 239.5;
    int width = 640;
    int height = 480;
    double depth_scale = 5000.0;

    void validate() const {
        if (!(fx > 0.0)) throw ConfigError("intrinsics: fx must be > 0");
        if (!(fy > 0.0)) throw ConfigError("intrinsics: fy must be > 0");
        if (!(cx > 0.0 && cx < width)) throw ConfigError("intrinsics: cx must lie inside the image");
        if (!(cy > 0.0 && cy < height)) throw ConfigError("intrinsics: cy must lie inside the image");
        if (width <= 0 || height <= 0) throw ConfigError("intrinsics: image size must be positive");
        if (!(depth_scale > 0.0)) throw ConfigError("intrinsics: depth_scale must be > 0");
    }

    /// Ray through pixel (u, v) at depth z meters.
    Eigen::Vector3d backproject_pixel(double u, double v, double z) const {
        return {z * (u - cx) / fx, z * (v - cy) / fy, z};
    }

    /// Pinhole projection of a camera-frame point (z > 0) to pixel coordinates.
    Eigen::Vector2d project_point(const Eigen::Vector3d& p) const {
        return {fx * p.x() / p.z() + cx, fy * p.y() / p.z() + cy};
    }
};

/// Depth in meters with per-pixel validity. Converted from raw units once at load.
struct DepthImage {
    Image<double> meters;
    Mask valid;

    int width() const { return meters.width(); }
    int height() const { return meters.height(); }
};

/// Back-projected depth image: one 3-D point per pixel, organized as the source grid.
struct PointCloud {
    Image<Eigen::Vector3d> points;
    Mask valid;

    int width() const { return points.width(); }
    int height() const { return points.height(); }
};

}  // namespace corvo
