#include "corvo/core/geometry.hpp"

#include <cmath>

#include "corvo/core/errors.hpp"

namespace corvo {

static void check_dims(const DepthImage& depth, const CameraIntrinsics& intr) {
    if (!depth.meters.same_size(intr.width, intr.height))
        throw ConfigError("backproject: depth dimensions do not match intrinsics");
}

PointCloud backproject(const DepthImage& depth, const CameraIntrinsics& intr, double max_range) {
    check_dims(depth, intr);
    const int w = depth.width(), h = depth.height();
    PointCloud cloud;
    cloud.points = Image<Eigen::Vector3d>(w, h, Eigen::Vector3d::Zero());
    cloud.valid = Mask(w, h, 0);

#pragma omp parallel for schedule(static)
    for (int v = 0; v < h; ++v) {
        for (int u = 0; u < w; ++u) {
            if (!depth.valid.at(u, v)) continue;
            const double z = depth.meters.at(u, v);
            if (!(z > 0.0) || !std::isfinite(z) || z > max_range) continue;
            cloud.points.at(u, v) = intr.backproject_pixel(u, v, z);
            cloud.valid.at(u, v) = 1;
        }
    }
    return cloud;
}

PointCloud align_cloud(const PointCloud& cloud, const Eigen::Matrix3d& rotation) {
    const int w = cloud.width(), h = cloud.height();
    PointCloud out;
    out.points = Image<Eigen::Vector3d>(w, h, Eigen::Vector3d::Zero());
    out.valid = cloud.valid;

#pragma omp parallel for schedule(static)
    for (int v = 0; v < h; ++v) {
        for (int u = 0; u < w; ++u) {
            if (cloud.valid.at(u, v)) out.points.at(u, v) = rotation * cloud.points.at(u, v);
        }
    }
    return out;
}

namespace reference {

PointCloud backproject(const DepthImage& depth, const CameraIntrinsics& intr, double max_range) {
    check_dims(depth, intr);
    const int w = depth.width(), h = depth.height();
    PointCloud cloud;
    cloud.points = Image<Eigen::Vector3d>(w, h, Eigen::Vector3d::Zero());
    cloud.valid = Mask(w, h, 0);
    for (int v = 0; v < h; ++v) {
        for (int u = 0; u < w; ++u) {
            if (!depth.valid.at(u, v)) continue;
            const double z = depth.meters.at(u, v);
            if (!(z > 0.0) || !std::isfinite(z) || z > max_range) continue;
            cloud.points.at(u, v) = intr.backproject_pixel(u, v, z);
            cloud.valid.at(u, v) = 1;
        }
    }
    return cloud;
}

PointCloud align_cloud(const PointCloud& cloud, const Eigen::Matrix3d& rotation) {
    const int w = cloud.width(), h = cloud.height();
    PointCloud out;
    out.points = Image<Eigen::Vector3d>(w, h, Eigen::Vector3d::Zero());
    out.valid = cloud.valid;
    for (int v = 0; v < h; ++v)
        for (int u = 0; u < w; ++u)
            if (cloud.valid.at(u, v)) out.points.at(u, v) = rotation * cloud.points.at(u, v);
    return out;
}

}  // namespace reference
}  // namespace corvo
