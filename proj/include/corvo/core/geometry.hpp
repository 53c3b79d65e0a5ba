#pragma once

#include <Eigen/Core>

#include "corvo/core/camera.hpp"
#include "corvo/core/pose.hpp"

namespace corvo {

/// Per-pixel back-projection p = z * [(u-cx)/fx, (v-cy)/fy, 1].
/// Pixels with invalid depth, or depth beyond max_range meters, come out invalid.
PointCloud backproject(const DepthImage& depth, const CameraIntrinsics& intr,
                       double max_range = 10.0);

/// Rotate every valid point; the validity mask is untouched.
PointCloud align_cloud(const PointCloud& cloud, const Eigen::Matrix3d& rotation);

namespace reference {
PointCloud backproject(const DepthImage& depth, const CameraIntrinsics& intr,
                       double max_range = 10.0);
PointCloud align_cloud(const PointCloud& cloud, const Eigen::Matrix3d& rotation);
}  // namespace reference

}  // namespace corvo
