#pragma once

#include <cstdint>

#include "corvo/core/camera.hpp"
#include "corvo/core/image.hpp"

namespace corvo {

// One RGB-D input: grayscale intensity in [0,1] plus metric depth.
// Color is collapsed to intensity at load; every consumer is single-channel.
struct Frame {
    std::int64_t id = 0;
    double timestamp = 0.0;
    Image<double> intensity;
    DepthImage depth;
    CameraIntrinsics intrinsics;
};

}  // namespace corvo
