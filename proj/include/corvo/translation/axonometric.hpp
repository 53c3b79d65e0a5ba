#pragma once

#include "corvo/core/camera.hpp"
#include "corvo/core/image.hpp"

namespace corvo {

struct ProjectionConfig {
    // Meters per projection pixel.
    double r_x = 0.01;
    double r_y = 0.01;
    // Projection image side, power of two.
    int grid_size = 256;

    void validate() const;
};

// Orthographic top-of-z view of a rotation-aligned cloud: per cell, the
// nearest point's intensity and z. Holes carry zero with valid = 0.
struct AxonometricFrame {
    Image<double> color;  // grayscale in [0,1]
    Image<double> depth;  // meters
    Mask valid;

    int grid_size() const { return color.width(); }
    int valid_count() const;
};

// Bin every valid cloud point at (grid/2 + round(x/r_x), grid/2 + round(y/r_y)).
// Cell conflicts keep the smallest z; equal z keeps the earlier scan-order
// point, which makes the result independent of thread count.
AxonometricFrame project_axonometric(const PointCloud& aligned_cloud,
                                     const Image<double>& intensity,
                                     const ProjectionConfig& cfg);

namespace reference {
AxonometricFrame project_axonometric(const PointCloud& aligned_cloud,
                                     const Image<double>& intensity,
                                     const ProjectionConfig& cfg);
}  // namespace reference

}  // namespace corvo
