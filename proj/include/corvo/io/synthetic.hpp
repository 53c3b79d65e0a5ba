#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "corvo/core/frame.hpp"
#include "corvo/core/pose.hpp"

namespace corvo {

struct TextureSpec {
    enum class Kind { kConstant, kCheckerboard, kSineMix };
    Kind kind = Kind::kCheckerboard;
    double scale = 0.25;    // meters per checker square / base wavelength
    double base = 0.5;      // mean intensity
    double contrast = 0.4;  // peak-to-peak amplitude around base
};

// Infinite textured plane n·p + d = 0 in world coordinates, two-sided.
struct PlaneSpec {
    Eigen::Vector3d normal = Eigen::Vector3d::UnitZ();
    double d = 0.0;
    TextureSpec texture;
};

struct SyntheticSceneSpec {
    std::vector<PlaneSpec> planes;
    Trajectory trajectory;  // camera-to-world poses
    CameraIntrinsics intrinsics;
    double depth_noise_sigma = 0.0;  // meters; 0 = noiseless
    std::uint64_t seed = 0;

    // Structural checks: >= 2 planes, unit normals, poses present.
    void validate() const;
};

// Scene-spec JSON file; format documented in the README.
SyntheticSceneSpec load_scene_spec(const std::string& path);

// Exact ray-cast of one pose: depth in meters (0 where no plane is hit) and
// intensity in [0,1]. Depth noise is keyed by (seed, pose_index, pixel), so
// the result does not depend on execution order.
void render_raw(const SyntheticSceneSpec& spec, std::size_t pose_index, Image<double>& depth_out,
                Image<double>& intensity_out);

namespace reference {
void render_raw(const SyntheticSceneSpec& spec, std::size_t pose_index, Image<double>& depth_out,
                Image<double>& intensity_out);
}  // namespace reference

// The same frame after the storage round-trip — depth through 16-bit units,
// intensity through 8-bit gray — bit-identical to writing the sequence to
// disk and loading it back.
Frame render_frame(const SyntheticSceneSpec& spec, std::size_t pose_index, double max_range = 10.0);

// Every pose must see at least two non-parallel planes; throws DataError
// naming the first offending pose.
void validate_visibility(const SyntheticSceneSpec& spec);

// Renders the sequence into out_dir as a loadable dataset (rgb/, depth/,
// associations.txt, groundtruth.txt, manifest.txt). Validates visibility
// before creating any file.
void write_sequence(const SyntheticSceneSpec& spec, const std::string& out_dir);

}  // namespace corvo
