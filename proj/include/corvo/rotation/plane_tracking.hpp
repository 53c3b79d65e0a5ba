#pragma once

#include <vector>

#include <Eigen/Core>

#include "corvo/normal/normal_map.hpp"

namespace corvo {

struct PlaneTrackerParams {
    // Minimum cross-frame dot product for a pixel to count as co-planar.
    double threshold_overlap = 0.95;
    // Minimum dot product with a Mode's seed normal to join that Mode.
    double threshold_mode = 0.98;
    // Modes supported by fewer pixels than this are discarded.
    int min_mode_pixels = 500;
    // Cap on simultaneously tracked Modes.
    int max_modes = 8;
    // Keep per-Mode member pixel lists (diagnostics only).
    bool keep_members = false;

    void validate() const;
};

// One tracked plane: the matched normal pair and its pixel support.
struct PlaneMode {
    Eigen::Vector3d normal_ref = Eigen::Vector3d::Zero();
    Eigen::Vector3d normal_cur = Eigen::Vector3d::Zero();
    int pixel_count = 0;
    std::vector<std::pair<int, int>> member_pixels;  // (u, v), only if keep_members
};

// Associate co-planar pixels between two normal maps and reduce each cluster
// to a median normal pair. Single-threaded; scan order fixes the output.
std::vector<PlaneMode> track_planes(const NormalMap& ref_normals, const NormalMap& cur_normals,
                                    const PlaneTrackerParams& params);

// Per-pixel Mode ids (-1 = unassigned) for the same inputs; debugging aid.
Image<int> mode_id_image(const NormalMap& ref_normals, const NormalMap& cur_normals,
                         const PlaneTrackerParams& params);

}  // namespace corvo
