#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "corvo/core/errors.hpp"
#include "corvo/rotation/plane_tracking.hpp"

namespace corvo {

struct RotationParams {
    // Dot product above which two normals count as equal (≈0.81 degrees).
    double parallel_tol = 0.9999;
    // Minimum angle between the two planes of a candidate pair, radians.
    double nonparallel_min_angle = 10.0 * M_PI / 180.0;
    // Residual gate: candidates (and final estimates) above this fall back.
    double max_residual = 3.0 * M_PI / 180.0;

    void validate() const;
};

// Which branch of the closed-form solution produced the rotation.
enum class RotationCase {
    kIdentity,        // both normal pairs unchanged
    kAxisFromNormal,  // one pair unchanged; its normal is the rotation axis
    kAxisFromDiffs,   // axis from the cross product of the two difference vectors
};

std::string to_string(RotationCase c);

struct PairRotation {
    Eigen::Matrix3d rotation;
    RotationCase case_tag;
};

struct RotationEstimate {
    Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
    double residual = 0.0;  // pixel-weighted mean angular error, radians
    RotationCase case_tag = RotationCase::kIdentity;
    std::pair<int, int> pair_used{-1, -1};  // Mode indices of the winning pair
};

// The two plane normals of a candidate pair are parallel to the implied axis
// (or to each other) so no angle can be recovered.
struct DegeneratePairError : DataError {
    using DataError::DataError;
};
// The closed-form rotation fails to map the pair's current normals onto the
// reference ones within max_residual.
struct InconsistentPairError : DataError {
    using DataError::DataError;
};

// Closed-form relative rotation from two matched plane-normal pairs.
// All four inputs must be unit length; the reference normals must be at least
// nonparallel_min_angle apart.
PairRotation rotation_from_pair(const Eigen::Vector3d& n1r, const Eigen::Vector3d& n1c,
                                const Eigen::Vector3d& n2r, const Eigen::Vector3d& n2c,
                                const RotationParams& params);

// Enumerate Mode pairs, solve each, score by weighted residual over all Modes.
// nullopt = under-constrained or nothing passed the residual gate; the caller
// substitutes identity and flags the frame.
std::optional<RotationEstimate> estimate_rotation(const std::vector<PlaneMode>& modes,
                                                  const RotationParams& params);

}  // namespace corvo
