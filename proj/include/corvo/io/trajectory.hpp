#pragma once

#include <string>

#include "corvo/core/pose.hpp"

namespace corvo {

// One pose per line: "timestamp tx ty tz qx qy qz qw" (quaternion w last),
// '#' starts a comment. Written values survive a round-trip to better than
// nine significant digits.
void write_trajectory(const Trajectory& traj, const std::string& path);
Trajectory read_trajectory(const std::string& path);

}  // namespace corvo
