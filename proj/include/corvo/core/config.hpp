#pragma once

#include <cstdint>
#include <string>

#include "corvo/kcc/kcc.hpp"
#include "corvo/normal/normal_map.hpp"
#include "corvo/rotation/plane_tracking.hpp"
#include "corvo/rotation/rotation_solver.hpp"
#include "corvo/translation/axonometric.hpp"
#include "corvo/translation/translation.hpp"

namespace corvo {

// Every tunable in one place; defaults are the documented working set.
struct RunConfig {
    double max_depth_range = 10.0;  // meters; deeper pixels are invalid

    NormalMapParams normal;
    PlaneTrackerParams tracker;
    RotationParams rotation;
    KccParams kcc;  // target built per grid at runtime from the two fields below
    double kcc_target_std = 1.0;
    bool kcc_one_hot = false;
    ProjectionConfig projection;
    TranslationParams translation;

    // Pipeline behavior.
    int buffer_depth = 4;
    double rotation_coverage_fraction = 0.5;  // keyframe refresh trigger
    bool single_thread = false;
    bool live_drop = false;  // drop stale frames instead of applying backpressure
    std::uint64_t seed = 0;
    std::int64_t max_frames = -1;  // -1 = no limit

    void validate() const;
};

// JSON round-trip. to_json emits every effective value; parsing that string
// back reproduces the config exactly. Unknown keys are rejected.
RunConfig config_from_json(const std::string& json_text);
RunConfig load_config(const std::string& path);
std::string config_to_json(const RunConfig& config);

}  // namespace corvo
