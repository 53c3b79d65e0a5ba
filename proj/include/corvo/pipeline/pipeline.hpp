#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "corvo/core/config.hpp"
#include "corvo/core/frame.hpp"
#include "corvo/core/pose.hpp"
#include "corvo/io/dataset.hpp"

namespace corvo {

struct FrameDiagnostics {
    std::int64_t frame_id = 0;
    double timestamp = 0.0;
    std::string case_tag;  // rotation branch taken, "fallback", or "keyframe_init"
    double residual_deg = 0.0;
    double psr = 0.0;
    bool rotation_fallback = false;
    bool translation_fallback = false;
    std::int64_t rotation_keyframe_id = -1;
    std::int64_t translation_keyframe_id = -1;
    int modes = 0;
    int matched_pixels = 0;
    int shift_col = 0;
    int shift_row = 0;
    double stage1_ms = 0.0, stage2_ms = 0.0, stage3_ms = 0.0;
    // World-pose step from the previous emitted frame to this one; folding
    // these relatives reproduces the trajectory (composition check).
    PoseSE3 relative;
};

struct PipelineResult {
    Trajectory trajectory;
    std::vector<FrameDiagnostics> diagnostics;
    std::int64_t frames_in = 0;
    std::int64_t frames_skipped = 0;  // undecodable input
    std::int64_t frames_dropped = 0;  // live mode evictions
    double wall_ms = 0.0;
};

// Drives the three stages (normals -> rotation -> translation) over the
// stream: concurrently over bounded channels, or strictly sequentially when
// config.single_thread is set. Both paths run identical per-frame state
// machines, so the trajectories they produce are identical.
PipelineResult run_pipeline(FrameSource& source, const RunConfig& config);

// One CSV row per frame, preceded by a '# config <json>' line echoing the
// effective configuration.
void write_diagnostics(const PipelineResult& result, const RunConfig& config,
                       const std::string& path);

}  // namespace corvo
