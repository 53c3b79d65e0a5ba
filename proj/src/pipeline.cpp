#include "corvo/pipeline/pipeline.hpp"

#include <atomic>
#include <chrono>
#include <cstdio>
#include <exception>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "corvo/core/errors.hpp"
#include "corvo/core/geometry.hpp"
#include "corvo/core/log.hpp"
#include "corvo/normal/normal_map.hpp"
#include "corvo/pipeline/channel.hpp"
#include "corvo/rotation/rotation_solver.hpp"
#include "corvo/translation/translation.hpp"

namespace corvo {
namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

struct Stage1Msg {
    std::int64_t id = 0;
    double timestamp = 0.0;
    Image<double> intensity;
    PointCloud cloud;
    NormalMap normals;
    double stage1_ms = 0.0;
};

struct Stage2Msg {
    std::int64_t id = 0;
    double timestamp = 0.0;
    Image<double> intensity;
    PointCloud cloud;
    Eigen::Matrix3d world_rotation = Eigen::Matrix3d::Identity();
    std::string case_tag;
    double residual_deg = 0.0;
    bool rotation_fallback = false;
    std::int64_t rotation_keyframe_id = -1;
    int modes = 0;
    double stage1_ms = 0.0;
    double stage2_ms = 0.0;
};

// Stage 1: depth -> organized cloud -> smoothed normal map. Stateless.
class NormalStage {
  public:
    explicit NormalStage(const RunConfig& config) : config_(config) {}

    Stage1Msg process(Frame frame) const {
        const auto t0 = Clock::now();
        Stage1Msg out;
        out.id = frame.id;
        out.timestamp = frame.timestamp;
        out.cloud = backproject(frame.depth, frame.intrinsics, config_.max_depth_range);
        out.normals = smooth_normals(compute_raw_normals(out.cloud), config_.normal);
        out.intensity = std::move(frame.intensity);
        out.stage1_ms = ms_since(t0);
        return out;
    }

  private:
    const RunConfig& config_;
};

// Stage 2: plane tracking against the rotation keyframe; world rotation is
// keyframe rotation composed with the closed-form relative estimate.
class RotationStage {
  public:
    explicit RotationStage(const RunConfig& config) : config_(config) {}

    Stage2Msg process(Stage1Msg in) {
        const auto t0 = Clock::now();
        Stage2Msg out;
        out.id = in.id;
        out.timestamp = in.timestamp;
        out.stage1_ms = in.stage1_ms;

        if (!have_keyframe_) {
            out.world_rotation = Eigen::Matrix3d::Identity();
            out.case_tag = "keyframe_init";
            adopt_keyframe(std::move(in.normals), out.world_rotation, in.id);
            out.rotation_keyframe_id = key_id_;
        } else {
            const std::vector<PlaneMode> modes =
                track_planes(key_normals_, in.normals, config_.tracker);
            out.modes = static_cast<int>(modes.size());
            out.rotation_keyframe_id = key_id_;
            int coverage = 0;
            for (const PlaneMode& m : modes) coverage += m.pixel_count;

            bool refresh = false;
            const std::optional<RotationEstimate> est = estimate_rotation(modes, config_.rotation);
            if (est) {
                out.world_rotation = key_rotation_ * est->rotation;
                out.case_tag = to_string(est->case_tag);
                out.residual_deg = rad_to_deg(est->residual);
                // The first successful match after a refresh sets the coverage
                // baseline the decay trigger is measured against.
                if (baseline_coverage_ < 0) baseline_coverage_ = coverage;
                refresh = coverage < config_.rotation_coverage_fraction * baseline_coverage_;
            } else {
                // Under-constrained (or nothing passed the residual gate):
                // hold the keyframe's orientation and rebase on this frame.
                out.world_rotation = key_rotation_;
                out.case_tag = "fallback";
                out.rotation_fallback = true;
                refresh = true;
            }
            if (refresh) adopt_keyframe(std::move(in.normals), out.world_rotation, in.id);
        }
        out.intensity = std::move(in.intensity);
        out.cloud = std::move(in.cloud);
        out.stage2_ms = ms_since(t0);
        return out;
    }

  private:
    void adopt_keyframe(NormalMap normals, const Eigen::Matrix3d& world_rotation,
                        std::int64_t id) {
        key_normals_ = std::move(normals);
        key_rotation_ = world_rotation;
        key_id_ = id;
        baseline_coverage_ = -1;
        have_keyframe_ = true;
    }

    const RunConfig& config_;
    bool have_keyframe_ = false;
    NormalMap key_normals_;
    Eigen::Matrix3d key_rotation_ = Eigen::Matrix3d::Identity();
    std::int64_t key_id_ = -1;
    int baseline_coverage_ = -1;
};

// Stage 3: rotation-aligned axonometric projection, correlator shift against
// the translation keyframe, pose assembly. Sole owner of the trajectory.
class TranslationStage {
  public:
    TranslationStage(const RunConfig& config, PipelineResult& result)
        : config_(config), result_(result), kcc_base_(config.kcc) {
        if (kcc_base_.target.empty()) {
            const int n = config.projection.grid_size;
            kcc_base_.target = config.kcc_one_hot ? one_hot_target(n, n)
                                                  : gaussian_target(n, n, config.kcc_target_std);
        }
    }

    void process(Stage2Msg in) {
        const auto t0 = Clock::now();
        const PointCloud aligned = align_cloud(in.cloud, in.world_rotation);
        AxonometricFrame proj = project_axonometric(aligned, in.intensity, config_.projection);

        FrameDiagnostics diag;
        diag.frame_id = in.id;
        diag.timestamp = in.timestamp;
        diag.case_tag = std::move(in.case_tag);
        diag.residual_deg = in.residual_deg;
        diag.rotation_fallback = in.rotation_fallback;
        diag.rotation_keyframe_id = in.rotation_keyframe_id;
        diag.modes = in.modes;
        diag.stage1_ms = in.stage1_ms;
        diag.stage2_ms = in.stage2_ms;

        Eigen::Vector3d t_world;
        if (!have_keyframe_) {
            t_world = Eigen::Vector3d::Zero();
            diag.translation_fallback = proj.valid_count() == 0;
            adopt_keyframe(std::move(proj), t_world, in.id);
            diag.translation_keyframe_id = key_id_;
        } else {
            const TranslationMeasurement m = measure_translation(
                key_frame_, proj, key_model_, config_.projection, config_.translation);
            diag.psr = m.psr;
            diag.matched_pixels = m.matched_pixels;
            diag.shift_col = m.shift_col;
            diag.shift_row = m.shift_row;
            diag.translation_keyframe_id = key_id_;  // what this frame was matched against
            if (m.has_estimate) {
                // The scene content shifted by d in the rotation-aligned frame,
                // so the camera moved by -d relative to the keyframe.
                t_world = key_t_ - m.d;
            } else {
                t_world = prev_pose_.translation;  // hold position, flag, rebase below
                diag.translation_fallback = true;
            }
            // Keyframe degradation is judged after the frame's own estimate.
            if (!m.has_estimate || m.psr < config_.translation.psr_keyframe_threshold)
                adopt_keyframe(std::move(proj), t_world, in.id);
        }

        const PoseSE3 pose = PoseSE3::from_matrix(in.world_rotation, t_world);
        diag.relative = compose(prev_pose_.inverse(), pose);
        prev_pose_ = pose;
        result_.trajectory.push_back({in.timestamp, pose});
        diag.stage3_ms = ms_since(t0);
        result_.diagnostics.push_back(std::move(diag));
    }

  private:
    void adopt_keyframe(AxonometricFrame proj, const Eigen::Vector3d& t_world, std::int64_t id) {
        key_model_ = train_projection_model(proj, kcc_base_);
        key_frame_ = std::move(proj);
        key_t_ = t_world;
        key_id_ = id;
        have_keyframe_ = true;
    }

    const RunConfig& config_;
    PipelineResult& result_;
    KccParams kcc_base_;
    bool have_keyframe_ = false;
    AxonometricFrame key_frame_;
    KccModel key_model_;
    Eigen::Vector3d key_t_ = Eigen::Vector3d::Zero();
    std::int64_t key_id_ = -1;
    PoseSE3 prev_pose_;
};

}  // namespace

PipelineResult run_pipeline(FrameSource& source, const RunConfig& config) {
    config.validate();
    PipelineResult result;
    NormalStage stage1(config);
    RotationStage stage2(config);
    TranslationStage stage3(config, result);

    const auto t0 = Clock::now();
    std::atomic<bool> abort{false};
    std::int64_t delivered = 0;

    // Decode failures are skipped, not fatal; everything else aborts the run.
    auto pull = [&]() -> std::optional<Frame> {
        while (!abort.load(std::memory_order_relaxed)) {
            if (config.max_frames >= 0 && delivered >= config.max_frames) return std::nullopt;
            try {
                std::optional<Frame> frame = source.next();
                if (frame) {
                    ++delivered;
                    ++result.frames_in;
                }
                return frame;
            } catch (const LoadError& e) {
                ++result.frames_skipped;
                log_warn(std::string("skipping undecodable frame: ") + e.what());
            }
        }
        return std::nullopt;
    };

    if (config.single_thread) {
        while (std::optional<Frame> frame = pull())
            stage3.process(stage2.process(stage1.process(std::move(*frame))));
        result.wall_ms = ms_since(t0);
        return result;
    }

    BoundedChannel<Stage1Msg> ch1(static_cast<std::size_t>(config.buffer_depth));
    BoundedChannel<Stage2Msg> ch2(static_cast<std::size_t>(config.buffer_depth));

    std::mutex error_mutex;
    std::exception_ptr error;
    auto fail = [&](std::exception_ptr e) {
        {
            std::lock_guard<std::mutex> lock(error_mutex);
            if (!error) error = e;
        }
        abort.store(true, std::memory_order_relaxed);
        ch1.close();  // unblock whoever is waiting on either side
        ch2.close();
    };

    std::atomic<std::int64_t> dropped{0};
    std::thread ingest([&] {
        try {
            while (std::optional<Frame> frame = pull()) {
                Stage1Msg msg = stage1.process(std::move(*frame));
                if (config.live_drop) {
                    if (ch1.push_drop_oldest(std::move(msg)))
                        dropped.fetch_add(1, std::memory_order_relaxed);
                } else {
                    ch1.push(std::move(msg));
                }
            }
        } catch (...) {
            fail(std::current_exception());
        }
        ch1.close();
    });

    std::thread rotate([&] {
        try {
            while (std::optional<Stage1Msg> msg = ch1.pop()) ch2.push(stage2.process(std::move(*msg)));
        } catch (...) {
            fail(std::current_exception());
        }
        ch2.close();
    });

    try {
        while (std::optional<Stage2Msg> msg = ch2.pop()) stage3.process(std::move(*msg));
    } catch (...) {
        fail(std::current_exception());
    }

    ingest.join();
    rotate.join();
    result.frames_dropped = dropped.load();
    if (error) std::rethrow_exception(error);
    result.wall_ms = ms_since(t0);
    return result;
}

void write_diagnostics(const PipelineResult& result, const RunConfig& config,
                       const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw LoadError(path + ": cannot open for writing");
    std::fprintf(f, "# config %s\n", config_to_json(config).c_str());
    std::fprintf(f,
                 "frame_id,timestamp,case,residual_deg,psr,rotation_fallback,"
                 "translation_fallback,rotation_keyframe,translation_keyframe,modes,"
                 "matched_pixels,shift_col,shift_row,rel_tx,rel_ty,rel_tz,rel_qx,rel_qy,"
                 "rel_qz,rel_qw,stage1_ms,stage2_ms,stage3_ms\n");
    for (const FrameDiagnostics& d : result.diagnostics) {
        const Eigen::Vector3d& t = d.relative.translation;
        const Eigen::Quaterniond& q = d.relative.rotation;
        std::fprintf(f,
                     "%lld,%.6f,%s,%.6g,%.6g,%d,%d,%lld,%lld,%d,%d,%d,%d,"
                     "%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%.3f,%.3f,%.3f\n",
                     static_cast<long long>(d.frame_id), d.timestamp, d.case_tag.c_str(),
                     d.residual_deg, d.psr, d.rotation_fallback ? 1 : 0,
                     d.translation_fallback ? 1 : 0, static_cast<long long>(d.rotation_keyframe_id),
                     static_cast<long long>(d.translation_keyframe_id), d.modes, d.matched_pixels,
                     d.shift_col, d.shift_row, t.x(), t.y(), t.z(), q.x(), q.y(), q.z(), q.w(),
                     d.stage1_ms, d.stage2_ms, d.stage3_ms);
    }
    std::fclose(f);
}

}  // namespace corvo
