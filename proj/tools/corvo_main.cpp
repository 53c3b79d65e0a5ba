#include <cstdint>
#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#if defined(__GLIBC__)
#include <malloc.h>
#endif

#include "CLI11.hpp"
#include "corvo/core/config.hpp"
#include "corvo/core/errors.hpp"
#include "corvo/core/log.hpp"
#include "corvo/eval/metrics.hpp"
#include "corvo/io/dataset.hpp"
#include "corvo/io/synthetic.hpp"
#include "corvo/io/trajectory.hpp"
#include "corvo/pipeline/pipeline.hpp"

namespace {

using namespace corvo;

int cmd_run(const std::string& manifest_path, const std::string& out_path, RunConfig config,
            const std::string& diagnostics_path) {
    const SequenceManifest manifest = load_manifest(manifest_path);
    SequenceReader reader(manifest, config.max_depth_range);
    const PipelineResult result = run_pipeline(reader, config);
    write_trajectory(result.trajectory, out_path);
    if (!diagnostics_path.empty()) write_diagnostics(result, config, diagnostics_path);
    const double fps =
        result.wall_ms > 0.0 ? 1000.0 * static_cast<double>(result.frames_in) / result.wall_ms : 0.0;
    std::printf("frames=%lld skipped=%lld dropped=%lld wall_ms=%.1f fps=%.1f\n",
                static_cast<long long>(result.frames_in),
                static_cast<long long>(result.frames_skipped),
                static_cast<long long>(result.frames_dropped), result.wall_ms, fps);
    return 0;
}

int cmd_synth(const std::string& spec_path, const std::string& out_dir, bool seed_set,
              std::uint64_t seed) {
    SyntheticSceneSpec spec = load_scene_spec(spec_path);
    if (seed_set) spec.seed = seed;
    write_sequence(spec, out_dir);
    std::printf("wrote %zu frames to %s\n", spec.trajectory.size(), out_dir.c_str());
    return 0;
}

int cmd_eval(const std::string& est_path, const std::string& gt_path,
             const std::string& report_path, bool no_align, double max_dt) {
    const Trajectory est = read_trajectory(est_path);
    const Trajectory gt = read_trajectory(gt_path);
    const MetricReport report = compute_ate(est, gt, !no_align, max_dt);
    std::fputs(report.pretty().c_str(), stdout);
    if (!report_path.empty()) {
        std::FILE* f = std::fopen(report_path.c_str(), "w");
        if (!f) throw LoadError(report_path + ": cannot open for writing");
        std::fputs(report.csv().c_str(), f);
        std::fclose(f);
    }
    return 0;
}

int cmd_drift(const std::string& est_path, const std::string& tag_path) {
    const Trajectory est = read_trajectory(est_path);
    const Trajectory tags = read_trajectory(tag_path);
    if (est.size() < 2) throw DataError(est_path + ": need at least two poses");
    if (tags.size() < 2) throw DataError(tag_path + ": need at least two poses");
    double rot_deg = 0.0;
    const double drift = drift_error(est.front().pose, est.back().pose, tags.front().pose,
                                     tags.back().pose, &rot_deg);
    std::printf("drift_m=%.6f rotation_residual_deg=%.4f\n", drift, rot_deg);
    return 0;
}

// Aligned XY(Z) polylines, one labeled series per input trajectory; series
// after the first are rigidly aligned onto the first for comparison.
int cmd_plot_data(const std::vector<std::string>& paths, const std::string& out_path,
                  double max_dt) {
    std::FILE* f = std::fopen(out_path.c_str(), "w");
    if (!f) throw LoadError(out_path + ": cannot open for writing");
    std::fprintf(f, "series,timestamp,x,y,z\n");
    Trajectory first;
    for (std::size_t i = 0; i < paths.size(); ++i) {
        Trajectory traj = read_trajectory(paths[i]);
        TrajectoryAlignment align;  // identity for the first series
        if (i == 0)
            first = traj;
        else
            align = align_trajectories(traj, first, max_dt);
        for (const TrajectoryEntry& e : traj) {
            const Eigen::Vector3d p = align.apply(e.pose.translation);
            std::fprintf(f, "%s,%.6f,%.9g,%.9g,%.9g\n", paths[i].c_str(), e.timestamp, p.x(),
                         p.y(), p.z());
        }
    }
    std::fclose(f);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
#if defined(__GLIBC__)
    // Frame-sized buffers churn every frame; keep them on the heap instead of
    // bouncing through mmap/munmap (and the page faults that come with it).
    mallopt(M_MMAP_THRESHOLD, 256 << 20);
#endif
    CLI::App app{"corvo: decoupled RGB-D visual odometry"};
    app.require_subcommand(1);

    std::string manifest_path, out_path, config_path, diagnostics_path;
    std::int64_t max_frames = -1;
    bool single_thread = false, live_drop = false;
    std::uint64_t seed = 0;
    CLI::App* run = app.add_subcommand("run", "run odometry over a sequence");
    run->add_option("manifest", manifest_path, "sequence manifest file")->required();
    run->add_option("trajectory", out_path, "output trajectory file")->required();
    CLI::Option* run_config = run->add_option("--config", config_path, "JSON config file");
    CLI::Option* run_seed = run->add_option("--seed", seed, "seed override");
    CLI::Option* run_max = run->add_option("--max-frames", max_frames, "process at most N frames");
    run->add_flag("--single-thread", single_thread, "run the stages sequentially");
    run->add_flag("--live-drop", live_drop, "drop stale frames instead of blocking");
    run->add_option("--diagnostics", diagnostics_path, "per-frame diagnostics CSV");

    std::string spec_path, synth_dir;
    CLI::App* synth = app.add_subcommand("synth", "render a synthetic sequence");
    synth->add_option("spec", spec_path, "scene-spec JSON file")->required();
    synth->add_option("out_dir", synth_dir, "output sequence directory")->required();
    CLI::Option* synth_seed = synth->add_option("--seed", seed, "depth-noise seed override");

    std::string est_path, gt_path, report_path;
    bool no_align = false;
    double max_dt = 0.02;
    CLI::App* eval = app.add_subcommand("eval", "absolute trajectory error");
    eval->add_option("estimate", est_path, "estimated trajectory")->required();
    eval->add_option("groundtruth", gt_path, "ground-truth trajectory")->required();
    eval->add_option("--report", report_path, "write the CSV report here");
    eval->add_flag("--no-align", no_align, "skip rigid alignment");
    eval->add_option("--max-dt", max_dt, "association tolerance, seconds");

    std::string tag_path;
    CLI::App* drift = app.add_subcommand("drift", "endpoint drift against fiducial poses");
    drift->add_option("estimate", est_path, "estimated trajectory")->required();
    drift->add_option("tags", tag_path, "fiducial-anchored poses (first/last used)")->required();

    std::vector<std::string> plot_paths;
    CLI::App* plot = app.add_subcommand("plot-data", "aligned polyline CSV for plotting");
    plot->add_option("trajectories", plot_paths, "trajectory files")->required()->expected(-1);
    plot->add_option("--out", out_path, "output CSV")->required();
    plot->add_option("--max-dt", max_dt, "association tolerance, seconds");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (run->parsed()) {
            RunConfig config;
            if (*run_config) config = load_config(config_path);
            if (*run_seed) config.seed = seed;
            if (*run_max) config.max_frames = max_frames;
            if (single_thread) config.single_thread = true;
            if (live_drop) config.live_drop = true;
            return cmd_run(manifest_path, out_path, std::move(config), diagnostics_path);
        }
        if (synth->parsed()) return cmd_synth(spec_path, synth_dir, static_cast<bool>(*synth_seed), seed);
        if (eval->parsed()) return cmd_eval(est_path, gt_path, report_path, no_align, max_dt);
        if (drift->parsed()) return cmd_drift(est_path, tag_path);
        if (plot->parsed()) return cmd_plot_data(plot_paths, out_path, max_dt);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const LoadError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const DataError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "internal error: %s\n", e.what());
        return 3;
    }
    return 0;
}
