// Acceptance gate: nine checks with pinned tolerances, one verdict line each.
// Exit is nonzero when a blocking criterion fails; the optional external
// dataset check (C6) reports but never blocks.

#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <Eigen/Geometry>

#include "corvo/core/config.hpp"
#include "corvo/core/errors.hpp"
#include "corvo/core/geometry.hpp"
#include "corvo/eval/metrics.hpp"
#include "corvo/io/trajectory.hpp"
#include "corvo/kcc/kcc.hpp"
#include "corvo/pipeline/pipeline.hpp"
#include "corvo/rotation/rotation_solver.hpp"
#include "corvo/translation/translation.hpp"
#include "kcc_dense_oracle.hpp"
#include "test_scenes.hpp"

namespace {

using namespace corvo;
using Clock = std::chrono::steady_clock;

bool g_any_fail = false;

double secs_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

void emit(const char* id, bool pass, const std::string& detail, bool blocking = true) {
    std::printf("%s %s %s\n", id, pass ? "PASS" : "FAIL", detail.c_str());
    std::fflush(stdout);
    if (!pass && blocking) g_any_fail = true;
}

void emit_skip(const char* id, const std::string& why) {
    std::printf("%s SKIP %s\n", id, why.c_str());
    std::fflush(stdout);
}

std::string fmt(const char* format, ...) {
    char buf[512];
    va_list args;
    va_start(args, format);
    std::vsnprintf(buf, sizeof(buf), format, args);
    va_end(args);
    return buf;
}

template <typename T>
Image<T> circular_shift(const Image<T>& in, int dc, int dr) {
    const int w = in.width(), h = in.height();
    Image<T> out(w, h);
    for (int v = 0; v < h; ++v)
        for (int u = 0; u < w; ++u)
            out.at(u, v) = in.at(((u - dc) % w + w) % w, ((v - dr) % h + h) % h);
    return out;
}

std::vector<Frame> prerender(const SyntheticSceneSpec& spec) {
    std::vector<Frame> frames;
    frames.reserve(spec.trajectory.size());
    for (std::size_t i = 0; i < spec.trajectory.size(); ++i)
        frames.push_back(render_frame(spec, i, 10.0));
    return frames;
}

PipelineResult run_over(const std::vector<Frame>& frames, const RunConfig& cfg) {
    testing::MemorySource source(&frames);
    return run_pipeline(source, cfg);
}

// Byte-level comparison through the on-disk trajectory format.
bool same_trajectory_bytes(const Trajectory& a, const Trajectory& b) {
    namespace fs = std::filesystem;
    const fs::path dir =
        fs::temp_directory_path() / ("corvo_accept_" + std::to_string(::getpid()));
    fs::create_directories(dir);
    const std::string pa = (dir / "a.txt").string(), pb = (dir / "b.txt").string();
    write_trajectory(a, pa);
    write_trajectory(b, pb);
    auto slurp = [](const std::string& p) {
        std::ifstream in(p, std::ios::binary);
        std::stringstream ss;
        ss << in.rdbuf();
        return ss.str();
    };
    const bool same = slurp(pa) == slurp(pb);
    std::error_code ec;
    fs::remove_all(dir, ec);
    return same;
}

// C1: spectral correlator against the dense linear-algebra oracle.
void criterion1() {
    const auto t0 = Clock::now();
    std::mt19937 rng(101);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    const double sigmas[3] = {0.2, 2.0, 8.0};
    const int trials = 200, w = 16, h = 16;

    int ok = 0;
    double worst = 0.0;
    for (int t = 0; t < trials; ++t) {
        Image<double> x(w, h), z(w, h);
        for (std::size_t i = 0; i < x.size(); ++i) x[i] = uni(rng);
        for (std::size_t i = 0; i < z.size(); ++i) z[i] = uni(rng);

        KccParams p;
        p.sigma = sigmas[t % 3];
        p.target = gaussian_target(w, h, 1.0);

        const KccModel model = train(x, p);
        const CorrelationResult res = detect(model, z, /*keep_response=*/true);
        const Image<double> oracle = testing::dense_kcc_response(x, z, p);

        double max_diff = 0.0, max_abs = 0.0;
        for (std::size_t i = 0; i < oracle.size(); ++i) {
            max_diff = std::max(max_diff, std::abs(res.response[i] - oracle[i]));
            max_abs = std::max(max_abs, std::abs(oracle[i]));
        }
        const double rel = max_abs > 0.0 ? max_diff / max_abs : max_diff;
        worst = std::max(worst, rel);
        if (rel < 1e-8) ++ok;
    }
    const double dt = secs_since(t0);
    emit("C1", ok == trials && dt < 10.0,
         fmt("correlator vs dense oracle: %d/%d responses within 1e-8 relative "
             "(worst %.2e), sigma cycling {0.2, 2.0, 8.0}, %.2f s (budget 10)",
             ok, trials, worst, dt));
}

// C2: exact integer shift recovery on a projection-derived 256x256 image.
void criterion2() {
    SyntheticSceneSpec spec = testing::corner_scene(320, 240);
    spec.trajectory = testing::static_trajectory(1);
    const Frame frame = render_frame(spec, 0, 10.0);
    const PointCloud cloud = backproject(frame.depth, frame.intrinsics, 10.0);

    ProjectionConfig cfg;  // 256x256 grid, 1 cm cells
    AxonometricFrame key = project_axonometric(cloud, frame.intensity, cfg);
    const KccModel model = train_projection_model(key, KccParams{});

    std::mt19937 rng(202);
    std::uniform_int_distribution<int> pick(-64, 64);
    const int trials = 100;
    int ok = 0;
    for (int t = 0; t < trials; ++t) {
        const int dc = pick(rng), dr = pick(rng);
        AxonometricFrame cur;
        cur.color = circular_shift(key.color, dc, dr);
        cur.depth = circular_shift(key.depth, dc, dr);
        cur.valid = circular_shift(key.valid, dc, dr);
        const auto shift = estimate_planar_shift(key, cur, model, cfg);
        if (shift && shift->shift_col == dc && shift->shift_row == dr) ++ok;
    }
    emit("C2", ok == trials,
         fmt("planar shift recovery: %d/%d random integer shifts |s|<=64 "
             "recovered exactly on a 256x256 projection (trained once)",
             ok, trials));
}

// C3: closed-form rotation from two plane-normal pairs.
void criterion3() {
    const auto t0 = Clock::now();
    std::mt19937 rng(303);
    std::normal_distribution<double> g(0.0, 1.0);
    std::uniform_real_distribution<double> uangle(deg_to_rad(2.0), deg_to_rad(30.0));
    std::uniform_real_distribution<double> usep(deg_to_rad(10.5), deg_to_rad(169.5));
    const RotationParams params;

    auto rand_unit = [&] {
        Eigen::Vector3d v;
        do v = Eigen::Vector3d(g(rng), g(rng), g(rng));
        while (v.norm() < 1e-6);
        return Eigen::Vector3d(v.normalized());
    };
    // 0.2-degree tilt along a random tangent direction.
    auto perturb = [&](const Eigen::Vector3d& n) {
        Eigen::Vector3d t;
        do t = rand_unit().cross(n);
        while (t.norm() < 1e-6);
        t.normalize();
        return Eigen::Vector3d(Eigen::AngleAxisd(deg_to_rad(0.2), t) * n);
    };

    const int trials = 1000;
    int exact_ok = 0;
    double worst_exact = 0.0;
    std::vector<double> noisy_err_deg;
    noisy_err_deg.reserve(trials);

    for (int t = 0; t < trials; ++t) {
        const Eigen::Matrix3d truth =
            Eigen::AngleAxisd(uangle(rng), rand_unit()).toRotationMatrix();

        // Both normals must swing clear of the fixed-pair deadband (~0.81 deg).
        Eigen::Vector3d n1r, n2r, n1c, n2c;
        do {
            n1r = rand_unit();
            Eigen::Vector3d u;
            do {
                const Eigen::Vector3d v = rand_unit();
                u = v - v.dot(n1r) * n1r;
            } while (u.norm() < 1e-6);
            u.normalize();
            const double sep = usep(rng);
            n2r = std::cos(sep) * n1r + std::sin(sep) * u;
            n1c = truth.transpose() * n1r;
            n2c = truth.transpose() * n2r;
        } while (angle_between(n1r, n1c) < deg_to_rad(1.2) ||
                 angle_between(n2r, n2c) < deg_to_rad(1.2));

        try {
            const PairRotation pr = rotation_from_pair(n1r, n1c, n2r, n2c, params);
            const double err = geodesic_angle(pr.rotation, truth);
            worst_exact = std::max(worst_exact, err);
            if (err < 1e-7) ++exact_ok;
        } catch (const DataError&) {
            worst_exact = M_PI;
        }

        try {
            const PairRotation pr =
                rotation_from_pair(n1r, perturb(n1c), n2r, perturb(n2c), params);
            noisy_err_deg.push_back(rad_to_deg(geodesic_angle(pr.rotation, truth)));
        } catch (const DataError&) {
            noisy_err_deg.push_back(180.0);
        }
    }

    std::nth_element(noisy_err_deg.begin(), noisy_err_deg.begin() + trials / 2,
                     noisy_err_deg.end());
    const double median_noisy = noisy_err_deg[trials / 2];
    const double dt = secs_since(t0);
    emit("C3", exact_ok == trials && median_noisy < 0.5 && dt < 5.0,
         fmt("closed-form rotation: %d/%d noiseless within 1e-7 rad (worst %.2e); "
             "median error %.4f deg under 0.2-deg normal noise (bound 0.5); %.2f s (budget 5)",
             exact_ok, trials, worst_exact, median_noisy, dt));
}

int main_impl() {
    criterion1();
    criterion2();
    criterion3();

    RunConfig serial_cfg;
    serial_cfg.single_thread = true;
    RunConfig concurrent_cfg;

    // C4 part 1 + first half of C9: noiseless 200-frame orbit.
    double ate_clean = -1.0, drift_deg = -1.0;
    bool bytes_clean = false;
    {
        SyntheticSceneSpec spec = testing::corner_scene(320, 240);
        spec.trajectory = testing::orbit_trajectory(200);
        const std::vector<Frame> frames = prerender(spec);

        const PipelineResult single = run_over(frames, serial_cfg);
        const PipelineResult multi = run_over(frames, concurrent_cfg);
        ate_clean = compute_ate(single.trajectory, spec.trajectory, /*align=*/true).rmse;
        drift_deg = rad_to_deg(geodesic_angle(single.trajectory.back().pose.rotation,
                                              spec.trajectory.back().pose.rotation));
        bytes_clean = same_trajectory_bytes(single.trajectory, multi.trajectory);
    }

    // C4 part 2, C5, second half of C9: noisy variant of the same orbit.
    double ate_cell10 = -1.0, ate_cell5 = -1.0, ate_cell1 = -1.0;
    bool bytes_noisy = false;
    {
        SyntheticSceneSpec spec = testing::corner_scene(320, 240, /*noise_sigma=*/0.005,
                                                        /*seed=*/7);
        spec.trajectory = testing::orbit_trajectory(200);
        const std::vector<Frame> frames = prerender(spec);

        const PipelineResult r10 = run_over(frames, serial_cfg);  // cell_size 10 default
        ate_cell10 = compute_ate(r10.trajectory, spec.trajectory, true).rmse;
        bytes_noisy =
            same_trajectory_bytes(r10.trajectory, run_over(frames, concurrent_cfg).trajectory);

        RunConfig cfg5 = serial_cfg;
        cfg5.normal.cell_size = 5;
        ate_cell5 = compute_ate(run_over(frames, cfg5).trajectory, spec.trajectory, true).rmse;

        RunConfig cfg1 = serial_cfg;
        cfg1.normal.cell_size = 1;
        ate_cell1 = compute_ate(run_over(frames, cfg1).trajectory, spec.trajectory, true).rmse;
    }

    emit("C4", ate_clean < 0.02 && drift_deg < 1.0 && ate_cell10 < 0.05,
         fmt("end-to-end 200-frame orbit: noiseless ATE rmse %.6f m (bound 0.02), final "
             "rotation drift %.4f deg (bound 1); 5 mm depth noise ATE rmse %.6f m (bound 0.05)",
             ate_clean, drift_deg, ate_cell10));

    emit("C5", ate_cell1 > ate_cell5 && ate_cell5 > ate_cell10,
         fmt("smoothing ablation on the noisy orbit: ATE rmse %.6f (cell 1) > %.6f (cell 5) "
             "> %.6f (cell 10), strictly decreasing",
             ate_cell1, ate_cell5, ate_cell10));

    // C6: optional external dataset; reported but never blocking.
    if (const char* icl = std::getenv("CORVO_ICL_DIR")) {
        struct Entry {
            const char* name;
            double bound;
        };
        const Entry entries[] = {{"office0", 0.11}, {"office2_part1", 0.05}};
        bool all_ok = true;
        std::string detail = "icl-nuim (non-blocking):";
        for (const Entry& e : entries) {
            try {
                const std::string manifest_path =
                    std::string(icl) + "/" + e.name + "/manifest.txt";
                const SequenceManifest manifest = load_manifest(manifest_path);
                if (manifest.groundtruth_path.empty())
                    throw DataError(manifest_path + ": no groundtruth");
                SequenceReader reader(manifest, 10.0);
                const PipelineResult res = run_pipeline(reader, serial_cfg);
                const Trajectory gt =
                    read_trajectory(manifest.root + "/" + manifest.groundtruth_path);
                const double rmse = compute_ate(res.trajectory, gt, true).rmse;
                detail += fmt(" %s rmse %.4f m (bound %.2f)", e.name, rmse, e.bound);
                all_ok = all_ok && rmse <= e.bound;
            } catch (const std::exception& ex) {
                detail += fmt(" %s unavailable (%s)", e.name, ex.what());
                all_ok = false;
            }
        }
        emit("C6", all_ok, detail, /*blocking=*/false);
    } else {
        emit_skip("C6", "icl-nuim benchmark: CORVO_ICL_DIR not set (optional external dataset)");
    }

    // C7: sustained throughput at full resolution.
    {
        SyntheticSceneSpec spec = testing::corner_scene(640, 480);
        spec.trajectory = testing::orbit_trajectory(60);
        const std::vector<Frame> frames = prerender(spec);

        const PipelineResult conc = run_over(frames, concurrent_cfg);
        const double fps = conc.wall_ms > 0.0
                               ? 1000.0 * static_cast<double>(conc.frames_in) / conc.wall_ms
                               : 0.0;
        bool pass = fps >= 30.0;
        std::string detail = fmt("throughput: %.1f Hz sustained over %lld frames at 640x480, "
                                 "concurrent (need >=30)",
                                 fps, static_cast<long long>(conc.frames_in));

        const unsigned hc = std::thread::hardware_concurrency();
        if (hc >= 2) {
            const PipelineResult single = run_over(frames, serial_cfg);
            const double ratio = conc.wall_ms > 0.0 ? single.wall_ms / conc.wall_ms : 0.0;
            detail += fmt("; speedup vs single-thread %.2fx (need >=1.5)", ratio);
            pass = pass && ratio >= 1.5;
        } else {
            detail += fmt("; speedup check SKIP (hardware_concurrency=%u, needs >=2 cores)", hc);
        }
        emit("C7", pass, detail);
    }

    // C8: evaluator sanity against hand-computed values.
    {
        std::mt19937 rng(808);
        std::normal_distribution<double> g(0.0, 0.05);
        auto random_walk = [&](int n) {
            Trajectory traj;
            Eigen::Vector3d pos = Eigen::Vector3d::Zero();
            for (int i = 0; i < n; ++i) {
                pos += Eigen::Vector3d(g(rng), g(rng), g(rng));
                TrajectoryEntry e;
                e.timestamp = i / 30.0;
                e.pose.translation = pos;
                traj.push_back(e);
            }
            return traj;
        };

        const Trajectory same = random_walk(50);
        const double rmse_same = compute_ate(same, same, true).rmse;

        Trajectory gt2(2), est2(2);
        gt2[0].timestamp = est2[0].timestamp = 0.0;
        gt2[1].timestamp = est2[1].timestamp = 1.0;
        est2[0].pose.translation = Eigen::Vector3d(0.03, 0.0, 0.0);
        est2[1].pose.translation = Eigen::Vector3d(0.0, 0.04, 0.0);
        const MetricReport hand = compute_ate(est2, gt2, /*align=*/false);

        const Trajectory est_r = random_walk(64);
        const Trajectory gt_r = random_walk(64);
        const MetricReport rando = compute_ate(est_r, gt_r, false);
        const double identity_gap =
            std::abs(rando.rmse * rando.rmse -
                     (rando.mean * rando.mean + rando.std_dev * rando.std_dev));

        const bool pass = rmse_same < 1e-12 &&
                          std::abs(hand.rmse - std::sqrt(0.00125)) < 1e-9 &&
                          std::abs(hand.sse - 0.0025) < 1e-12 && identity_gap < 1e-9;
        emit("C8", pass,
             fmt("evaluator: identical trajectories rmse %.1e; errors {0.03, 0.04} give "
                 "rmse %.9f (expect 0.035355339) and sse %.6f (expect 0.0025); "
                 "rmse^2=mean^2+std^2 holds to %.1e",
                 rmse_same, hand.rmse, hand.sse, identity_gap));
    }

    emit("C9", bytes_clean && bytes_noisy,
         fmt("determinism: single-thread and concurrent trajectories byte-identical on the "
             "noiseless (%s) and noisy (%s) 200-frame suites",
             bytes_clean ? "yes" : "NO", bytes_noisy ? "yes" : "NO"));

    return g_any_fail ? 1 : 0;
}

}  // namespace

int main() {
    try {
        return main_impl();
    } catch (const std::exception& e) {
        std::fprintf(stderr, "acceptance harness error: %s\n", e.what());
        return 2;
    }
}
