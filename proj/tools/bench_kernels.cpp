#include <chrono>
#include <cstdio>
#include <cstdlib>

#include <Eigen/Geometry>

#include "corvo/core/geometry.hpp"
#include "corvo/io/synthetic.hpp"
#include "corvo/normal/normal_map.hpp"
#include "corvo/translation/axonometric.hpp"

using namespace corvo;

namespace {

template <typename F>
double best_ms(F&& f, int reps) {
    double best = 1e300;
    for (int i = 0; i < reps; ++i) {
        const auto t0 = std::chrono::steady_clock::now();
        f();
        const double ms =
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
                .count();
        if (ms < best) best = ms;
    }
    return best;
}

void row(const char* name, double omp_ms, double ref_ms) {
    std::printf("%-18s %9.3f ms %9.3f ms %6.2fx\n", name, omp_ms, ref_ms,
                omp_ms > 0.0 ? ref_ms / omp_ms : 0.0);
}

SyntheticSceneSpec corner_scene() {
    SyntheticSceneSpec spec;
    PlaneSpec p;
    p.texture.kind = TextureSpec::Kind::kSineMix;
    p.normal = Eigen::Vector3d::UnitZ();
    p.d = -3.0;  // wall z = 3
    spec.planes.push_back(p);
    p.normal = Eigen::Vector3d::UnitX();
    p.d = 2.0;  // wall x = -2
    spec.planes.push_back(p);
    p.normal = Eigen::Vector3d::UnitY();
    p.d = 2.0;  // floor y = -2
    spec.planes.push_back(p);
    spec.trajectory.push_back({0.0, PoseSE3::identity()});
    return spec;
}

}  // namespace

int main(int argc, char** argv) {
    const int reps = argc > 1 ? std::atoi(argv[1]) : 5;
    const SyntheticSceneSpec spec = corner_scene();
    const int w = spec.intrinsics.width, h = spec.intrinsics.height;

    Image<double> depth_raw, intensity;
    render_raw(spec, 0, depth_raw, intensity);
    DepthImage depth{depth_raw, Mask(w, h, 0)};
    for (int v = 0; v < h; ++v)
        for (int u = 0; u < w; ++u)
            if (depth_raw.at(u, v) > 0.0) depth.valid.at(u, v) = 1;

    const PointCloud cloud = backproject(depth, spec.intrinsics);
    const NormalMap raw = compute_raw_normals(cloud);
    const NormalMapParams smooth_params;  // cell_size 10
    const Eigen::Matrix3d rot =
        Eigen::AngleAxisd(0.3, Eigen::Vector3d(1, 2, 3).normalized()).toRotationMatrix();
    const ProjectionConfig proj_cfg;
    Image<double> d2, i2;

    std::printf("%-18s %12s %12s %7s   (%dx%d, best of %d)\n", "kernel", "parallel", "serial",
                "ratio", w, h, reps);
    row("render",
        best_ms([&] { render_raw(spec, 0, d2, i2); }, reps),
        best_ms([&] { reference::render_raw(spec, 0, d2, i2); }, reps));
    row("backproject",
        best_ms([&] { backproject(depth, spec.intrinsics); }, reps),
        best_ms([&] { reference::backproject(depth, spec.intrinsics); }, reps));
    row("align",
        best_ms([&] { align_cloud(cloud, rot); }, reps),
        best_ms([&] { reference::align_cloud(cloud, rot); }, reps));
    row("raw_normals",
        best_ms([&] { compute_raw_normals(cloud); }, reps),
        best_ms([&] { reference::compute_raw_normals(cloud); }, reps));
    row("smooth_normals",
        best_ms([&] { smooth_normals(raw, smooth_params); }, reps),
        best_ms([&] { reference::smooth_normals(raw, smooth_params); }, reps));
    row("project",
        best_ms([&] { project_axonometric(cloud, intensity, proj_cfg); }, reps),
        best_ms([&] { reference::project_axonometric(cloud, intensity, proj_cfg); }, reps));
    return 0;
}
