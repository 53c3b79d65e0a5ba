#include "corvo/io/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>

#include <json.hpp>

#include "corvo/core/errors.hpp"
#include "corvo/io/png_io.hpp"
#include "corvo/io/trajectory.hpp"

namespace fs = std::filesystem;

namespace corvo {

void SyntheticSceneSpec::validate() const {
    if (planes.size() < 2) throw ConfigError("scene needs at least two planes");
    for (std::size_t i = 0; i < planes.size(); ++i)
        if (std::abs(planes[i].normal.norm() - 1.0) > 1e-6)
            throw ConfigError("plane " + std::to_string(i) + ": normal is not unit length");
    if (trajectory.empty()) throw ConfigError("scene trajectory is empty");
    if (depth_noise_sigma < 0.0) throw ConfigError("depth_noise_sigma must be >= 0");
    intrinsics.validate();
}

namespace {

constexpr double kMinHitDistance = 1e-4;

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// Standard-normal draw fully determined by (seed, pose, pixel); no stream
// state, so pixels can be rendered in any order.
double gaussian_at(std::uint64_t seed, std::uint64_t pose, std::uint64_t pixel) {
    const std::uint64_t key = splitmix64(splitmix64(splitmix64(seed) ^ pose) ^ pixel);
    const std::uint64_t h1 = splitmix64(key);
    const std::uint64_t h2 = splitmix64(key ^ 0xA5A5A5A5A5A5A5A5ULL);
    const double u1 = ((h1 >> 11) + 1) * 0x1.0p-53;  // (0, 1]
    const double u2 = (h2 >> 11) * 0x1.0p-53;        // [0, 1)
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

// In-plane orthonormal basis, picked deterministically from the normal.
void plane_basis(const Eigen::Vector3d& n, Eigen::Vector3d& e1, Eigen::Vector3d& e2) {
    int smallest = 0;
    for (int i = 1; i < 3; ++i)
        if (std::abs(n[i]) < std::abs(n[smallest])) smallest = i;
    Eigen::Vector3d axis = Eigen::Vector3d::Zero();
    axis[smallest] = 1.0;
    e1 = n.cross(axis).normalized();
    e2 = n.cross(e1);
}

double texture_value(const TextureSpec& tex, double s1, double s2) {
    switch (tex.kind) {
        case TextureSpec::Kind::kConstant:
            return tex.base;
        case TextureSpec::Kind::kCheckerboard: {
            const long long a = static_cast<long long>(std::floor(s1 / tex.scale));
            const long long b = static_cast<long long>(std::floor(s2 / tex.scale));
            return tex.base + (((a + b) & 1) == 0 ? 0.5 : -0.5) * tex.contrast;
        }
        case TextureSpec::Kind::kSineMix: {
            // Two rotated plane waves with incommensurate frequencies: no
            // translation of the plane maps the pattern (near) onto itself,
            // so correlation against a shifted copy has a single honest peak.
            const double w1 = 2.0 * M_PI / tex.scale;
            const double w2 = 2.0 * M_PI / (tex.scale * 1.618);
            const double a = 0.96 * s1 + 0.28 * s2;   // waves at ~16 and ~121
            const double b = -0.52 * s1 + 0.854 * s2; // degrees to the axes
            return tex.base +
                   0.25 * tex.contrast * (std::sin(w1 * a) + std::sin(w2 * b + 0.7));
        }
    }
    return tex.base;
}

struct PlaneFrames {
    std::vector<Eigen::Vector3d> e1, e2;
};

PlaneFrames make_plane_frames(const SyntheticSceneSpec& spec) {
    PlaneFrames f;
    f.e1.resize(spec.planes.size());
    f.e2.resize(spec.planes.size());
    for (std::size_t i = 0; i < spec.planes.size(); ++i)
        plane_basis(spec.planes[i].normal, f.e1[i], f.e2[i]);
    return f;
}

// Nearest plane along the pixel ray; depth is the camera-z distance because
// the ray direction is scaled to unit z. Returns -1 on miss.
int cast_ray(const SyntheticSceneSpec& spec, const Eigen::Vector3d& origin,
             const Eigen::Vector3d& dir_w, double& depth_out) {
    int hit = -1;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < spec.planes.size(); ++i) {
        const PlaneSpec& pl = spec.planes[i];
        const double denom = pl.normal.dot(dir_w);
        if (std::abs(denom) < 1e-12) continue;
        const double s = -(pl.normal.dot(origin) + pl.d) / denom;
        if (s < kMinHitDistance || s >= best) continue;
        best = s;
        hit = static_cast<int>(i);
    }
    depth_out = hit >= 0 ? best : 0.0;
    return hit;
}

void render_pixels(const SyntheticSceneSpec& spec, std::size_t pose_index,
                   Image<double>& depth_out, Image<double>& intensity_out, int row_begin,
                   int row_end) {
    const CameraIntrinsics& K = spec.intrinsics;
    const PoseSE3& pose = spec.trajectory[pose_index].pose;
    const Eigen::Matrix3d R = pose.rotation_matrix();
    const Eigen::Vector3d origin = pose.translation;
    const PlaneFrames frames = make_plane_frames(spec);

    for (int v = row_begin; v < row_end; ++v) {
        for (int u = 0; u < K.width; ++u) {
            const Eigen::Vector3d dir_c((u - K.cx) / K.fx, (v - K.cy) / K.fy, 1.0);
            const Eigen::Vector3d dir_w = R * dir_c;
            double depth;
            const int hit = cast_ray(spec, origin, dir_w, depth);
            if (hit < 0) {
                depth_out.at(u, v) = 0.0;
                intensity_out.at(u, v) = 0.0;
                continue;
            }
            const Eigen::Vector3d p = origin + depth * dir_w;
            const double s1 = frames.e1[hit].dot(p);
            const double s2 = frames.e2[hit].dot(p);
            double value = texture_value(spec.planes[hit].texture, s1, s2);
            intensity_out.at(u, v) = std::clamp(value, 0.0, 1.0);

            if (spec.depth_noise_sigma > 0.0) {
                const std::uint64_t pixel = static_cast<std::uint64_t>(v) * K.width + u;
                depth += spec.depth_noise_sigma * gaussian_at(spec.seed, pose_index, pixel);
            }
            depth_out.at(u, v) = depth > 0.0 ? depth : 0.0;
        }
    }
}

void check_pose_index(const SyntheticSceneSpec& spec, std::size_t pose_index) {
    spec.validate();
    if (pose_index >= spec.trajectory.size())
        throw ConfigError("pose index out of range: " + std::to_string(pose_index));
}

}  // namespace

void render_raw(const SyntheticSceneSpec& spec, std::size_t pose_index, Image<double>& depth_out,
                Image<double>& intensity_out) {
    check_pose_index(spec, pose_index);
    const int w = spec.intrinsics.width, h = spec.intrinsics.height;
    depth_out = Image<double>(w, h, 0.0);
    intensity_out = Image<double>(w, h, 0.0);

#pragma omp parallel for schedule(static)
    for (int v = 0; v < h; ++v) render_pixels(spec, pose_index, depth_out, intensity_out, v, v + 1);
}

namespace reference {

void render_raw(const SyntheticSceneSpec& spec, std::size_t pose_index, Image<double>& depth_out,
                Image<double>& intensity_out) {
    check_pose_index(spec, pose_index);
    const int w = spec.intrinsics.width, h = spec.intrinsics.height;
    depth_out = Image<double>(w, h, 0.0);
    intensity_out = Image<double>(w, h, 0.0);
    render_pixels(spec, pose_index, depth_out, intensity_out, 0, h);
}

}  // namespace reference

namespace {

struct QuantizedFrame {
    Image<std::uint16_t> depth_raw;
    Image<std::uint8_t> gray;
};

// The storage round-trip both render_frame and write_sequence go through.
QuantizedFrame render_quantized(const SyntheticSceneSpec& spec, std::size_t pose_index) {
    Image<double> depth_m, intensity;
    render_raw(spec, pose_index, depth_m, intensity);

    QuantizedFrame q;
    q.depth_raw = Image<std::uint16_t>(depth_m.width(), depth_m.height(), 0);
    q.gray = Image<std::uint8_t>(depth_m.width(), depth_m.height(), 0);
    for (std::size_t i = 0; i < depth_m.size(); ++i) {
        const long raw = std::lround(depth_m[i] * spec.intrinsics.depth_scale);
        q.depth_raw[i] = static_cast<std::uint16_t>(std::clamp(raw, 0L, 65535L));
        q.gray[i] = static_cast<std::uint8_t>(std::lround(intensity[i] * 255.0));
    }
    return q;
}

}  // namespace

Frame render_frame(const SyntheticSceneSpec& spec, std::size_t pose_index, double max_range) {
    const QuantizedFrame q = render_quantized(spec, pose_index);
    const int w = q.depth_raw.width(), h = q.depth_raw.height();

    Frame frame;
    frame.id = static_cast<std::int64_t>(pose_index);
    frame.timestamp = spec.trajectory[pose_index].timestamp;
    frame.intrinsics = spec.intrinsics;
    frame.intensity = Image<double>(w, h);
    frame.depth.meters = Image<double>(w, h, 0.0);
    frame.depth.valid = Mask(w, h, 0);
    for (std::size_t i = 0; i < q.gray.size(); ++i) {
        const std::uint8_t g = q.gray[i];
        frame.intensity[i] = luma01(Rgb8{g, g, g});
        if (q.depth_raw[i] == 0) continue;
        const double z = q.depth_raw[i] / spec.intrinsics.depth_scale;
        if (z > max_range) continue;
        frame.depth.meters[i] = z;
        frame.depth.valid[i] = 1;
    }
    return frame;
}

void validate_visibility(const SyntheticSceneSpec& spec) {
    spec.validate();
    const CameraIntrinsics& K = spec.intrinsics;
    for (std::size_t pi = 0; pi < spec.trajectory.size(); ++pi) {
        const PoseSE3& pose = spec.trajectory[pi].pose;
        const Eigen::Matrix3d R = pose.rotation_matrix();
        std::vector<long long> hits(spec.planes.size(), 0);

#pragma omp parallel for schedule(static)
        for (int v = 0; v < K.height; ++v) {
            std::vector<long long> row_hits(spec.planes.size(), 0);
            for (int u = 0; u < K.width; ++u) {
                const Eigen::Vector3d dir_w = R * Eigen::Vector3d((u - K.cx) / K.fx, (v - K.cy) / K.fy, 1.0);
                double depth;
                const int hit = cast_ray(spec, pose.translation, dir_w, depth);
                if (hit >= 0) ++row_hits[hit];
            }
#pragma omp critical
            for (std::size_t i = 0; i < hits.size(); ++i) hits[i] += row_hits[i];
        }

        bool ok = false;
        for (std::size_t a = 0; a < spec.planes.size() && !ok; ++a) {
            if (hits[a] == 0) continue;
            for (std::size_t b = a + 1; b < spec.planes.size() && !ok; ++b) {
                if (hits[b] == 0) continue;
                if (std::abs(spec.planes[a].normal.dot(spec.planes[b].normal)) < 0.9999) ok = true;
            }
        }
        if (!ok)
            throw DataError("pose " + std::to_string(pi) +
                            " sees fewer than two non-parallel planes");
    }
}

void write_sequence(const SyntheticSceneSpec& spec, const std::string& out_dir) {
    validate_visibility(spec);

    fs::create_directories(fs::path(out_dir) / "rgb");
    fs::create_directories(fs::path(out_dir) / "depth");

    std::ofstream assoc((fs::path(out_dir) / "associations.txt").string());
    if (!assoc) throw LoadError(out_dir + ": cannot create associations.txt");
    assoc << "# timestamp color depth\n";

    char name[64];
    for (std::size_t i = 0; i < spec.trajectory.size(); ++i) {
        const QuantizedFrame q = render_quantized(spec, i);

        Image<Rgb8> rgb(q.gray.width(), q.gray.height());
        for (std::size_t j = 0; j < q.gray.size(); ++j) rgb[j] = Rgb8{q.gray[j], q.gray[j], q.gray[j]};

        std::snprintf(name, sizeof(name), "%06zu.png", i);
        write_png_rgb8((fs::path(out_dir) / "rgb" / name).string(), rgb);
        write_png16((fs::path(out_dir) / "depth" / name).string(), q.depth_raw);

        char ts[32];
        std::snprintf(ts, sizeof(ts), "%.6f", spec.trajectory[i].timestamp);
        assoc << ts << " rgb/" << name << " depth/" << name << "\n";
    }
    assoc.close();

    write_trajectory(spec.trajectory, (fs::path(out_dir) / "groundtruth.txt").string());

    std::ofstream manifest((fs::path(out_dir) / "manifest.txt").string());
    if (!manifest) throw LoadError(out_dir + ": cannot create manifest.txt");
    manifest << "# corvo sequence manifest\n";
    char buf[512];
    std::snprintf(buf, sizeof(buf),
                  "fx=%.9g\nfy=%.9g\ncx=%.9g\ncy=%.9g\nwidth=%d\nheight=%d\ndepth_scale=%.9g\n",
                  spec.intrinsics.fx, spec.intrinsics.fy, spec.intrinsics.cx, spec.intrinsics.cy,
                  spec.intrinsics.width, spec.intrinsics.height, spec.intrinsics.depth_scale);
    manifest << buf;
    manifest << "associations=associations.txt\n";
    manifest << "groundtruth=groundtruth.txt\n";
}

SyntheticSceneSpec load_scene_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw LoadError(path + ": cannot open scene spec");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw LoadError(path + ": " + e.what());
    }

    SyntheticSceneSpec spec;
    try {
        for (const auto& jp : j.at("planes")) {
            PlaneSpec plane;
            const auto& n = jp.at("normal");
            plane.normal = Eigen::Vector3d(n.at(0), n.at(1), n.at(2)).normalized();
            plane.d = jp.at("d");
            if (jp.contains("texture")) {
                const auto& jt = jp["texture"];
                const std::string kind = jt.value("kind", "checkerboard");
                if (kind == "constant") plane.texture.kind = TextureSpec::Kind::kConstant;
                else if (kind == "checkerboard") plane.texture.kind = TextureSpec::Kind::kCheckerboard;
                else if (kind == "sine") plane.texture.kind = TextureSpec::Kind::kSineMix;
                else throw LoadError(path + ": unknown texture kind '" + kind + "'");
                plane.texture.scale = jt.value("scale", plane.texture.scale);
                plane.texture.base = jt.value("base", plane.texture.base);
                plane.texture.contrast = jt.value("contrast", plane.texture.contrast);
            }
            spec.planes.push_back(plane);
        }
        if (j.contains("intrinsics")) {
            const auto& ji = j["intrinsics"];
            spec.intrinsics.fx = ji.value("fx", spec.intrinsics.fx);
            spec.intrinsics.fy = ji.value("fy", spec.intrinsics.fy);
            spec.intrinsics.cx = ji.value("cx", spec.intrinsics.cx);
            spec.intrinsics.cy = ji.value("cy", spec.intrinsics.cy);
            spec.intrinsics.width = ji.value("width", spec.intrinsics.width);
            spec.intrinsics.height = ji.value("height", spec.intrinsics.height);
            spec.intrinsics.depth_scale = ji.value("depth_scale", spec.intrinsics.depth_scale);
        }
        spec.depth_noise_sigma = j.value("depth_noise_sigma", 0.0);
        spec.seed = j.value("seed", std::uint64_t{0});
        for (const auto& jt : j.at("trajectory")) {
            TrajectoryEntry e;
            e.timestamp = jt.at("timestamp");
            const auto& p = jt.at("position");
            e.pose.translation = Eigen::Vector3d(p.at(0), p.at(1), p.at(2));
            const auto& q = jt.at("quaternion");  // qx qy qz qw
            e.pose.rotation = Eigen::Quaterniond(q.at(3), q.at(0), q.at(1), q.at(2)).normalized();
            spec.trajectory.push_back(e);
        }
    } catch (const LoadError&) {
        throw;
    } catch (const std::exception& e) {
        throw LoadError(path + ": " + e.what());
    }
    spec.validate();
    return spec;
}

}  // namespace corvo
