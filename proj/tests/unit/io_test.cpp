#include <unistd.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>

#include <Eigen/Geometry>
#include <gtest/gtest.h>

#include "corvo/core/errors.hpp"
#include "corvo/core/geometry.hpp"
#include "corvo/io/dataset.hpp"
#include "corvo/io/png_io.hpp"
#include "corvo/io/synthetic.hpp"
#include "corvo/io/trajectory.hpp"

namespace corvo {
namespace {

namespace fs = std::filesystem;

// Fresh directory under the system temp root, removed on destruction.
struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& tag) {
        path = fs::temp_directory_path() / ("corvo_test_" + tag + "_" +
                                            std::to_string(::getpid()));
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    ASSERT_TRUE(out.good()) << path;
    out << text;
}

// ---- PNG round-trips ----

TEST(PngIo, SixteenBitRoundTrip) {
    TempDir dir("png16");
    Image<std::uint16_t> img(37, 21, 0);
    std::mt19937 rng(71);
    std::uniform_int_distribution<int> u(0, 65535);
    for (size_t i = 0; i < img.size(); ++i) img[i] = static_cast<std::uint16_t>(u(rng));
    img.at(0, 0) = 0;
    img.at(1, 0) = 65535;

    const std::string path = dir.file("depth.png");
    write_png16(path, img);
    const Image<std::uint16_t> back = read_png16(path);
    EXPECT_EQ(back, img);
}

TEST(PngIo, Rgb8RoundTrip) {
    TempDir dir("png8");
    Image<Rgb8> img(19, 33);
    std::mt19937 rng(73);
    std::uniform_int_distribution<int> u(0, 255);
    for (size_t i = 0; i < img.size(); ++i)
        img[i] = Rgb8{static_cast<std::uint8_t>(u(rng)), static_cast<std::uint8_t>(u(rng)),
                      static_cast<std::uint8_t>(u(rng))};

    const std::string path = dir.file("color.png");
    write_png_rgb8(path, img);
    EXPECT_EQ(read_png_rgb8(path), img);
}

TEST(PngIo, ReadFailuresThrow) {
    TempDir dir("pngbad");
    EXPECT_THROW(read_png16(dir.file("missing.png")), LoadError);
    write_text(dir.file("not_a.png"), "this is not a png");
    EXPECT_THROW(read_png16(dir.file("not_a.png")), LoadError);
    EXPECT_THROW(read_png_rgb8(dir.file("not_a.png")), LoadError);
}

TEST(PngIo, IntensityMatchesLumaFormula) {
    Image<Rgb8> img(2, 1);
    img.at(0, 0) = Rgb8{255, 0, 0};
    img.at(1, 0) = Rgb8{10, 200, 77};
    const Image<double> gray = intensity_from_rgb(img);
    EXPECT_NEAR(gray.at(0, 0), 0.299, 1e-15);
    EXPECT_NEAR(gray.at(1, 0), (0.299 * 10 + 0.587 * 200 + 0.114 * 77) / 255.0, 1e-15);
    EXPECT_EQ(gray.at(1, 0), luma01(img.at(1, 0)));
}

// ---- trajectory files ----

Trajectory random_trajectory(int n, unsigned seed) {
    std::mt19937 rng(seed);
    std::normal_distribution<double> g(0.0, 1.0);
    Trajectory traj;
    for (int i = 0; i < n; ++i) {
        TrajectoryEntry e;
        e.timestamp = i / 30.0;
        e.pose.translation = Eigen::Vector3d(g(rng), g(rng), g(rng));
        Eigen::Quaterniond q(g(rng), g(rng), g(rng), g(rng));
        e.pose.rotation = q.normalized();
        traj.push_back(e);
    }
    return traj;
}

TEST(TrajectoryIo, RoundTripPreservesPoses) {
    TempDir dir("traj");
    const Trajectory traj = random_trajectory(25, 79);
    const std::string path = dir.file("est.txt");
    write_trajectory(traj, path);
    const Trajectory back = read_trajectory(path);

    ASSERT_EQ(back.size(), traj.size());
    for (size_t i = 0; i < traj.size(); ++i) {
        EXPECT_NEAR(back[i].timestamp, traj[i].timestamp, 1e-6);
        EXPECT_NEAR((back[i].pose.translation - traj[i].pose.translation).norm(), 0.0, 1e-9);
        // %.9g quaternions round-trip to ~1e-9, but the geodesic metric itself
        // bottoms out near 2e-8 (acos slope at 1), so allow 1e-7.
        EXPECT_NEAR(geodesic_angle(back[i].pose.rotation, traj[i].pose.rotation), 0.0, 1e-7);
    }
}

TEST(TrajectoryIo, SkipsCommentsAndBlankLines) {
    TempDir dir("trajc");
    const std::string path = dir.file("t.txt");
    write_text(path,
               "# header\n\n1.0 0 0 0 0 0 0 1\n   # indented comment\n2.0 1 2 3 0 0 0 1\n");
    const Trajectory traj = read_trajectory(path);
    ASSERT_EQ(traj.size(), 2u);
    EXPECT_EQ(traj[1].pose.translation.x(), 1.0);
}

TEST(TrajectoryIo, MalformedLinesThrow) {
    TempDir dir("trajbad");
    const std::string path = dir.file("t.txt");
    write_text(path, "1.0 0 0 0 0 0 1\n");  // seven fields
    EXPECT_THROW(read_trajectory(path), LoadError);
    write_text(path, "1.0 0 0 0 zero 0 0 1\n");
    EXPECT_THROW(read_trajectory(path), LoadError);
    write_text(path, "1.0 0 0 0 0.5 0 0 1\n");  // quaternion norm > 1
    EXPECT_THROW(read_trajectory(path), LoadError);
    EXPECT_THROW(read_trajectory(dir.file("nope.txt")), LoadError);
}

// ---- manifests and frame loading ----

TEST(Manifest, ParsesKeysAndTumAssociations) {
    TempDir dir("manifest");
    write_text(dir.file("manifest.txt"),
               "# comment\n"
               "fx=100\nfy = 110\ncx=31.5\ncy=23.5\nwidth=64\nheight=48\n"
               "depth_scale=5000\nassociations=assoc.txt\n");
    // TUM associate-tool output: timestamp color timestamp depth.
    write_text(dir.file("assoc.txt"),
               "# ts color ts depth\n"
               "1.00 rgb/a.png 1.01 depth/a.png\n"
               "2.00 rgb/b.png 2.01 depth/b.png\n");
    fs::create_directories(dir.path / "rgb");
    fs::create_directories(dir.path / "depth");
    for (const char* name : {"a", "b"}) {
        Image<Rgb8> c(64, 48);
        write_png_rgb8(dir.file("rgb/" + std::string(name) + ".png"), c);
        Image<std::uint16_t> d(64, 48, 5000);
        write_png16(dir.file("depth/" + std::string(name) + ".png"), d);
    }

    const SequenceManifest m = load_manifest(dir.file("manifest.txt"));
    EXPECT_EQ(m.intrinsics.fx, 100.0);
    EXPECT_EQ(m.intrinsics.fy, 110.0);
    EXPECT_EQ(m.intrinsics.width, 64);
    ASSERT_EQ(m.entries.size(), 2u);
    EXPECT_EQ(m.entries[0].timestamp, 1.0);
    EXPECT_EQ(m.entries[0].color_path, "rgb/a.png");
    EXPECT_EQ(m.entries[0].depth_path, "depth/a.png");
    EXPECT_TRUE(m.groundtruth_path.empty());
}

TEST(Manifest, ErrorsNameTheLine) {
    TempDir dir("manifesterr");
    write_text(dir.file("m1.txt"), "fx=100\nbogus_key=3\n");
    try {
        load_manifest(dir.file("m1.txt"));
        FAIL() << "expected LoadError";
    } catch (const LoadError& e) {
        EXPECT_NE(std::string(e.what()).find(":2: unknown key 'bogus_key'"), std::string::npos)
            << e.what();
    }

    write_text(dir.file("m2.txt"), "fx 100\n");
    try {
        load_manifest(dir.file("m2.txt"));
        FAIL() << "expected LoadError";
    } catch (const LoadError& e) {
        EXPECT_NE(std::string(e.what()).find(":1: expected key=value"), std::string::npos);
    }

    write_text(dir.file("m3.txt"), "fx=fast\n");
    try {
        load_manifest(dir.file("m3.txt"));
        FAIL() << "expected LoadError";
    } catch (const LoadError& e) {
        EXPECT_NE(std::string(e.what()).find("bad value for 'fx'"), std::string::npos);
    }
    EXPECT_THROW(load_manifest(dir.file("missing.txt")), LoadError);
}

TEST(Manifest, AssociationErrors) {
    TempDir dir("assocerr");
    write_text(dir.file("manifest.txt"), "associations=a.txt\n");
    write_text(dir.file("a.txt"), "1.0 rgb/x.png\n");  // two tokens
    EXPECT_THROW(load_manifest(dir.file("manifest.txt")), LoadError);

    write_text(dir.file("a.txt"), "2.0 c.png d.png\n1.0 c.png d.png\n");  // decreasing
    try {
        load_manifest(dir.file("manifest.txt"));
        FAIL() << "expected LoadError";
    } catch (const LoadError& e) {
        EXPECT_NE(std::string(e.what()).find("timestamps must not decrease"), std::string::npos);
    }

    write_text(dir.file("a.txt"), "1.0 c.png d.png\n");  // referenced files absent
    EXPECT_THROW(load_manifest(dir.file("manifest.txt")), LoadError);
}

TEST(LoadFrame, ScalesDepthAndMasksInvalid) {
    TempDir dir("loadframe");
    write_text(dir.file("manifest.txt"),
               "fx=100\nfy=100\ncx=3.5\ncy=2.5\nwidth=8\nheight=6\ndepth_scale=5000\n"
               "associations=a.txt\n");
    write_text(dir.file("a.txt"), "0.5 c.png d.png\n");
    Image<Rgb8> color(8, 6, Rgb8{128, 128, 128});
    write_png_rgb8(dir.file("c.png"), color);
    Image<std::uint16_t> depth(8, 6, 10000);  // 2 m
    depth.at(0, 0) = 0;                        // no reading
    depth.at(1, 0) = 50005;                    // 10.001 m, past max_range
    depth.at(2, 0) = 50000;                    // exactly 10 m, still in range
    write_png16(dir.file("d.png"), depth);

    const SequenceManifest m = load_manifest(dir.file("manifest.txt"));
    const Frame f = load_frame(m, 0);
    EXPECT_EQ(f.timestamp, 0.5);
    EXPECT_FALSE(f.depth.valid.at(0, 0));
    EXPECT_FALSE(f.depth.valid.at(1, 0));
    EXPECT_TRUE(f.depth.valid.at(2, 0));
    EXPECT_NEAR(f.depth.meters.at(2, 0), 10.0, 1e-12);
    EXPECT_NEAR(f.depth.meters.at(4, 4), 2.0, 1e-12);
    EXPECT_NEAR(f.intensity.at(3, 3), 128.0 / 255.0, 1e-12);

    EXPECT_THROW(load_frame(m, 1), LoadError);  // index out of range
}

TEST(LoadFrame, RejectsSizeMismatch) {
    TempDir dir("sizemismatch");
    write_text(dir.file("manifest.txt"),
               "fx=100\nfy=100\ncx=15.5\ncy=11.5\nwidth=32\nheight=24\nassociations=a.txt\n");
    write_text(dir.file("a.txt"), "0.0 c.png d.png\n");
    write_png_rgb8(dir.file("c.png"), Image<Rgb8>(32, 24));
    write_png16(dir.file("d.png"), Image<std::uint16_t>(16, 12, 1000));
    const SequenceManifest m = load_manifest(dir.file("manifest.txt"));
    EXPECT_THROW(load_frame(m, 0), LoadError);
}

// ---- synthetic scenes ----

SyntheticSceneSpec wall_floor_scene(int w, int h) {
    SyntheticSceneSpec spec;
    spec.intrinsics.fx = spec.intrinsics.fy = 80.0;
    spec.intrinsics.cx = w / 2.0 - 0.5;
    spec.intrinsics.cy = h / 2.0 - 0.5;
    spec.intrinsics.width = w;
    spec.intrinsics.height = h;

    PlaneSpec wall;  // z = 3
    wall.normal = Eigen::Vector3d::UnitZ();
    wall.d = -3.0;
    wall.texture.kind = TextureSpec::Kind::kSineMix;
    wall.texture.scale = 0.4;
    // Close enough below the camera that the lower image rows hit it before
    // the wall.
    PlaneSpec floor;  // y = 0.5
    floor.normal = Eigen::Vector3d::UnitY();
    floor.d = -0.5;
    floor.texture.kind = TextureSpec::Kind::kCheckerboard;
    floor.texture.scale = 0.3;
    spec.planes = {wall, floor};

    for (int k = 0; k < 3; ++k) {
        TrajectoryEntry e;
        e.timestamp = k / 30.0;
        e.pose.translation = Eigen::Vector3d(0.01 * k, 0.0, 0.0);
        spec.trajectory.push_back(e);
    }
    return spec;
}

TEST(Synthetic, RenderHitsPlanesExactly) {
    const SyntheticSceneSpec spec = wall_floor_scene(64, 48);
    Image<double> depth, intensity;
    render_raw(spec, 0, depth, intensity);

    // A frontal wall at z = 3 gives depth exactly 3 for every ray that hits it.
    EXPECT_EQ(depth.at(32, 10), 3.0);
    EXPECT_EQ(depth.at(5, 0), 3.0);

    // Each hit satisfies its plane equation after back-projection.
    const CameraIntrinsics& K = spec.intrinsics;
    int floor_hits = 0;
    for (int v = 0; v < 48; ++v) {
        for (int u = 0; u < 64; ++u) {
            ASSERT_GT(depth.at(u, v), 0.0);
            const Eigen::Vector3d p = K.backproject_pixel(u, v, depth.at(u, v));
            double best = 1e9;
            for (const PlaneSpec& pl : spec.planes)
                best = std::min(best, std::abs(pl.normal.dot(p) + pl.d));
            EXPECT_LT(best, 1e-9) << u << "," << v;
            if (std::abs(p.y() - 0.5) < 1e-9) ++floor_hits;
            ASSERT_GE(intensity.at(u, v), 0.0);
            ASSERT_LE(intensity.at(u, v), 1.0);
        }
    }
    EXPECT_GT(floor_hits, 100);  // the lower rows see the floor
}

TEST(Synthetic, RenderMatchesReference) {
    SyntheticSceneSpec spec = wall_floor_scene(48, 36);
    spec.depth_noise_sigma = 0.004;
    spec.seed = 12345;
    Image<double> d1, i1, d2, i2;
    render_raw(spec, 1, d1, i1);
    reference::render_raw(spec, 1, d2, i2);
    EXPECT_EQ(d1, d2);
    EXPECT_EQ(i1, i2);
}

TEST(Synthetic, NoiseIsSeedAndFrameKeyed) {
    SyntheticSceneSpec spec = wall_floor_scene(32, 24);
    spec.depth_noise_sigma = 0.01;
    spec.seed = 7;
    Image<double> a, b, c, ai, bi, ci;
    render_raw(spec, 0, a, ai);
    render_raw(spec, 0, b, bi);
    EXPECT_EQ(a, b);  // same seed, same frame: bit-identical
    render_raw(spec, 1, c, ci);
    EXPECT_NE(a, c);  // different frame index draws different noise
    SyntheticSceneSpec other = spec;
    other.seed = 8;
    render_raw(other, 0, c, ci);
    EXPECT_NE(a, c);  // different seed too
}

TEST(Synthetic, RenderFrameQuantizesToStorageUnits) {
    SyntheticSceneSpec spec = wall_floor_scene(32, 24);
    spec.depth_noise_sigma = 0.003;
    spec.seed = 21;
    const Frame f = render_frame(spec, 2);
    EXPECT_EQ(f.id, 2);
    EXPECT_NEAR(f.timestamp, 2 / 30.0, 1e-12);
    for (int v = 0; v < 24; ++v) {
        for (int u = 0; u < 32; ++u) {
            if (!f.depth.valid.at(u, v)) continue;
            const double units = f.depth.meters.at(u, v) * spec.intrinsics.depth_scale;
            EXPECT_NEAR(units, std::round(units), 1e-6) << u << "," << v;
            const double gray = f.intensity.at(u, v) * 255.0;
            EXPECT_NEAR(gray, std::round(gray), 1e-6);
        }
    }
}

TEST(Synthetic, WriteSequenceLoadsBackBitIdentical) {
    TempDir dir("seq");
    SyntheticSceneSpec spec = wall_floor_scene(48, 36);
    spec.depth_noise_sigma = 0.002;
    spec.seed = 99;
    write_sequence(spec, dir.path.string());

    const SequenceManifest m = load_manifest(dir.file("manifest.txt"));
    ASSERT_EQ(m.entries.size(), spec.trajectory.size());
    EXPECT_EQ(m.intrinsics.width, 48);
    ASSERT_FALSE(m.groundtruth_path.empty());

    for (std::size_t i = 0; i < m.entries.size(); ++i) {
        const Frame loaded = load_frame(m, i);
        const Frame rendered = render_frame(spec, i);
        EXPECT_EQ(loaded.intensity, rendered.intensity) << "frame " << i;
        EXPECT_EQ(loaded.depth.meters, rendered.depth.meters) << "frame " << i;
        EXPECT_EQ(loaded.depth.valid, rendered.depth.valid) << "frame " << i;
        EXPECT_NEAR(loaded.timestamp, spec.trajectory[i].timestamp, 1e-6);
    }

    const Trajectory gt = read_trajectory(dir.file(m.groundtruth_path));
    ASSERT_EQ(gt.size(), spec.trajectory.size());
    for (std::size_t i = 0; i < gt.size(); ++i)
        EXPECT_NEAR((gt[i].pose.translation - spec.trajectory[i].pose.translation).norm(), 0.0,
                    1e-9);
}

TEST(Synthetic, VisibilityValidation) {
    SyntheticSceneSpec spec = wall_floor_scene(32, 24);
    spec.planes[1] = spec.planes[0];  // two parallel walls
    spec.planes[1].d = -5.0;
    try {
        validate_visibility(spec);
        FAIL() << "expected DataError";
    } catch (const DataError& e) {
        EXPECT_NE(std::string(e.what()).find("pose 0"), std::string::npos) << e.what();
    }
}

TEST(Synthetic, SpecValidation) {
    SyntheticSceneSpec spec = wall_floor_scene(32, 24);
    spec.planes.resize(1);
    EXPECT_THROW(spec.validate(), ConfigError);

    spec = wall_floor_scene(32, 24);
    spec.planes[0].normal = Eigen::Vector3d(0, 0, 2);
    EXPECT_THROW(spec.validate(), ConfigError);

    spec = wall_floor_scene(32, 24);
    spec.trajectory.clear();
    EXPECT_THROW(spec.validate(), ConfigError);

    spec = wall_floor_scene(32, 24);
    spec.depth_noise_sigma = -0.1;
    EXPECT_THROW(spec.validate(), ConfigError);
}

TEST(Synthetic, SceneSpecJsonRoundTrip) {
    TempDir dir("scenespec");
    write_text(dir.file("scene.json"), R"({
      "planes": [
        {"normal": [0, 0, 1], "d": -3.0,
         "texture": {"kind": "sine", "scale": 0.4, "base": 0.5, "contrast": 0.6}},
        {"normal": [0, 1, 0], "d": -1.0, "texture": {"kind": "checkerboard"}}
      ],
      "intrinsics": {"fx": 80, "fy": 80, "cx": 31.5, "cy": 23.5,
                     "width": 64, "height": 48, "depth_scale": 5000},
      "depth_noise_sigma": 0.005,
      "seed": 42,
      "trajectory": [
        {"timestamp": 0.0, "position": [0, 0, 0], "quaternion": [0, 0, 0, 1]},
        {"timestamp": 0.033, "position": [0.01, 0, 0], "quaternion": [0, 0, 0, 1]}
      ]
    })");

    const SyntheticSceneSpec spec = load_scene_spec(dir.file("scene.json"));
    ASSERT_EQ(spec.planes.size(), 2u);
    EXPECT_EQ(spec.planes[0].texture.kind, TextureSpec::Kind::kSineMix);
    EXPECT_EQ(spec.planes[0].texture.contrast, 0.6);
    EXPECT_EQ(spec.planes[1].texture.kind, TextureSpec::Kind::kCheckerboard);
    EXPECT_EQ(spec.seed, 42u);
    EXPECT_EQ(spec.depth_noise_sigma, 0.005);
    ASSERT_EQ(spec.trajectory.size(), 2u);
    EXPECT_EQ(spec.trajectory[1].pose.translation.x(), 0.01);

    write_text(dir.file("bad.json"), "{ not json");
    EXPECT_THROW(load_scene_spec(dir.file("bad.json")), LoadError);
    write_text(dir.file("badkind.json"),
               R"({"planes": [{"normal": [0,0,1], "d": -3, "texture": {"kind": "plaid"}},
                              {"normal": [0,1,0], "d": -1}],
                   "intrinsics": {"fx": 80, "fy": 80, "cx": 15.5, "cy": 11.5,
                                  "width": 32, "height": 24},
                   "trajectory": [{"timestamp": 0, "position": [0,0,0],
                                   "quaternion": [0,0,0,1]}]})");
    EXPECT_THROW(load_scene_spec(dir.file("badkind.json")), LoadError);
    EXPECT_THROW(load_scene_spec(dir.file("absent.json")), LoadError);
}

}  // namespace
}  // namespace corvo
