#include "corvo/rotation/plane_tracking.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstring>
#include <vector>

#include "corvo/core/errors.hpp"

namespace corvo {

void PlaneTrackerParams::validate() const {
    if (!(threshold_overlap > 0.0 && threshold_overlap <= 1.0))
        throw ConfigError("threshold_overlap must be in (0, 1]");
    if (!(threshold_mode > 0.0 && threshold_mode <= 1.0))
        throw ConfigError("threshold_mode must be in (0, 1]");
    if (min_mode_pixels < 3) throw ConfigError("min_mode_pixels must be >= 3");
    if (max_modes < 1) throw ConfigError("max_modes must be >= 1");
}

namespace {

// Greedy row-major mode assignment. Writes one mode id per pixel (-1: none)
// instead of growing per-mode member lists; members are gathered afterwards
// in a second pass, so the hot loop does no allocation at all.
struct ScanResult {
    std::vector<Eigen::Vector3d> seeds;  // first member of each mode; join target
    std::vector<int> counts;
    std::vector<int> ids;  // w*h, row-major
};

ScanResult scan(const NormalMap& ref, const NormalMap& cur, const PlaneTrackerParams& params) {
    params.validate();
    if (ref.width() != cur.width() || ref.height() != cur.height())
        throw ConfigError("track_planes: normal map dimensions differ");

    const int w = ref.width(), h = ref.height();
    ScanResult s;
    s.ids.assign(static_cast<std::size_t>(w) * h, -1);
    for (int v = 0; v < h; ++v) {
        const std::size_t row = static_cast<std::size_t>(v) * w;
        for (int u = 0; u < w; ++u) {
            if (!ref.valid.at(u, v) || !cur.valid.at(u, v)) continue;
            const Eigen::Vector3d& nr = ref.normals.at(u, v);
            const Eigen::Vector3d& nc = cur.normals.at(u, v);
            if (nr.dot(nc) < params.threshold_overlap) continue;

            int hit = -1;
            for (std::size_t m = 0; m < s.seeds.size(); ++m) {
                if (nr.dot(s.seeds[m]) >= params.threshold_mode) {
                    hit = static_cast<int>(m);
                    break;
                }
            }
            if (hit < 0) {
                if (static_cast<int>(s.seeds.size()) >= params.max_modes) continue;
                hit = static_cast<int>(s.seeds.size());
                s.seeds.push_back(nr);
                s.counts.push_back(0);
            }
            ++s.counts[hit];
            s.ids[row + u] = hit;
        }
    }
    return s;
}

double component_median(std::vector<double>& scratch) {
    const std::size_t n = scratch.size();
    const std::size_t mid = n / 2;
    std::nth_element(scratch.begin(), scratch.begin() + mid, scratch.end());
    double m = scratch[mid];
    if (n % 2 == 0) {
        // Even count: average with the element just below the midpoint.
        const double lo = *std::max_element(scratch.begin(), scratch.begin() + mid);
        m = 0.5 * (m + lo);
    }
    return m;
}

}  // namespace

std::vector<PlaneMode> track_planes(const NormalMap& ref_normals, const NormalMap& cur_normals,
                                    const PlaneTrackerParams& params) {
    const ScanResult s = scan(ref_normals, cur_normals, params);
    const int w = ref_normals.width(), h = ref_normals.height();

    // Component columns (ref xyz, cur xyz) per surviving mode, exact size.
    struct Gather {
        std::array<std::vector<double>, 6> comp;
        std::vector<std::pair<int, int>> pixels;
    };
    std::vector<int> slot(s.seeds.size(), -1);
    std::vector<Gather> gathered;
    for (std::size_t m = 0; m < s.seeds.size(); ++m) {
        if (s.counts[m] < params.min_mode_pixels) continue;
        slot[m] = static_cast<int>(gathered.size());
        Gather& g = gathered.emplace_back();
        for (auto& c : g.comp) c.reserve(s.counts[m]);
        if (params.keep_members) g.pixels.reserve(s.counts[m]);
    }

    if (!gathered.empty()) {
        for (int v = 0; v < h; ++v) {
            const std::size_t row = static_cast<std::size_t>(v) * w;
            for (int u = 0; u < w; ++u) {
                const int id = s.ids[row + u];
                if (id < 0 || slot[id] < 0) continue;
                Gather& g = gathered[slot[id]];
                const Eigen::Vector3d& nr = ref_normals.normals.at(u, v);
                const Eigen::Vector3d& nc = cur_normals.normals.at(u, v);
                g.comp[0].push_back(nr.x());
                g.comp[1].push_back(nr.y());
                g.comp[2].push_back(nr.z());
                g.comp[3].push_back(nc.x());
                g.comp[4].push_back(nc.y());
                g.comp[5].push_back(nc.z());
                if (params.keep_members) g.pixels.emplace_back(u, v);
            }
        }
    }

    std::vector<PlaneMode> out;
    out.reserve(gathered.size());
    for (Gather& g : gathered) {
        PlaneMode mode;
        Eigen::Vector3d mr(component_median(g.comp[0]), component_median(g.comp[1]),
                           component_median(g.comp[2]));
        Eigen::Vector3d mc(component_median(g.comp[3]), component_median(g.comp[4]),
                           component_median(g.comp[5]));
        mode.normal_ref = mr.normalized();
        mode.normal_cur = mc.normalized();
        mode.pixel_count = static_cast<int>(g.comp[0].size());
        if (params.keep_members) mode.member_pixels = std::move(g.pixels);
        out.push_back(std::move(mode));
    }
    // Largest support first; stable so equal counts keep creation order.
    std::stable_sort(out.begin(), out.end(), [](const PlaneMode& a, const PlaneMode& b) {
        return a.pixel_count > b.pixel_count;
    });
    return out;
}

Image<int> mode_id_image(const NormalMap& ref_normals, const NormalMap& cur_normals,
                         const PlaneTrackerParams& params) {
    const ScanResult s = scan(ref_normals, cur_normals, params);
    Image<int> ids(ref_normals.width(), ref_normals.height(), -1);
    std::memcpy(ids.data(), s.ids.data(), s.ids.size() * sizeof(int));
    return ids;
}

}  // namespace corvo
