#include "corvo/core/config.hpp"

#include <fstream>
#include <set>

#include <json.hpp>

#include "corvo/core/errors.hpp"
#include "corvo/core/pose.hpp"

namespace corvo {

void RunConfig::validate() const {
    if (!(max_depth_range > 0.0)) throw ConfigError("max_depth_range must be positive");
    if (normal.cell_size < 1) throw ConfigError("cell_size must be >= 1");
    tracker.validate();
    rotation.validate();
    if (kcc.lambda < 0.0) throw ConfigError("lambda must be >= 0");
    if (!(kcc.sigma > 0.0)) throw ConfigError("sigma must be positive");
    if (kcc.psr_exclusion_radius < 0) throw ConfigError("psr_exclusion_radius must be >= 0");
    if (!(kcc_target_std > 0.0)) throw ConfigError("kcc_target_std must be positive");
    projection.validate();
    translation.validate();
    if (buffer_depth < 1) throw ConfigError("buffer_depth must be >= 1");
    if (!(rotation_coverage_fraction > 0.0 && rotation_coverage_fraction <= 1.0))
        throw ConfigError("rotation_coverage_fraction must be in (0, 1]");
}

namespace {

using nlohmann::json;

void reject_unknown(const json& j, const std::set<std::string>& known, const std::string& where) {
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!known.count(it.key()))
            throw ConfigError("config: unknown key '" + where + it.key() + "'");
}

}  // namespace

RunConfig config_from_json(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }

    RunConfig c;
    try {
        reject_unknown(j, {"max_depth_range", "normal", "tracker", "rotation", "kcc", "projection",
                           "translation", "pipeline"},
                       "");
        c.max_depth_range = j.value("max_depth_range", c.max_depth_range);
        if (j.contains("normal")) {
            const json& n = j["normal"];
            reject_unknown(n, {"cell_size"}, "normal.");
            c.normal.cell_size = n.value("cell_size", c.normal.cell_size);
        }
        if (j.contains("tracker")) {
            const json& t = j["tracker"];
            reject_unknown(t, {"threshold_overlap", "threshold_mode", "min_mode_pixels", "max_modes"},
                           "tracker.");
            c.tracker.threshold_overlap = t.value("threshold_overlap", c.tracker.threshold_overlap);
            c.tracker.threshold_mode = t.value("threshold_mode", c.tracker.threshold_mode);
            c.tracker.min_mode_pixels = t.value("min_mode_pixels", c.tracker.min_mode_pixels);
            c.tracker.max_modes = t.value("max_modes", c.tracker.max_modes);
        }
        if (j.contains("rotation")) {
            const json& r = j["rotation"];
            reject_unknown(r, {"parallel_tol", "nonparallel_min_angle_deg", "max_residual_deg"},
                           "rotation.");
            c.rotation.parallel_tol = r.value("parallel_tol", c.rotation.parallel_tol);
            if (r.contains("nonparallel_min_angle_deg"))
                c.rotation.nonparallel_min_angle = deg_to_rad(r["nonparallel_min_angle_deg"]);
            if (r.contains("max_residual_deg"))
                c.rotation.max_residual = deg_to_rad(r["max_residual_deg"]);
        }
        if (j.contains("kcc")) {
            const json& k = j["kcc"];
            reject_unknown(k, {"lambda", "sigma", "target_std", "one_hot", "psr_exclusion_radius"},
                           "kcc.");
            c.kcc.lambda = k.value("lambda", c.kcc.lambda);
            c.kcc.sigma = k.value("sigma", c.kcc.sigma);
            c.kcc_target_std = k.value("target_std", c.kcc_target_std);
            c.kcc_one_hot = k.value("one_hot", c.kcc_one_hot);
            c.kcc.psr_exclusion_radius = k.value("psr_exclusion_radius", c.kcc.psr_exclusion_radius);
        }
        if (j.contains("projection")) {
            const json& p = j["projection"];
            reject_unknown(p, {"r_x", "r_y", "grid_size"}, "projection.");
            c.projection.r_x = p.value("r_x", c.projection.r_x);
            c.projection.r_y = p.value("r_y", c.projection.r_y);
            c.projection.grid_size = p.value("grid_size", c.projection.grid_size);
        }
        if (j.contains("translation")) {
            const json& t = j["translation"];
            reject_unknown(t, {"color_match_threshold", "psr_keyframe_threshold", "min_matched_pixels"},
                           "translation.");
            c.translation.color_match_threshold =
                t.value("color_match_threshold", c.translation.color_match_threshold);
            c.translation.psr_keyframe_threshold =
                t.value("psr_keyframe_threshold", c.translation.psr_keyframe_threshold);
            c.translation.min_matched_pixels =
                t.value("min_matched_pixels", c.translation.min_matched_pixels);
        }
        if (j.contains("pipeline")) {
            const json& p = j["pipeline"];
            reject_unknown(p,
                           {"buffer_depth", "rotation_coverage_fraction", "single_thread",
                            "live_drop", "seed", "max_frames"},
                           "pipeline.");
            c.buffer_depth = p.value("buffer_depth", c.buffer_depth);
            c.rotation_coverage_fraction =
                p.value("rotation_coverage_fraction", c.rotation_coverage_fraction);
            c.single_thread = p.value("single_thread", c.single_thread);
            c.live_drop = p.value("live_drop", c.live_drop);
            c.seed = p.value("seed", c.seed);
            c.max_frames = p.value("max_frames", c.max_frames);
        }
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    c.validate();
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw LoadError(path + ": cannot open config");
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return config_from_json(text);
}

std::string config_to_json(const RunConfig& c) {
    json j;
    j["max_depth_range"] = c.max_depth_range;
    j["normal"]["cell_size"] = c.normal.cell_size;
    j["tracker"]["threshold_overlap"] = c.tracker.threshold_overlap;
    j["tracker"]["threshold_mode"] = c.tracker.threshold_mode;
    j["tracker"]["min_mode_pixels"] = c.tracker.min_mode_pixels;
    j["tracker"]["max_modes"] = c.tracker.max_modes;
    j["rotation"]["parallel_tol"] = c.rotation.parallel_tol;
    j["rotation"]["nonparallel_min_angle_deg"] = rad_to_deg(c.rotation.nonparallel_min_angle);
    j["rotation"]["max_residual_deg"] = rad_to_deg(c.rotation.max_residual);
    j["kcc"]["lambda"] = c.kcc.lambda;
    j["kcc"]["sigma"] = c.kcc.sigma;
    j["kcc"]["target_std"] = c.kcc_target_std;
    j["kcc"]["one_hot"] = c.kcc_one_hot;
    j["kcc"]["psr_exclusion_radius"] = c.kcc.psr_exclusion_radius;
    j["projection"]["r_x"] = c.projection.r_x;
    j["projection"]["r_y"] = c.projection.r_y;
    j["projection"]["grid_size"] = c.projection.grid_size;
    j["translation"]["color_match_threshold"] = c.translation.color_match_threshold;
    j["translation"]["psr_keyframe_threshold"] = c.translation.psr_keyframe_threshold;
    j["translation"]["min_matched_pixels"] = c.translation.min_matched_pixels;
    j["pipeline"]["buffer_depth"] = c.buffer_depth;
    j["pipeline"]["rotation_coverage_fraction"] = c.rotation_coverage_fraction;
    j["pipeline"]["single_thread"] = c.single_thread;
    j["pipeline"]["live_drop"] = c.live_drop;
    j["pipeline"]["seed"] = c.seed;
    j["pipeline"]["max_frames"] = c.max_frames;
    return j.dump();
}

}  // namespace corvo
