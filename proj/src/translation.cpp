#include "corvo/translation/translation.hpp"

#include <cmath>

#include "corvo/core/errors.hpp"

namespace corvo {

void TranslationParams::validate() const {
    if (!(color_match_threshold > 0.0)) throw ConfigError("color_match_threshold must be positive");
    if (min_matched_pixels < 1) throw ConfigError("min_matched_pixels must be >= 1");
}

Image<double> correlation_signal(const Image<double>& color, const Mask& valid) {
    const int w = color.width(), h = color.height();
    double mean = 0.0;
    long long n = 0;
    for (std::size_t i = 0; i < color.size(); ++i) {
        if (!valid[i]) continue;
        mean += color[i];
        ++n;
    }
    Image<double> out(w, h, 0.0);
    if (n == 0) return out;
    mean /= static_cast<double>(n);

    double max_abs = 0.0;
    for (std::size_t i = 0; i < color.size(); ++i) {
        if (!valid[i]) continue;
        out[i] = color[i] - mean;
        max_abs = std::max(max_abs, std::abs(out[i]));
    }
    if (max_abs > 1e-12) {
        const double inv = 1.0 / max_abs;
        for (std::size_t i = 0; i < out.size(); ++i) out[i] *= inv;
    }
    return out;
}

KccModel train_projection_model(const AxonometricFrame& key, const KccParams& base) {
    KccParams params = base;
    params.photometric_normalize = false;  // masked prep below replaces it
    if (params.target.empty())
        params.target = gaussian_target(key.grid_size(), key.grid_size());
    return train(correlation_signal(key.color, key.valid), params);
}

std::optional<PlanarShift> estimate_planar_shift(const AxonometricFrame& key,
                                                 const AxonometricFrame& cur,
                                                 const KccModel& model,
                                                 const ProjectionConfig& cfg) {
    if (key.grid_size() != cur.grid_size())
        throw ConfigError("estimate_planar_shift: frames disagree on grid size");
    if (key.valid_count() == 0 || cur.valid_count() == 0) return std::nullopt;

    const CorrelationResult r = detect(model, correlation_signal(cur.color, cur.valid));
    PlanarShift shift;
    shift.shift_col = r.shift_col;
    shift.shift_row = r.shift_row;
    shift.dx = cfg.r_x * r.shift_col;
    shift.dy = cfg.r_y * r.shift_row;
    shift.psr = r.psr;
    return shift;
}

std::optional<double> estimate_depth_shift(const AxonometricFrame& key,
                                           const AxonometricFrame& cur, int shift_col,
                                           int shift_row, const TranslationParams& params,
                                           int* matched_out) {
    params.validate();
    const int n = key.grid_size();
    double sum = 0.0;
    int matched = 0;
    for (int row = 0; row < n; ++row) {
        const int src_row = row + shift_row;
        if (src_row < 0 || src_row >= n) continue;
        for (int col = 0; col < n; ++col) {
            const int src_col = col + shift_col;
            if (src_col < 0 || src_col >= n) continue;
            if (!key.valid.at(col, row) || !cur.valid.at(src_col, src_row)) continue;
            if (std::abs(cur.color.at(src_col, src_row) - key.color.at(col, row)) >=
                params.color_match_threshold)
                continue;
            sum += cur.depth.at(src_col, src_row) - key.depth.at(col, row);
            ++matched;
        }
    }
    if (matched_out) *matched_out = matched;
    if (matched < params.min_matched_pixels) return std::nullopt;
    return sum / matched;
}

TranslationMeasurement measure_translation(const AxonometricFrame& key,
                                           const AxonometricFrame& cur, const KccModel& model,
                                           const ProjectionConfig& cfg,
                                           const TranslationParams& params) {
    TranslationMeasurement m;
    const std::optional<PlanarShift> planar = estimate_planar_shift(key, cur, model, cfg);
    if (!planar) {
        m.empty_frame = true;
        return m;
    }
    m.psr = planar->psr;
    m.shift_col = planar->shift_col;
    m.shift_row = planar->shift_row;

    const std::optional<double> dz =
        estimate_depth_shift(key, cur, planar->shift_col, planar->shift_row, params,
                             &m.matched_pixels);
    if (!dz) return m;

    m.has_estimate = true;
    m.d = Eigen::Vector3d(planar->dx, planar->dy, *dz);
    return m;
}

}  // namespace corvo
