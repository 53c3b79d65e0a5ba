#pragma once

#include <optional>

#include <Eigen/Core>

#include "corvo/kcc/kcc.hpp"
#include "corvo/translation/axonometric.hpp"

namespace corvo {

struct TranslationParams {
    // Max |intensity difference| for a pixel to count toward the depth shift.
    double color_match_threshold = 0.05;
    // Below this PSR the translation keyframe is replaced.
    double psr_keyframe_threshold = 15.0;
    // Minimum well-matched pixels for a depth-shift estimate.
    int min_matched_pixels = 100;

    void validate() const;
};

// Correlator input for a projection: valid pixels centered on their own mean
// and scaled to unit max-abs; holes stay exactly zero (spectrally neutral).
Image<double> correlation_signal(const Image<double>& color, const Mask& valid);

// Train a correlator on a keyframe projection. Fills in a Gaussian target of
// the grid size when base.target is unset; photometric handling is overridden
// by correlation_signal, which respects the validity mask.
KccModel train_projection_model(const AxonometricFrame& key, const KccParams& base);

struct PlanarShift {
    double dx = 0.0;  // meters, grid-x (column) axis
    double dy = 0.0;  // meters, grid-y (row) axis
    int shift_col = 0;
    int shift_row = 0;
    double psr = 0.0;
};

// Planar content shift of cur relative to key via the correlator; metric
// scale from the projection resolution. nullopt when either frame is empty.
std::optional<PlanarShift> estimate_planar_shift(const AxonometricFrame& key,
                                                 const AxonometricFrame& cur,
                                                 const KccModel& model,
                                                 const ProjectionConfig& cfg);

// Mean depth difference over pixels valid in both frames (cur sampled at the
// detected shift) whose intensities agree within color_match_threshold.
// nullopt when fewer than min_matched_pixels qualify. matched_out reports the
// qualifying count when non-null.
std::optional<double> estimate_depth_shift(const AxonometricFrame& key,
                                           const AxonometricFrame& cur, int shift_col,
                                           int shift_row, const TranslationParams& params,
                                           int* matched_out = nullptr);

// One frame's full translation measurement against the keyframe.
struct TranslationMeasurement {
    bool has_estimate = false;            // d is meaningful
    Eigen::Vector3d d = Eigen::Vector3d::Zero();  // (dx, dy, dz) content shift, meters
    double psr = 0.0;
    int matched_pixels = 0;
    int shift_col = 0;
    int shift_row = 0;
    bool empty_frame = false;             // projection carried no valid cells
};

TranslationMeasurement measure_translation(const AxonometricFrame& key,
                                           const AxonometricFrame& cur, const KccModel& model,
                                           const ProjectionConfig& cfg,
                                           const TranslationParams& params);

}  // namespace corvo
