#pragma once

#include <complex>

#include "corvo/core/image.hpp"

namespace corvo {

struct KccParams {
    // Ridge regularizer on the correlator weights.
    double lambda = 1e-4;
    // Gaussian kernel bandwidth, in intensity units per pixel (the kernel
    // exponent uses the mean squared difference between the two signals).
    double sigma = 0.2;
    // Desired response; peak at zero shift. See gaussian_target / one_hot_target.
    Image<double> target;
    // Sidelobe statistics exclude a (2r+1)^2 window around the peak.
    int psr_exclusion_radius = 5;
    // Mean-subtract and scale to unit max-abs before correlating.
    bool photometric_normalize = true;

    void validate() const;
};

// Gaussian bump of the given std (pixels) centered at zero shift, wrapped
// circularly; peak value 1.
Image<double> gaussian_target(int width, int height, double std_px = 1.0);
// 1 at zero shift, 0 elsewhere.
Image<double> one_hot_target(int width, int height);

// Trained correlator. Immutable once built; safe to share across threads.
struct KccModel {
    Image<std::complex<double>> x_spectrum;      // F(x), photometric prep applied
    Image<std::complex<double>> alpha_spectrum;  // F(alpha)
    double x_norm_sq = 0.0;
    KccParams params;

    int width() const { return x_spectrum.width(); }
    int height() const { return x_spectrum.height(); }
};

struct CorrelationResult {
    // Detected circular shift of the query relative to the training sample,
    // wrapped to (-N/2, N/2] per axis.
    int shift_row = 0;
    int shift_col = 0;
    double peak_value = 0.0;
    double psr = 0.0;
    Image<double> response;  // populated only when requested
};

KccModel train(const Image<double>& x, const KccParams& params);

CorrelationResult detect(const KccModel& model, const Image<double>& z,
                         bool keep_response = false);

// Peak-to-sidelobe ratio: (peak - mean) / stddev over pixels outside the
// exclusion window (wrapped at the borders). Zero sidelobe variance — or no
// sidelobe pixels at all — yields +infinity, i.e. a perfect match.
double psr(const Image<double>& response, int peak_col, int peak_row, int exclusion_radius);

}  // namespace corvo
