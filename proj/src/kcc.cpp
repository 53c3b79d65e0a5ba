#include "corvo/kcc/kcc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "corvo/core/errors.hpp"
#include "corvo/kcc/fft2d.hpp"

namespace corvo {

void KccParams::validate() const {
    if (lambda < 0.0) throw ConfigError("lambda must be >= 0");
    if (!(sigma > 0.0)) throw ConfigError("sigma must be positive");
    if (target.empty()) throw ConfigError("target response is unset");
    if (psr_exclusion_radius < 0) throw ConfigError("psr_exclusion_radius must be >= 0");
}

Image<double> gaussian_target(int width, int height, double std_px) {
    Image<double> y(width, height, 0.0);
    const double inv = 1.0 / (2.0 * std_px * std_px);
    for (int v = 0; v < height; ++v) {
        const int dv = std::min(v, height - v);
        for (int u = 0; u < width; ++u) {
            const int du = std::min(u, width - u);
            y.at(u, v) = std::exp(-(du * du + dv * dv) * inv);
        }
    }
    return y;
}

Image<double> one_hot_target(int width, int height) {
    Image<double> y(width, height, 0.0);
    y.at(0, 0) = 1.0;
    return y;
}

namespace {

using Cplx = std::complex<double>;

void check_finite(const Image<double>& img, const char* what) {
    for (int v = 0; v < img.height(); ++v)
        for (int u = 0; u < img.width(); ++u)
            if (!std::isfinite(img.at(u, v))) throw DataError(std::string(what) + ": non-finite value");
}

// Mean-subtract, then scale so the largest magnitude is 1. Constant images
// come out all-zero.
Image<double> photometric_prep(const Image<double>& img) {
    const int w = img.width(), h = img.height();
    double mean = 0.0;
    for (int v = 0; v < h; ++v)
        for (int u = 0; u < w; ++u) mean += img.at(u, v);
    mean /= static_cast<double>(w) * h;

    Image<double> out(w, h);
    double max_abs = 0.0;
    for (int v = 0; v < h; ++v) {
        for (int u = 0; u < w; ++u) {
            const double d = img.at(u, v) - mean;
            out.at(u, v) = d;
            max_abs = std::max(max_abs, std::abs(d));
        }
    }
    if (max_abs > 1e-12) {
        const double inv = 1.0 / max_abs;
        for (int v = 0; v < h; ++v)
            for (int u = 0; u < w; ++u) out.at(u, v) *= inv;
    }
    return out;
}

Image<Cplx> forward_real(const Image<double>& img, Fft2D& fft) {
    const int w = img.width(), h = img.height();
    std::vector<Cplx> in(static_cast<std::size_t>(w) * h);
    for (std::size_t i = 0; i < in.size(); ++i) in[i] = Cplx(img.data()[i], 0.0);
    Image<Cplx> out(w, h);
    fft.forward(in.data(), out.data());
    return out;
}

double norm_sq(const Image<double>& img) {
    double s = 0.0;
    const std::size_t n = static_cast<std::size_t>(img.width()) * img.height();
    for (std::size_t i = 0; i < n; ++i) s += img.data()[i] * img.data()[i];
    return s;
}

// Gaussian kernel vector between z and every circular shift of x, evaluated
// spectrally: k[d] = exp(-max(0, |x|^2 + |z|^2 - 2 corr[d]) / (sigma^2 n)).
Image<double> kernel_vector(const Image<Cplx>& z_spec, const Image<Cplx>& x_spec,
                            double z_norm_sq, double x_norm_sq, double sigma, Fft2D& fft) {
    const int w = x_spec.width(), h = x_spec.height();
    const std::size_t n = static_cast<std::size_t>(w) * h;
    std::vector<Cplx> prod(n);
    for (std::size_t i = 0; i < n; ++i) prod[i] = z_spec.data()[i] * std::conj(x_spec.data()[i]);
    std::vector<Cplx> corr(n);
    fft.inverse(prod.data(), corr.data());

    Image<double> k(w, h);
    const double inv = 1.0 / (sigma * sigma * static_cast<double>(n));
    for (std::size_t i = 0; i < n; ++i) {
        const double dist_sq = std::max(0.0, x_norm_sq + z_norm_sq - 2.0 * corr[i].real());
        k.data()[i] = std::exp(-dist_sq * inv);
    }
    return k;
}

}  // namespace

KccModel train(const Image<double>& x, const KccParams& params) {
    params.validate();
    if (!params.target.same_size(x.width(), x.height()))
        throw ConfigError("train: target dimensions do not match sample");
    check_finite(x, "train");

    Fft2D& fft = fft_for(x.width(), x.height());
    const Image<double> xp = params.photometric_normalize ? photometric_prep(x) : x;

    KccModel model;
    model.params = params;
    model.x_spectrum = forward_real(xp, fft);
    model.x_norm_sq = norm_sq(xp);

    const Image<double> kxx =
        kernel_vector(model.x_spectrum, model.x_spectrum, model.x_norm_sq, model.x_norm_sq,
                      params.sigma, fft);
    Image<Cplx> kxx_spec(x.width(), x.height());
    {
        std::vector<Cplx> in(static_cast<std::size_t>(x.width()) * x.height());
        for (std::size_t i = 0; i < in.size(); ++i) in[i] = Cplx(kxx.data()[i], 0.0);
        fft.forward(in.data(), kxx_spec.data());
    }
    const Image<Cplx> y_spec = forward_real(params.target, fft);

    model.alpha_spectrum = Image<Cplx>(x.width(), x.height());
    const std::size_t n = static_cast<std::size_t>(x.width()) * x.height();
    for (std::size_t i = 0; i < n; ++i)
        model.alpha_spectrum.data()[i] = y_spec.data()[i] / (kxx_spec.data()[i] + params.lambda);
    return model;
}

CorrelationResult detect(const KccModel& model, const Image<double>& z, bool keep_response) {
    if (!z.same_size(model.width(), model.height()))
        throw ConfigError("detect: query dimensions do not match model");
    check_finite(z, "detect");

    const int w = model.width(), h = model.height();
    const std::size_t n = static_cast<std::size_t>(w) * h;
    Fft2D& fft = fft_for(w, h);

    const Image<double> zp = model.params.photometric_normalize ? photometric_prep(z) : z;
    const Image<Cplx> z_spec = forward_real(zp, fft);
    const Image<double> kzx = kernel_vector(z_spec, model.x_spectrum, norm_sq(zp),
                                            model.x_norm_sq, model.params.sigma, fft);

    std::vector<Cplx> kzx_spec(n);
    {
        std::vector<Cplx> in(n);
        for (std::size_t i = 0; i < n; ++i) in[i] = Cplx(kzx.data()[i], 0.0);
        fft.forward(in.data(), kzx_spec.data());
    }
    for (std::size_t i = 0; i < n; ++i) kzx_spec[i] *= model.alpha_spectrum.data()[i];
    std::vector<Cplx> resp(n);
    fft.inverse(kzx_spec.data(), resp.data());

    Image<double> response(w, h);
    for (std::size_t i = 0; i < n; ++i) response.data()[i] = resp[i].real();

    // First maximum in scan order keeps ties deterministic.
    std::size_t best = 0;
    for (std::size_t i = 1; i < n; ++i)
        if (response.data()[i] > response.data()[best]) best = i;
    const int peak_row = static_cast<int>(best) / w;
    const int peak_col = static_cast<int>(best) % w;

    CorrelationResult result;
    result.peak_value = response.data()[best];
    result.shift_row = peak_row > h / 2 ? peak_row - h : peak_row;
    result.shift_col = peak_col > w / 2 ? peak_col - w : peak_col;
    result.psr = psr(response, peak_col, peak_row, model.params.psr_exclusion_radius);
    if (keep_response) result.response = std::move(response);
    return result;
}

double psr(const Image<double>& response, int peak_col, int peak_row, int exclusion_radius) {
    const int w = response.width(), h = response.height();
    const double peak = response.at(peak_col, peak_row);

    double sum = 0.0, sum_sq = 0.0;
    long long count = 0;
    for (int v = 0; v < h; ++v) {
        // Circular distance to the peak, per axis.
        int dv = std::abs(v - peak_row);
        dv = std::min(dv, h - dv);
        for (int u = 0; u < w; ++u) {
            int du = std::abs(u - peak_col);
            du = std::min(du, w - du);
            if (du <= exclusion_radius && dv <= exclusion_radius) continue;
            const double r = response.at(u, v);
            sum += r;
            sum_sq += r * r;
            ++count;
        }
    }
    if (count == 0) return std::numeric_limits<double>::infinity();
    const double mean = sum / count;
    const double var = std::max(0.0, sum_sq / count - mean * mean);
    if (var <= 0.0) return std::numeric_limits<double>::infinity();
    return (peak - mean) / std::sqrt(var);
}

}  // namespace corvo
