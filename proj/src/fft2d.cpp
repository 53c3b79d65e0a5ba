#include "corvo/kcc/fft2d.hpp"

#include <cstring>
#include <map>
#include <memory>
#include <mutex>
#include <utility>

#include <fftw3.h>

#include "corvo/core/errors.hpp"

namespace corvo {

namespace {
// FFTW's planner mutates global state; executions are safe concurrently.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}
}  // namespace

Fft2D::Fft2D(int width, int height) : width_(width), height_(height) {
    if (width < 1 || height < 1) throw ConfigError("Fft2D: dimensions must be positive");
    const std::size_t n = static_cast<std::size_t>(width) * height;
    buf_in_ = static_cast<std::complex<double>*>(fftw_malloc(sizeof(fftw_complex) * n));
    buf_out_ = static_cast<std::complex<double>*>(fftw_malloc(sizeof(fftw_complex) * n));
    std::lock_guard<std::mutex> lock(planner_mutex());
    plan_fwd_ = fftw_plan_dft_2d(height, width, reinterpret_cast<fftw_complex*>(buf_in_),
                                 reinterpret_cast<fftw_complex*>(buf_out_), FFTW_FORWARD,
                                 FFTW_ESTIMATE);
    plan_bwd_ = fftw_plan_dft_2d(height, width, reinterpret_cast<fftw_complex*>(buf_in_),
                                 reinterpret_cast<fftw_complex*>(buf_out_), FFTW_BACKWARD,
                                 FFTW_ESTIMATE);
}

Fft2D::~Fft2D() {
    {
        std::lock_guard<std::mutex> lock(planner_mutex());
        fftw_destroy_plan(static_cast<fftw_plan>(plan_fwd_));
        fftw_destroy_plan(static_cast<fftw_plan>(plan_bwd_));
    }
    fftw_free(buf_in_);
    fftw_free(buf_out_);
}

void Fft2D::forward(const std::complex<double>* in, std::complex<double>* out) {
    const std::size_t n = static_cast<std::size_t>(width_) * height_;
    std::memcpy(buf_in_, in, n * sizeof(std::complex<double>));
    fftw_execute(static_cast<fftw_plan>(plan_fwd_));
    std::memcpy(out, buf_out_, n * sizeof(std::complex<double>));
}

void Fft2D::inverse(const std::complex<double>* in, std::complex<double>* out) {
    const std::size_t n = static_cast<std::size_t>(width_) * height_;
    std::memcpy(buf_in_, in, n * sizeof(std::complex<double>));
    fftw_execute(static_cast<fftw_plan>(plan_bwd_));
    const double scale = 1.0 / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = buf_out_[i] * scale;
}

Fft2D& fft_for(int width, int height) {
    thread_local std::map<std::pair<int, int>, std::unique_ptr<Fft2D>> cache;
    auto& slot = cache[{width, height}];
    if (!slot) slot = std::make_unique<Fft2D>(width, height);
    return *slot;
}

}  // namespace corvo
