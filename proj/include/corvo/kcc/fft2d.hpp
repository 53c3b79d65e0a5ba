#pragma once

#include <complex>

namespace corvo {

// Cached 2-D complex DFTs of one fixed size. Plans use FFTW_ESTIMATE so the
// chosen algorithm (and thus the exact floating-point result) never depends
// on runtime measurement; plan creation/destruction is serialized internally.
// Each instance owns its transform buffers — distinct instances may run
// concurrently, one instance must not.
class Fft2D {
  public:
    Fft2D(int width, int height);
    ~Fft2D();
    Fft2D(const Fft2D&) = delete;
    Fft2D& operator=(const Fft2D&) = delete;

    int width() const { return width_; }
    int height() const { return height_; }

    // Unscaled forward transform, row-major height x width.
    void forward(const std::complex<double>* in, std::complex<double>* out);
    // Inverse transform including the 1/(width*height) factor.
    void inverse(const std::complex<double>* in, std::complex<double>* out);

  private:
    int width_, height_;
    void* plan_fwd_;
    void* plan_bwd_;
    std::complex<double>* buf_in_;
    std::complex<double>* buf_out_;
};

// Per-thread plan cache keyed by size; the reference stays valid for the
// thread's lifetime.
Fft2D& fft_for(int width, int height);

}  // namespace corvo
