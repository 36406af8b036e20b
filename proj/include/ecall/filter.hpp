#pragma once

#include "ecall/tensor.hpp"

namespace ecall {

// Per-frequency complex gains: a learned linear shift-invariant reconstruction
// operator. Single channel, broadcast over image channels.
struct SpectralFilter {
  int height = 0, width = 0;
  std::vector<complexd> gains;  // h*w, row-major

  SpectralFilter() = default;
  SpectralFilter(int h, int w) : height(h), width(w), gains(static_cast<std::size_t>(h) * w) {}

  complexd& at(int u, int v) { return gains[static_cast<std::size_t>(u) * width + v]; }
  complexd at(int u, int v) const { return gains[static_cast<std::size_t>(u) * width + v]; }

  // All-ones gains: the identity map.
  static SpectralFilter identity(int h, int w);
};

// gains = conj(k^) / (|k^|^2 + nsr). With nsr = 0, exact-zero bins get gain 0;
// their count is reported through zeroed_bins when non-null.
SpectralFilter wiener_filter(const Kernel& k, double nsr, int height, int width,
                             int* zeroed_bins = nullptr);

// ifft2(gains .* fft2(img)) per channel; the output must be real up to the
// usual imaginary-residue check.
Image apply(const SpectralFilter& f, const Image& img);

}  // namespace ecall
