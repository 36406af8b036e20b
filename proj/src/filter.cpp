#include "ecall/filter.hpp"

#include "ecall/fft.hpp"

namespace ecall {

SpectralFilter SpectralFilter::identity(int h, int w) {
  SpectralFilter f(h, w);
  for (auto& g : f.gains) g = complexd(1.0, 0.0);
  return f;
}

SpectralFilter wiener_filter(const Kernel& k, double nsr, int height, int width,
                             int* zeroed_bins) {
  if (nsr < 0) throw ConfigError("wiener nsr must be nonnegative");
  const std::vector<complexd> ks = kernel_spectrum_grid(k, height, width);
  SpectralFilter f(height, width);
  int zeroed = 0;
  for (std::size_t i = 0; i < ks.size(); ++i) {
    const double denom = std::norm(ks[i]) + nsr;
    if (denom == 0.0) {
      f.gains[i] = complexd{};
      ++zeroed;
    } else {
      f.gains[i] = std::conj(ks[i]) / denom;
    }
  }
  if (zeroed_bins) *zeroed_bins = zeroed;
  return f;
}

Image apply(const SpectralFilter& f, const Image& img) {
  if (f.height != img.height() || f.width != img.width()) throw DimensionMismatch();
  Spectrum spec = fft2(img);
  const std::size_t plane = static_cast<std::size_t>(f.height) * f.width;
  for (int c = 0; c < spec.channels(); ++c) {
    complexd* ch = spec.channel(c);
    for (std::size_t i = 0; i < plane; ++i) ch[i] *= f.gains[i];
  }
  return ifft2(spec);
}

}  // namespace ecall
