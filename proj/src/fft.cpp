#include "ecall/fft.hpp"

#include <cmath>
#include <memory>

namespace ecall {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

bool is_pow2(int n) { return n > 0 && (n & (n - 1)) == 0; }

int next_pow2(int n) {
  int m = 1;
  while (m < n) m <<= 1;
  return m;
}

// One-dimensional forward transform plan: radix-2 Cooley-Tukey for powers of
// two, Bluestein's chirp-z otherwise. Built per fft2_inplace call; plans hold
// only immutable tables.
struct Plan {
  explicit Plan(int n);

  void forward(complexd* a) const;

  int n;
  bool pow2;
  // radix-2 tables
  std::vector<int> rev;
  std::vector<complexd> twiddle;  // exp(-2*pi*i*k/n), k < n/2
  // Bluestein tables
  std::unique_ptr<Plan> sub;      // power-of-two subplan of length m
  std::vector<complexd> chirp;    // exp(-i*pi*(j*j mod 2n)/n)
  std::vector<complexd> bspec;    // forward FFT of the wrapped conjugate chirp
};

void fft_pow2(complexd* a, int n, const std::vector<int>& rev, const std::vector<complexd>& tw) {
  for (int i = 0; i < n; ++i) {
    const int j = rev[i];
    if (j > i) std::swap(a[i], a[j]);
  }
  for (int len = 2; len <= n; len <<= 1) {
    const int half = len >> 1;
    const int step = n / len;
    for (int base = 0; base < n; base += len) {
      for (int k = 0; k < half; ++k) {
        const complexd w = tw[k * step];
        const complexd u = a[base + k];
        const complexd v = a[base + k + half] * w;
        a[base + k] = u + v;
        a[base + k + half] = u - v;
      }
    }
  }
}

Plan::Plan(int length) : n(length), pow2(is_pow2(length)) {
  if (pow2) {
    rev.resize(n);
    int bits = 0;
    while ((1 << bits) < n) ++bits;
    for (int i = 0; i < n; ++i) {
      int r = 0;
      for (int b = 0; b < bits; ++b) {
        if (i & (1 << b)) r |= 1 << (bits - 1 - b);
      }
      rev[i] = r;
    }
    twiddle.resize(n / 2 > 0 ? n / 2 : 1);
    for (int k = 0; k < n / 2; ++k) {
      const double ang = -kTwoPi * k / n;
      twiddle[k] = complexd(std::cos(ang), std::sin(ang));
    }
    return;
  }
  // Bluestein: X_k = chirp_k * (a (*) b)_k with a_j = x_j*chirp_j and
  // b_j = conj(chirp_|j|) embedded circularly in a power-of-two length.
  const int m = next_pow2(2 * n - 1);
  sub = std::make_unique<Plan>(m);
  chirp.resize(n);
  for (int j = 0; j < n; ++j) {
    const long long q = (static_cast<long long>(j) * j) % (2LL * n);
    const double ang = -M_PI * static_cast<double>(q) / n;
    chirp[j] = complexd(std::cos(ang), std::sin(ang));
  }
  std::vector<complexd> b(m, complexd{});
  for (int j = 0; j < n; ++j) {
    const complexd c = std::conj(chirp[j]);
    b[j] = c;
    if (j != 0) b[m - j] = c;
  }
  fft_pow2(b.data(), m, sub->rev, sub->twiddle);
  bspec = std::move(b);
}

void Plan::forward(complexd* a) const {
  if (pow2) {
    fft_pow2(a, n, rev, twiddle);
    return;
  }
  const int m = sub->n;
  std::vector<complexd> buf(m, complexd{});
  for (int j = 0; j < n; ++j) buf[j] = a[j] * chirp[j];
  fft_pow2(buf.data(), m, sub->rev, sub->twiddle);
  for (int j = 0; j < m; ++j) buf[j] *= bspec[j];
  // inverse power-of-two transform via conjugation
  for (auto& z : buf) z = std::conj(z);
  fft_pow2(buf.data(), m, sub->rev, sub->twiddle);
  const double scale = 1.0 / m;
  for (int k = 0; k < n; ++k) a[k] = std::conj(buf[k]) * scale * chirp[k];
}

}  // namespace

void fft2_inplace(complexd* grid, int height, int width, bool inverse) {
  const std::size_t total = static_cast<std::size_t>(height) * width;
  if (inverse) {
    for (std::size_t i = 0; i < total; ++i) grid[i] = std::conj(grid[i]);
  }
  const Plan row_plan(width);
  const Plan col_plan(height);
#pragma omp parallel for schedule(static)
  for (int y = 0; y < height; ++y) {
    row_plan.forward(grid + static_cast<std::size_t>(y) * width);
  }
#pragma omp parallel
  {
    std::vector<complexd> col(height);
#pragma omp for schedule(static)
    for (int x = 0; x < width; ++x) {
      for (int y = 0; y < height; ++y) col[y] = grid[static_cast<std::size_t>(y) * width + x];
      col_plan.forward(col.data());
      for (int y = 0; y < height; ++y) grid[static_cast<std::size_t>(y) * width + x] = col[y];
    }
  }
  if (inverse) {
    for (std::size_t i = 0; i < total; ++i) grid[i] = std::conj(grid[i]);
  }
}

Spectrum fft2(const Image& img) {
  if (img.size() == 0) throw DimensionMismatch("fft2 of an empty image");
  Spectrum out(img.channels(), img.height(), img.width());
  const std::size_t plane = static_cast<std::size_t>(img.height()) * img.width();
  for (int c = 0; c < img.channels(); ++c) {
    const double* src = img.channel(c);
    complexd* dst = out.channel(c);
    for (std::size_t i = 0; i < plane; ++i) dst[i] = complexd(src[i], 0.0);
    fft2_inplace(dst, img.height(), img.width(), false);
  }
  return out;
}

Image ifft2(const Spectrum& spec) {
  if (spec.size() == 0) throw DimensionMismatch("ifft2 of an empty spectrum");
  const int h = spec.height(), w = spec.width();
  const double scale = 1.0 / (static_cast<double>(h) * w);
  std::vector<complexd> buf;
  std::vector<double> out(spec.size());
  double max_re = 0.0, max_im = 0.0;
  const std::size_t plane = static_cast<std::size_t>(h) * w;
  for (int c = 0; c < spec.channels(); ++c) {
    buf.assign(spec.channel(c), spec.channel(c) + plane);
    fft2_inplace(buf.data(), h, w, true);
    double* dst = out.data() + static_cast<std::size_t>(c) * plane;
    for (std::size_t i = 0; i < plane; ++i) {
      const complexd z = buf[i] * scale;
      dst[i] = z.real();
      max_re = std::max(max_re, std::abs(z.real()));
      max_im = std::max(max_im, std::abs(z.imag()));
    }
  }
  if (max_im > 1e-8 && max_im > 1e-6 * max_re) throw NonNegligibleImaginaryPart();
  return Image(spec.channels(), h, w, std::move(out));
}

std::vector<complexd> kernel_spectrum_grid(const Kernel& k, int height, int width) {
  if (k.size() > height || k.size() > width) throw KernelLargerThanImage();
  std::vector<complexd> grid(static_cast<std::size_t>(height) * width, complexd{});
  const int c = k.center();
  for (int i = 0; i < k.size(); ++i) {
    const int y = wrap_index(i - c, height);
    for (int j = 0; j < k.size(); ++j) {
      const int x = wrap_index(j - c, width);
      grid[static_cast<std::size_t>(y) * width + x] += k.at(i, j);
    }
  }
  fft2_inplace(grid.data(), height, width, false);
  return grid;
}

Spectrum kernel_spectrum(const Kernel& k, int height, int width) {
  return Spectrum(1, height, width, kernel_spectrum_grid(k, height, width));
}

Image convolve_periodic(const Image& img, const Kernel& k) {
  if (k.size() > img.height() || k.size() > img.width()) throw KernelLargerThanImage();
  const int h = img.height(), w = img.width();
  const std::vector<complexd> ks = kernel_spectrum_grid(k, h, w);
  const double scale = 1.0 / (static_cast<double>(h) * w);
  const std::size_t plane = static_cast<std::size_t>(h) * w;
  std::vector<double> out(img.size());
  std::vector<complexd> buf(plane);
  double max_re = 0.0, max_im = 0.0;
  for (int c = 0; c < img.channels(); ++c) {
    const double* src = img.channel(c);
    for (std::size_t i = 0; i < plane; ++i) buf[i] = complexd(src[i], 0.0);
    fft2_inplace(buf.data(), h, w, false);
    for (std::size_t i = 0; i < plane; ++i) buf[i] *= ks[i];
    fft2_inplace(buf.data(), h, w, true);
    double* dst = out.data() + static_cast<std::size_t>(c) * plane;
    for (std::size_t i = 0; i < plane; ++i) {
      const complexd z = buf[i] * scale;
      dst[i] = z.real();
      max_re = std::max(max_re, std::abs(z.real()));
      max_im = std::max(max_im, std::abs(z.imag()));
    }
  }
  if (max_im > 1e-8 && max_im > 1e-6 * max_re) throw NonNegligibleImaginaryPart();
  return Image(img.channels(), h, w, std::move(out));
}

}  // namespace ecall
