#include "ecall/losses.hpp"

#include <cmath>

#include "ecall/fft.hpp"

namespace ecall {

namespace {

double serial_sum(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x;
  return s;
}

std::vector<Spectrum> spectra_of(std::span<const Image> images) {
  std::vector<Spectrum> out;
  out.reserve(images.size());
  for (const Image& img : images) out.push_back(fft2(img));
  return out;
}

std::vector<const Spectrum*> pointers_of(const std::vector<Spectrum>& specs) {
  std::vector<const Spectrum*> out;
  out.reserve(specs.size());
  for (const Spectrum& s : specs) out.push_back(&s);
  return out;
}

Spectrum sum_of(std::span<const Spectrum* const> specs, int channels, int height, int width) {
  Spectrum out(channels, height, width);
  complexd* dst = out.data().data();
  for (const Spectrum* s : specs) {
    const complexd* src = s->data().data();
    const std::size_t n = out.size();
    for (std::size_t i = 0; i < n; ++i) dst[i] += src[i];
  }
  return out;
}

void check_batch_shapes(std::span<const Spectrum* const> batch, int channels, int height,
                        int width) {
  for (const Spectrum* s : batch) {
    if (s->channels() != channels || s->height() != height || s->width() != width) {
      throw DimensionMismatch("batch spectra have inconsistent shapes");
    }
  }
}

}  // namespace

Kernel kernel_taps_from_bin_gradient(std::vector<complexd> grid, int size, int height, int width) {
  fft2_inplace(grid.data(), height, width, false);
  Kernel g(size);
  const int c = size / 2;
  for (int i = 0; i < size; ++i) {
    const int y = wrap_index(i - c, height);
    for (int j = 0; j < size; ++j) {
      const int x = wrap_index(j - c, width);
      g.at(i, j) = grid[static_cast<std::size_t>(y) * width + x].real();
    }
  }
  return g;
}

FrequencyMask FrequencyMask::all_pass(int channels, int height, int width) {
  FrequencyMask m;
  m.channels = channels;
  m.height = height;
  m.width = width;
  m.keep.assign(static_cast<std::size_t>(channels) * height * width, 1);
  m.keep_fraction = 1.0;
  return m;
}

FrequencyMask sample_mask(int channels, int height, int width, double zero_fraction, Rng& rng) {
  if (zero_fraction < 0.0 || zero_fraction >= 1.0) {
    throw ConfigError("mask zero_fraction must lie in [0, 1)");
  }
  FrequencyMask m;
  m.channels = channels;
  m.height = height;
  m.width = width;
  m.keep_fraction = 1.0 - zero_fraction;
  m.keep.resize(static_cast<std::size_t>(channels) * height * width);
  for (auto& bit : m.keep) bit = rand_unit(rng) >= zero_fraction ? 1 : 0;
  return m;
}

double eval_loss_a(const Kernel& k, std::span<const Spectrum* const> xs,
                   std::span<const Spectrum* const> ns, const Spectrum& y_sum,
                   std::span<const double> y_abs_sum, const FrequencyMask& mask, double lambda_a1,
                   double lambda_a2, Kernel* grad_out, const Spectrum* x_sum_hint,
                   const Spectrum* noise_sum_hint) {
  const int channels = y_sum.channels(), h = y_sum.height(), w = y_sum.width();
  if (xs.empty()) throw DimensionMismatch("loss_A needs a nonempty batch");
  if (!ns.empty() && ns.size() != xs.size()) {
    throw DimensionMismatch("noise batch must be empty or match the image batch size");
  }
  if (!mask.covers(channels, h, w)) throw DimensionMismatch("mask shape does not match spectra");
  if (y_abs_sum.size() != y_sum.size()) throw DimensionMismatch("y statistics disagree in size");
  check_batch_shapes(xs, channels, h, w);
  check_batch_shapes(ns, channels, h, w);

  const std::vector<complexd> kg = kernel_spectrum_grid(k, h, w);
  const std::size_t plane = static_cast<std::size_t>(h) * w;
  const int n = static_cast<int>(xs.size());
  const double inv_n = 1.0 / n;

  Spectrum x_sum_local, noise_sum_local;
  const Spectrum* x_sum = x_sum_hint;
  if (!x_sum) {
    x_sum_local = sum_of(xs, channels, h, w);
    x_sum = &x_sum_local;
  }
  const Spectrum* d_sum = noise_sum_hint;
  if (!d_sum && !ns.empty()) {
    noise_sum_local = sum_of(ns, channels, h, w);
    d_sum = &noise_sum_local;
  }

  std::vector<double> bin_value(plane, 0.0);
  std::vector<complexd> m_grid;
  if (grad_out) m_grid.assign(plane, complexd{});

  const bool has_term2 = lambda_a2 != 0.0;

  // Residuals at rounding-noise level sit on the L1 kink; their subgradient
  // is taken as 0 so the gradient vanishes at an exact minimum.
  double kink1 = 0, kink2 = 0;
  if (grad_out) {
    for (const complexd& z : y_sum.data()) kink1 = std::max(kink1, std::abs(z));
    for (double v : y_abs_sum) kink2 = std::max(kink2, v);
    kink1 *= 1e-12;
    kink2 *= 1e-12;
  }

#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t bi = 0; bi < static_cast<std::ptrdiff_t>(plane); ++bi) {
    const std::size_t b = static_cast<std::size_t>(bi);
    double v = 0;
    complexd m{};
    for (int c = 0; c < channels; ++c) {
      const std::size_t idx = static_cast<std::size_t>(c) * plane + b;
      if (!mask.keep[idx]) continue;
      if (lambda_a1 != 0.0) {
        const complexd model = kg[b] * x_sum->data()[idx] + (d_sum ? d_sum->data()[idx] : complexd{});
        const complexd r = y_sum.data()[idx] - model;
        const double mag = std::abs(r);
        v += lambda_a1 * inv_n * mag;
        if (grad_out && mag > 0.0) {
          m += lambda_a1 * inv_n * (-std::conj(r) / mag) * x_sum->data()[idx];
        }
      }
      if (has_term2) {
        double abs_model = 0;
        complexd t{};
        for (int i = 0; i < n; ++i) {
          const complexd xv = xs[i]->data()[idx];
          complexd s = kg[b] * xv;
          if (!ns.empty()) s += ns[i]->data()[idx];
          const double mag = std::abs(s);
          abs_model += mag;
          if (grad_out && mag > 0.0) t += (std::conj(s) / mag) * xv;
        }
        const double diff = y_abs_sum[idx] - abs_model;
        v += lambda_a2 * inv_n * std::abs(diff);
        if (grad_out && diff != 0.0) {
          const double sgn = diff > 0.0 ? 1.0 : -1.0;
          m += lambda_a2 * inv_n * (-sgn) * t;
        }
      }
    }
    bin_value[b] = v;
    if (grad_out) m_grid[b] = m;
  }

  if (grad_out) *grad_out = kernel_taps_from_bin_gradient(std::move(m_grid), k.size(), h, w);
  return serial_sum(bin_value);
}

double eval_loss_b(const Kernel& k, const SpectralFilter& f, std::span<const Spectrum* const> xs,
                   std::span<const Spectrum* const> ns, std::span<const Spectrum* const> ys,
                   double lambda_b1, double lambda_b2, Kernel* grad_k_out,
                   std::vector<complexd>* grad_g_out) {
  if (xs.empty() && ys.empty()) throw DimensionMismatch("loss_B needs a nonempty batch");
  if (!ns.empty() && ns.size() != xs.size()) {
    throw DimensionMismatch("noise batch must be empty or match the image batch size");
  }
  const Spectrum* probe = xs.empty() ? ys.front() : xs.front();
  const int channels = probe->channels(), h = probe->height(), w = probe->width();
  if (f.height != h || f.width != w) throw DimensionMismatch("filter shape does not match batch");
  check_batch_shapes(xs, channels, h, w);
  check_batch_shapes(ns, channels, h, w);
  check_batch_shapes(ys, channels, h, w);

  const std::vector<complexd> kg = kernel_spectrum_grid(k, h, w);
  const std::size_t plane = static_cast<std::size_t>(h) * w;
  const double k1 = ys.empty() ? 0.0 : lambda_b1 / (static_cast<double>(ys.size()) * plane);
  const double k2 = xs.empty() ? 0.0 : lambda_b2 / (static_cast<double>(xs.size()) * plane);

  std::vector<double> bin_value(plane, 0.0);
  const bool want_grad = grad_k_out || grad_g_out;
  std::vector<complexd> m_grid, g_grid;
  if (want_grad) {
    m_grid.assign(plane, complexd{});
    g_grid.assign(plane, complexd{});
  }

#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t bi = 0; bi < static_cast<std::ptrdiff_t>(plane); ++bi) {
    const std::size_t b = static_cast<std::size_t>(bi);
    const complexd kb = kg[b];
    const complexd gb = f.gains[b];
    double v = 0;
    complexd m{}, gg{};
    if (k1 != 0.0) {
      const complexd one_minus = 1.0 - kb * gb;
      for (const Spectrum* ysp : ys) {
        for (int c = 0; c < channels; ++c) {
          const complexd u = ysp->data()[static_cast<std::size_t>(c) * plane + b];
          const complexd r = u * one_minus;
          v += k1 * std::norm(r);
          if (want_grad) {
            gg += -2.0 * k1 * r * std::conj(kb * u);
            m += -2.0 * k1 * std::conj(r) * gb * u;
          }
        }
      }
    }
    if (k2 != 0.0) {
      for (std::size_t i = 0; i < xs.size(); ++i) {
        for (int c = 0; c < channels; ++c) {
          const std::size_t idx = static_cast<std::size_t>(c) * plane + b;
          const complexd xv = xs[i]->data()[idx];
          complexd s = kb * xv;
          if (!ns.empty()) s += ns[i]->data()[idx];
          const complexd r = xv - gb * s;
          v += k2 * std::norm(r);
          if (want_grad) {
            gg += -2.0 * k2 * r * std::conj(s);
            m += -2.0 * k2 * std::conj(r) * gb * xv;
          }
        }
      }
    }
    bin_value[b] = v;
    if (want_grad) {
      m_grid[b] = m;
      g_grid[b] = gg;
    }
  }

  if (grad_k_out) *grad_k_out = kernel_taps_from_bin_gradient(std::move(m_grid), k.size(), h, w);
  if (grad_g_out) *grad_g_out = std::move(g_grid);
  return serial_sum(bin_value);
}

double eval_loss_c(const Kernel& k, const SpectralFilter& f, const Spectrum& x_mean_spec,
                   const Spectrum& y_batch_sum, int batch_size, double lambda_c1, double lambda_c2,
                   Kernel* grad_k_out, std::vector<complexd>* grad_g_out) {
  const int channels = x_mean_spec.channels(), h = x_mean_spec.height(), w = x_mean_spec.width();
  if (!y_batch_sum.same_shape(x_mean_spec)) throw DimensionMismatch("x/y statistics disagree");
  if (f.height != h || f.width != w) throw DimensionMismatch("filter shape does not match data");
  if (batch_size <= 0) throw DimensionMismatch("loss_C needs a positive batch size");

  const std::size_t plane = static_cast<std::size_t>(h) * w;
  const double scale = lambda_c2 / (static_cast<double>(batch_size) * plane);

  double value = lambda_c1 * k.squared_norm();
  if (grad_k_out) {
    Kernel g(k.size());
    for (std::size_t t = 0; t < g.weights().size(); ++t) {
      g.weights()[t] = 2.0 * lambda_c1 * k.weights()[t];
    }
    *grad_k_out = std::move(g);
  }

  std::vector<double> bin_value(plane, 0.0);
  std::vector<complexd> g_grid;
  if (grad_g_out) g_grid.assign(plane, complexd{});

  if (lambda_c2 != 0.0) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t bi = 0; bi < static_cast<std::ptrdiff_t>(plane); ++bi) {
      const std::size_t b = static_cast<std::size_t>(bi);
      const complexd gb = f.gains[b];
      double v = 0;
      complexd gg{};
      for (int c = 0; c < channels; ++c) {
        const std::size_t idx = static_cast<std::size_t>(c) * plane + b;
        const complexd ysum = y_batch_sum.data()[idx];
        const complexd d = static_cast<double>(batch_size) * x_mean_spec.data()[idx] - gb * ysum;
        v += scale * std::norm(d);
        if (grad_g_out) gg += -2.0 * scale * d * std::conj(ysum);
      }
      bin_value[b] = v;
      if (grad_g_out) g_grid[b] = gg;
    }
  }

  if (grad_g_out) *grad_g_out = std::move(g_grid);
  return value + serial_sum(bin_value);
}

// ---------------------------------------------------------------------------
// Image-batch wrappers.
// ---------------------------------------------------------------------------

namespace {

struct ABatch {
  std::vector<Spectrum> xs, ns;
  std::vector<const Spectrum*> xp, np;
  Spectrum y_sum;
  std::vector<double> y_abs_sum;
};

ABatch prepare_a(std::span<const Image> x_batch, std::span<const Image> noise_batch,
                 const ExpectationBundle& y_bundle) {
  if (x_batch.empty()) throw DimensionMismatch("loss_A needs a nonempty batch");
  if (y_bundle.empty()) throw EmptyCollection();
  ABatch a;
  a.xs = spectra_of(x_batch);
  a.ns = spectra_of(noise_batch);
  a.xp = pointers_of(a.xs);
  a.np = pointers_of(a.ns);
  const double n = static_cast<double>(x_batch.size());
  a.y_sum = y_bundle.mean_spectrum;
  for (auto& z : a.y_sum.data()) z *= n;
  a.y_abs_sum = y_bundle.mean_abs_spectrum;
  for (auto& v : a.y_abs_sum) v *= n;
  return a;
}

}  // namespace

double loss_A(const Kernel& k, std::span<const Image> x_batch, std::span<const Image> noise_batch,
              const ExpectationBundle& y_bundle, const FrequencyMask& mask,
              const EcallWeights& weights) {
  ABatch a = prepare_a(x_batch, noise_batch, y_bundle);
  return eval_loss_a(k, a.xp, a.np, a.y_sum, a.y_abs_sum, mask, weights.lambda_a1,
                     weights.lambda_a2, nullptr);
}

Kernel grad_loss_A(const Kernel& k, std::span<const Image> x_batch,
                   std::span<const Image> noise_batch, const ExpectationBundle& y_bundle,
                   const FrequencyMask& mask, const EcallWeights& weights) {
  ABatch a = prepare_a(x_batch, noise_batch, y_bundle);
  Kernel grad;
  eval_loss_a(k, a.xp, a.np, a.y_sum, a.y_abs_sum, mask, weights.lambda_a1, weights.lambda_a2,
              &grad);
  return grad;
}

double loss_B(const Kernel& k, const SpectralFilter& f, std::span<const Image> x_batch,
              std::span<const Image> noise_batch, std::span<const Image> y_batch,
              const EcallWeights& weights) {
  const std::vector<Spectrum> xs = spectra_of(x_batch), ns = spectra_of(noise_batch),
                              ys = spectra_of(y_batch);
  return eval_loss_b(k, f, pointers_of(xs), pointers_of(ns), pointers_of(ys), weights.lambda_b1,
                     weights.lambda_b2, nullptr, nullptr);
}

KernelFilterGrad grad_loss_B(const Kernel& k, const SpectralFilter& f,
                             std::span<const Image> x_batch, std::span<const Image> noise_batch,
                             std::span<const Image> y_batch, const EcallWeights& weights) {
  const std::vector<Spectrum> xs = spectra_of(x_batch), ns = spectra_of(noise_batch),
                              ys = spectra_of(y_batch);
  KernelFilterGrad g;
  eval_loss_b(k, f, pointers_of(xs), pointers_of(ns), pointers_of(ys), weights.lambda_b1,
              weights.lambda_b2, &g.kernel, &g.gains);
  return g;
}

double loss_C(const Kernel& k, const SpectralFilter& f, const ExpectationBundle& x_bundle,
              std::span<const Image> y_batch, const EcallWeights& weights) {
  if (x_bundle.empty()) throw EmptyCollection();
  if (y_batch.empty()) throw DimensionMismatch("loss_C needs a nonempty batch");
  const std::vector<Spectrum> ys = spectra_of(y_batch);
  Spectrum y_sum = sum_of(pointers_of(ys), x_bundle.channels(), x_bundle.height(), x_bundle.width());
  return eval_loss_c(k, f, x_bundle.mean_spectrum, y_sum, static_cast<int>(y_batch.size()),
                     weights.lambda_c1, weights.lambda_c2, nullptr, nullptr);
}

KernelFilterGrad grad_loss_C(const Kernel& k, const SpectralFilter& f,
                             const ExpectationBundle& x_bundle, std::span<const Image> y_batch,
                             const EcallWeights& weights) {
  if (x_bundle.empty()) throw EmptyCollection();
  if (y_batch.empty()) throw DimensionMismatch("loss_C needs a nonempty batch");
  const std::vector<Spectrum> ys = spectra_of(y_batch);
  Spectrum y_sum = sum_of(pointers_of(ys), x_bundle.channels(), x_bundle.height(), x_bundle.width());
  KernelFilterGrad g;
  eval_loss_c(k, f, x_bundle.mean_spectrum, y_sum, static_cast<int>(y_batch.size()),
              weights.lambda_c1, weights.lambda_c2, &g.kernel, &g.gains);
  return g;
}

}  // namespace ecall
