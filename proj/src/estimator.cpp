#include "ecall/estimator.hpp"

#include <cmath>

#include "ecall/fft.hpp"
#include "ecall/optimizer.hpp"

namespace ecall {

double default_closed_form_eps(const ExpectationBundle& x_bundle) {
  double max_sq = 0;
  for (const complexd& z : x_bundle.mean_spectrum.data()) {
    max_sq = std::max(max_sq, std::norm(z));
  }
  return 1e-6 * max_sq;
}

Kernel closed_form_estimate(const ExpectationBundle& y_bundle, const ExpectationBundle& x_bundle,
                            double eps, int size) {
  if (!(eps > 0)) throw ConfigError("closed-form eps must be positive");
  if (y_bundle.empty() || x_bundle.empty()) throw EmptyCollection();
  if (!y_bundle.mean_spectrum.same_shape(x_bundle.mean_spectrum)) throw DimensionMismatch();
  const int channels = x_bundle.channels(), h = x_bundle.height(), w = x_bundle.width();
  if (size > h || size > w) throw KernelLargerThanImage();

  const std::size_t plane = static_cast<std::size_t>(h) * w;
  std::size_t degenerate = 0;
  for (const complexd& z : x_bundle.mean_spectrum.data()) {
    if (std::abs(z) < eps) ++degenerate;
  }
  if (2 * degenerate > x_bundle.mean_spectrum.size()) throw DegenerateDenominator();

  std::vector<complexd> ratio(plane, complexd{});
  for (int c = 0; c < channels; ++c) {
    const complexd* ey = y_bundle.mean_spectrum.channel(c);
    const complexd* ex = x_bundle.mean_spectrum.channel(c);
    for (std::size_t b = 0; b < plane; ++b) {
      ratio[b] += ey[b] * std::conj(ex[b]) / (std::norm(ex[b]) + eps);
    }
  }
  const double inv_c = 1.0 / channels;
  for (auto& z : ratio) z *= inv_c;

  fft2_inplace(ratio.data(), h, w, true);
  const double scale = 1.0 / plane;
  Kernel k(size);
  const int c0 = k.center();
  for (int i = 0; i < size; ++i) {
    const int y = wrap_index(i - c0, h);
    for (int j = 0; j < size; ++j) {
      const int x = wrap_index(j - c0, w);
      k.at(i, j) = (ratio[static_cast<std::size_t>(y) * w + x] * scale).real();
    }
  }
  return k;
}

TrainingData TrainingData::build(const DatasetSplits& splits) {
  if (splits.originals.empty() || splits.observations.empty()) throw EmptyCollection();
  TrainingData d;
  const Image& probe = splits.originals.front();
  d.channels = probe.channels();
  d.height = probe.height();
  d.width = probe.width();
  d.n = static_cast<int>(splits.originals.size());

  auto batch_fft = [](std::span<const Image> images) {
    std::vector<Spectrum> out(images.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(images.size()); ++i) {
      out[i] = fft2(images[i]);
    }
    return out;
  };

  d.x_spec = batch_fft(splits.originals);
  d.y_spec = batch_fft(splits.observations);

  bool any_noise = false;
  for (const Image& ni : splits.noises) {
    for (double v : ni.data()) {
      if (v != 0.0) {
        any_noise = true;
        break;
      }
    }
    if (any_noise) break;
  }
  if (any_noise) d.noise_spec = batch_fft(splits.noises);

  auto sum_spectra = [&](const std::vector<Spectrum>& specs) {
    Spectrum sum(d.channels, d.height, d.width);
    for (const Spectrum& s : specs) {
      for (std::size_t i = 0; i < sum.size(); ++i) sum.data()[i] += s.data()[i];
    }
    return sum;
  };
  d.x_sum = sum_spectra(d.x_spec);
  d.y_sum = sum_spectra(d.y_spec);
  d.noise_sum = d.noise_spec.empty() ? Spectrum(d.channels, d.height, d.width)
                                     : sum_spectra(d.noise_spec);
  d.y_abs_sum.assign(d.y_sum.size(), 0.0);
  for (const Spectrum& s : d.y_spec) {
    for (std::size_t i = 0; i < d.y_abs_sum.size(); ++i) {
      d.y_abs_sum[i] += std::abs(s.data()[i]);
    }
  }
  d.x_mean_spec = d.x_sum;
  const double inv_n = 1.0 / d.n;
  for (auto& z : d.x_mean_spec.data()) z *= inv_n;
  d.y_full_sum = d.y_sum;
  return d;
}

namespace {

// One A-term evaluation on the full collection with a fresh noise pairing.
// The sigma permutation only affects the modulus term; the linear term uses
// the precomputed sums.
struct FullBatchViews {
  std::vector<const Spectrum*> x, noise;
};

FullBatchViews full_views(const TrainingData& d, const std::vector<int>& sigma) {
  FullBatchViews v;
  v.x.reserve(d.n);
  for (const Spectrum& s : d.x_spec) v.x.push_back(&s);
  if (!d.noise_spec.empty()) {
    v.noise.reserve(d.n);
    for (int i = 0; i < d.n; ++i) v.noise.push_back(&d.noise_spec[sigma[i]]);
  }
  return v;
}

}  // namespace

Kernel phase1_estimate(const TrainingData& data, const EcallConfig& cfg, Rng& rng,
                       std::vector<LossRow>* curve) {
  Kernel k = Kernel::delta(cfg.kernel_size);
  AdamW opt(k.weights().size(), AdamWConfig{.learning_rate = cfg.phase1.kernel_lr});
  const PhaseConfig& ph = cfg.phase1;
  if (curve) curve->reserve(ph.iterations);
  for (int it = 0; it < ph.iterations; ++it) {
    const std::vector<int> sigma = random_permutation(data.n, rng);
    const FrequencyMask mask =
        sample_mask(data.channels, data.height, data.width, cfg.mask_zero_fraction, rng);
    const FullBatchViews views = full_views(data, sigma);
    Kernel grad;
    const double a = eval_loss_a(k, views.x, views.noise, data.y_sum, data.y_abs_sum, mask,
                                 ph.weights.lambda_a1, ph.weights.lambda_a2, &grad, &data.x_sum,
                                 &data.noise_sum);
    const double c = ph.weights.lambda_c1 * k.squared_norm();
    for (std::size_t t = 0; t < grad.weights().size(); ++t) {
      grad.weights()[t] += 2.0 * ph.weights.lambda_c1 * k.weights()[t];
    }
    opt.step(k.weights(), grad.weights());
    if (curve) curve->push_back({it, a, 0.0, c, a + c});
  }
  return k;
}

Kernel phase1_estimate(const DatasetSplits& splits, const EcallConfig& cfg, Rng& rng,
                       std::vector<LossRow>* curve) {
  const TrainingData data = TrainingData::build(splits);
  return phase1_estimate(data, cfg, rng, curve);
}

}  // namespace ecall
