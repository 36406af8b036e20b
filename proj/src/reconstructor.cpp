#include "ecall/reconstructor.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "ecall/fft.hpp"
#include "ecall/optimizer.hpp"

namespace ecall {

namespace {

// Mini-batch positions, sampled without replacement per epoch and reshuffled
// at every epoch boundary. batch <= 0 means the full collection.
class EpochSampler {
 public:
  EpochSampler(int n, int batch) : n_(n), batch_(batch <= 0 || batch > n ? n : batch) {
    order_.resize(n);
    for (int i = 0; i < n; ++i) order_[i] = i;
  }

  std::span<const int> next(Rng& rng) {
    if (pos_ + batch_ > static_cast<std::size_t>(n_)) pos_ = 0;
    if (pos_ == 0) shuffle_in_place(order_, rng);
    const std::span<const int> out(order_.data() + pos_, batch_);
    pos_ += batch_;
    return out;
  }

  int batch_size() const { return batch_; }

 private:
  int n_, batch_;
  std::vector<int> order_;
  std::size_t pos_ = 0;
};

std::span<double> gains_as_doubles(SpectralFilter& f) {
  return {reinterpret_cast<double*>(f.gains.data()), 2 * f.gains.size()};
}

std::span<const double> grad_as_doubles(const std::vector<complexd>& g) {
  return {reinterpret_cast<const double*>(g.data()), 2 * g.size()};
}

void add_weights(Kernel& acc, const Kernel& inc) {
  for (std::size_t i = 0; i < acc.weights().size(); ++i) acc.weights()[i] += inc.weights()[i];
}

struct BatchViews {
  std::vector<const Spectrum*> x, noise, y;
  Spectrum y_sum;
};

BatchViews gather_batch(const TrainingData& d, std::span<const int> x_pos,
                        std::span<const int> y_pos, const std::vector<int>& sigma) {
  BatchViews v;
  v.x.reserve(x_pos.size());
  if (!d.noise_spec.empty()) v.noise.reserve(x_pos.size());
  for (int p : x_pos) {
    v.x.push_back(&d.x_spec[p]);
    if (!d.noise_spec.empty()) v.noise.push_back(&d.noise_spec[sigma[p]]);
  }
  v.y.reserve(y_pos.size());
  v.y_sum = Spectrum(d.channels, d.height, d.width);
  for (int p : y_pos) {
    v.y.push_back(&d.y_spec[p]);
    const Spectrum& s = d.y_spec[p];
    for (std::size_t i = 0; i < v.y_sum.size(); ++i) v.y_sum.data()[i] += s.data()[i];
  }
  return v;
}

}  // namespace

TrainResult train_three_phase(const DatasetSplits& splits, const EcallConfig& cfg, Rng& rng) {
  const auto t0 = std::chrono::steady_clock::now();
  const TrainingData data = TrainingData::build(splits);

  TrainResult result;
  result.report.config_json = cfg.to_json();
  result.report.phase_curves.resize(3);

  // Phase 1: kernel only.
  result.kernel = phase1_estimate(data, cfg, rng, &result.report.phase_curves[0]);
  result.filter = SpectralFilter::identity(data.height, data.width);

  std::vector<const Spectrum*> x_all;
  for (const Spectrum& s : data.x_spec) x_all.push_back(&s);

  // Phase 2: joint kernel + filter.
  {
    const PhaseConfig& ph = cfg.phase2;
    AdamW opt_k(result.kernel.weights().size(), AdamWConfig{.learning_rate = ph.kernel_lr});
    AdamW opt_f(2 * result.filter.gains.size(), AdamWConfig{.learning_rate = ph.filter_lr});
    EpochSampler x_sampler(data.n, ph.batch), y_sampler(data.n, ph.batch);
    auto& curve = result.report.phase_curves[1];
    curve.reserve(ph.iterations);
    for (int it = 0; it < ph.iterations; ++it) {
      const std::vector<int> sigma = random_permutation(data.n, rng);
      const FrequencyMask mask =
          sample_mask(data.channels, data.height, data.width, cfg.mask_zero_fraction, rng);
      std::vector<const Spectrum*> noise_all;
      if (!data.noise_spec.empty()) {
        noise_all.reserve(data.n);
        for (int i = 0; i < data.n; ++i) noise_all.push_back(&data.noise_spec[sigma[i]]);
      }
      Kernel grad_a;
      const double a =
          eval_loss_a(result.kernel, x_all, noise_all, data.y_sum, data.y_abs_sum, mask,
                      ph.weights.lambda_a1, ph.weights.lambda_a2, &grad_a, &data.x_sum,
                      &data.noise_sum);

      const BatchViews bv =
          gather_batch(data, x_sampler.next(rng), y_sampler.next(rng), sigma);
      Kernel grad_b_k;
      std::vector<complexd> grad_b_g;
      const double b = eval_loss_b(result.kernel, result.filter, bv.x, bv.noise, bv.y,
                                   ph.weights.lambda_b1, ph.weights.lambda_b2, &grad_b_k,
                                   &grad_b_g);
      Kernel grad_c_k;
      std::vector<complexd> grad_c_g;
      const double c =
          cfg.c_term_full_collection
              ? eval_loss_c(result.kernel, result.filter, data.x_mean_spec, data.y_full_sum,
                            data.n, ph.weights.lambda_c1, ph.weights.lambda_c2, &grad_c_k,
                            &grad_c_g)
              : eval_loss_c(result.kernel, result.filter, data.x_mean_spec, bv.y_sum,
                            x_sampler.batch_size(), ph.weights.lambda_c1, ph.weights.lambda_c2,
                            &grad_c_k, &grad_c_g);

      add_weights(grad_a, grad_b_k);
      add_weights(grad_a, grad_c_k);
      for (std::size_t i = 0; i < grad_b_g.size(); ++i) grad_b_g[i] += grad_c_g[i];

      opt_k.step(result.kernel.weights(), grad_a.weights());
      opt_f.step(gains_as_doubles(result.filter), grad_as_doubles(grad_b_g));
      curve.push_back({it, a, b, c, a + b + c});
    }
  }

  // Phase 3: filter only; the kernel is frozen.
  {
    const PhaseConfig& ph = cfg.phase3;
    AdamW opt_f(2 * result.filter.gains.size(), AdamWConfig{.learning_rate = ph.filter_lr});
    EpochSampler x_sampler(data.n, ph.batch), y_sampler(data.n, ph.batch);
    auto& curve = result.report.phase_curves[2];
    curve.reserve(ph.iterations);
    for (int it = 0; it < ph.iterations; ++it) {
      const std::vector<int> sigma = random_permutation(data.n, rng);
      const BatchViews bv =
          gather_batch(data, x_sampler.next(rng), y_sampler.next(rng), sigma);
      std::vector<complexd> grad_b_g;
      const double b = eval_loss_b(result.kernel, result.filter, bv.x, bv.noise, bv.y,
                                   ph.weights.lambda_b1, ph.weights.lambda_b2, nullptr,
                                   &grad_b_g);
      std::vector<complexd> grad_c_g;
      const double c =
          cfg.c_term_full_collection
              ? eval_loss_c(result.kernel, result.filter, data.x_mean_spec, data.y_full_sum,
                            data.n, 0.0, ph.weights.lambda_c2, nullptr, &grad_c_g)
              : eval_loss_c(result.kernel, result.filter, data.x_mean_spec, bv.y_sum,
                            x_sampler.batch_size(), 0.0, ph.weights.lambda_c2, nullptr,
                            &grad_c_g);
      for (std::size_t i = 0; i < grad_b_g.size(); ++i) grad_b_g[i] += grad_c_g[i];
      opt_f.step(gains_as_doubles(result.filter), grad_as_doubles(grad_b_g));
      curve.push_back({it, 0.0, b, c, b + c});
    }
  }

  result.report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return result;
}

TrainResult supervised_baseline(std::span<const Image> originals, const Kernel& k_true,
                                const EcallConfig& cfg, Rng& rng) {
  if (originals.empty()) throw EmptyCollection();
  const auto t0 = std::chrono::steady_clock::now();
  const int n = static_cast<int>(originals.size());
  const Image& probe = originals.front();
  const int channels = probe.channels(), h = probe.height(), w = probe.width();
  const std::size_t plane = static_cast<std::size_t>(h) * w;

  // Paired data y_i = k_true * x_i + d_i from per-item derived seeds.
  const std::uint64_t pair_seed = rng();
  std::vector<Spectrum> x_spec(n), y_spec(n);
#pragma omp parallel for schedule(static)
  for (int i = 0; i < n; ++i) {
    Rng item_rng(mix_seed(pair_seed, static_cast<std::uint64_t>(i)));
    x_spec[i] = fft2(originals[i]);
    y_spec[i] = fft2(blur_and_noise(originals[i], k_true, cfg.noise_frac, item_rng).first);
  }

  // Sufficient statistics of the quadratic kernel-fit term.
  std::vector<double> sxx(static_cast<std::size_t>(channels) * plane, 0.0);
  std::vector<double> syy(sxx.size(), 0.0);
  std::vector<complexd> sxy(sxx.size(), complexd{});
  for (int i = 0; i < n; ++i) {
    for (std::size_t b = 0; b < sxx.size(); ++b) {
      sxx[b] += std::norm(x_spec[i].data()[b]);
      syy[b] += std::norm(y_spec[i].data()[b]);
      sxy[b] += x_spec[i].data()[b] * std::conj(y_spec[i].data()[b]);
    }
  }

  TrainResult result;
  result.report.config_json = cfg.to_json();
  result.report.phase_curves.resize(1);
  result.kernel = Kernel::delta(cfg.kernel_size);
  result.filter = SpectralFilter::identity(h, w);

  AdamW opt_k(result.kernel.weights().size(),
              AdamWConfig{.learning_rate = cfg.supervised_kernel_lr});
  AdamW opt_f(2 * result.filter.gains.size(),
              AdamWConfig{.learning_rate = cfg.supervised_filter_lr});
  EpochSampler sampler(n, cfg.supervised_batch);

  const double kappa = 1.0 / (static_cast<double>(n) * plane);
  auto& curve = result.report.phase_curves[0];
  curve.reserve(cfg.supervised_iterations);

  for (int it = 0; it < cfg.supervised_iterations; ++it) {
    // kernel fit from the sufficient statistics
    const std::vector<complexd> kg = kernel_spectrum_grid(result.kernel, h, w);
    std::vector<complexd> m_grid(plane, complexd{});
    double fit = 0;
    for (int c = 0; c < channels; ++c) {
      for (std::size_t b = 0; b < plane; ++b) {
        const std::size_t idx = static_cast<std::size_t>(c) * plane + b;
        const complexd kb = kg[b];
        fit += kappa * (std::norm(kb) * sxx[idx] - 2.0 * (kb * sxy[idx]).real() + syy[idx]);
        m_grid[b] += 2.0 * kappa * (std::conj(kb) * sxx[idx] - sxy[idx]);
      }
    }
    Kernel grad_k = kernel_taps_from_bin_gradient(std::move(m_grid), result.kernel.size(), h, w);
    const double reg = cfg.supervised_lambda_reg * result.kernel.squared_norm();
    for (std::size_t t = 0; t < grad_k.weights().size(); ++t) {
      grad_k.weights()[t] += 2.0 * cfg.supervised_lambda_reg * result.kernel.weights()[t];
    }

    // filter fit on a mini-batch of pairs
    const std::span<const int> batch = sampler.next(rng);
    const double kappa2 = 1.0 / (static_cast<double>(batch.size()) * plane);
    std::vector<complexd> grad_g(plane, complexd{});
    std::vector<double> bin_value(plane, 0.0);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t bi = 0; bi < static_cast<std::ptrdiff_t>(plane); ++bi) {
      const std::size_t b = static_cast<std::size_t>(bi);
      const complexd gb = result.filter.gains[b];
      double v = 0;
      complexd gg{};
      for (int p : batch) {
        for (int c = 0; c < channels; ++c) {
          const std::size_t idx = static_cast<std::size_t>(c) * plane + b;
          const complexd yv = y_spec[p].data()[idx];
          const complexd r = x_spec[p].data()[idx] - gb * yv;
          v += kappa2 * std::norm(r);
          gg += -2.0 * kappa2 * r * std::conj(yv);
        }
      }
      bin_value[b] = v;
      grad_g[b] = gg;
    }
    double rec = 0;
    for (double v : bin_value) rec += v;

    opt_k.step(result.kernel.weights(), grad_k.weights());
    opt_f.step(gains_as_doubles(result.filter), grad_as_doubles(grad_g));
    curve.push_back({it, fit, rec, reg, fit + rec + reg});
  }

  result.report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return result;
}

void save_loss_curves(const TrainReport& report, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write loss curves: " + path);
  out << "phase,iteration,loss_a,loss_b,loss_c,total\n";
  char line[256];
  for (std::size_t p = 0; p < report.phase_curves.size(); ++p) {
    for (const LossRow& row : report.phase_curves[p]) {
      std::snprintf(line, sizeof(line), "%zu,%d,%.17g,%.17g,%.17g,%.17g\n", p + 1, row.iteration,
                    row.loss_a, row.loss_b, row.loss_c, row.total);
      out << line;
    }
  }
}

}  // namespace ecall
