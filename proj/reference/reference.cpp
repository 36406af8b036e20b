#include "reference.hpp"

#include <cmath>

namespace ecall::ref {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

}  // namespace

Spectrum dft2(const Image& img) {
  const int h = img.height(), w = img.width();
  Spectrum out(img.channels(), h, w);
  for (int c = 0; c < img.channels(); ++c) {
    for (int u = 0; u < h; ++u) {
      for (int v = 0; v < w; ++v) {
        complexd acc{};
        for (int y = 0; y < h; ++y) {
          for (int x = 0; x < w; ++x) {
            const double ang =
                -kTwoPi * (static_cast<double>(u) * y / h + static_cast<double>(v) * x / w);
            acc += img.at(c, y, x) * complexd(std::cos(ang), std::sin(ang));
          }
        }
        out.at(c, u, v) = acc;
      }
    }
  }
  return out;
}

Image idft2(const Spectrum& spec) {
  const int h = spec.height(), w = spec.width();
  Image out(spec.channels(), h, w);
  const double scale = 1.0 / (static_cast<double>(h) * w);
  for (int c = 0; c < spec.channels(); ++c) {
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        complexd acc{};
        for (int u = 0; u < h; ++u) {
          for (int v = 0; v < w; ++v) {
            const double ang =
                kTwoPi * (static_cast<double>(u) * y / h + static_cast<double>(v) * x / w);
            acc += spec.at(c, u, v) * complexd(std::cos(ang), std::sin(ang));
          }
        }
        out.at(c, y, x) = (acc * scale).real();
      }
    }
  }
  return out;
}

Image convolve_wrap(const Image& img, const Kernel& k) {
  if (k.size() > img.height() || k.size() > img.width()) throw KernelLargerThanImage();
  const int h = img.height(), w = img.width(), s = k.size(), c0 = k.center();
  Image out(img.channels(), h, w);
  for (int c = 0; c < img.channels(); ++c) {
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        double acc = 0;
        for (int i = 0; i < s; ++i) {
          for (int j = 0; j < s; ++j) {
            const int yy = wrap_index(y - (i - c0), h);
            const int xx = wrap_index(x - (j - c0), w);
            acc += k.at(i, j) * img.at(c, yy, xx);
          }
        }
        out.at(c, y, x) = acc;
      }
    }
  }
  return out;
}

Image apply_filter(const SpectralFilter& f, const Image& img) {
  Spectrum spec = dft2(img);
  for (int c = 0; c < spec.channels(); ++c) {
    for (int u = 0; u < f.height; ++u) {
      for (int v = 0; v < f.width; ++v) spec.at(c, u, v) *= f.at(u, v);
    }
  }
  return idft2(spec);
}

double loss_a(const Kernel& k, std::span<const Image> x_batch, std::span<const Image> noise_batch,
              const ExpectationBundle& y_bundle, const FrequencyMask& mask,
              const EcallWeights& weights) {
  const int n = static_cast<int>(x_batch.size());
  const int channels = y_bundle.channels(), h = y_bundle.height(), w = y_bundle.width();

  // model-side sums over the batch
  Spectrum model_sum(channels, h, w);
  std::vector<double> model_abs_sum(model_sum.size(), 0.0);
  for (int i = 0; i < n; ++i) {
    Image blurred = convolve_wrap(x_batch[i], k);
    if (!noise_batch.empty()) {
      for (std::size_t t = 0; t < blurred.size(); ++t) {
        blurred.data()[t] += noise_batch[i].data()[t];
      }
    }
    const Spectrum f = dft2(blurred);
    for (std::size_t t = 0; t < f.size(); ++t) {
      model_sum.data()[t] += f.data()[t];
      model_abs_sum[t] += std::abs(f.data()[t]);
    }
  }

  double term1 = 0, term2 = 0;
  for (std::size_t t = 0; t < model_sum.size(); ++t) {
    if (!mask.keep[t]) continue;
    const complexd y_side = static_cast<double>(n) * y_bundle.mean_spectrum.data()[t];
    term1 += std::abs(y_side - model_sum.data()[t]);
    const double y_abs_side = static_cast<double>(n) * y_bundle.mean_abs_spectrum[t];
    term2 += std::abs(y_abs_side - model_abs_sum[t]);
  }
  return weights.lambda_a1 / n * term1 + weights.lambda_a2 / n * term2;
}

namespace {

double squared_l2(const Image& a, const Image& b) {
  double acc = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a.data()[i] - b.data()[i];
    acc += d * d;
  }
  return acc;
}

}  // namespace

double loss_b(const Kernel& k, const SpectralFilter& f, std::span<const Image> x_batch,
              std::span<const Image> noise_batch, std::span<const Image> y_batch,
              const EcallWeights& weights) {
  double term1 = 0;
  for (const Image& y : y_batch) {
    term1 += squared_l2(y, convolve_wrap(apply_filter(f, y), k));
  }
  double term2 = 0;
  for (std::size_t i = 0; i < x_batch.size(); ++i) {
    Image blurred = convolve_wrap(x_batch[i], k);
    if (!noise_batch.empty()) {
      for (std::size_t t = 0; t < blurred.size(); ++t) {
        blurred.data()[t] += noise_batch[i].data()[t];
      }
    }
    term2 += squared_l2(x_batch[i], apply_filter(f, blurred));
  }
  double value = 0;
  if (!y_batch.empty()) value += weights.lambda_b1 / static_cast<double>(y_batch.size()) * term1;
  if (!x_batch.empty()) value += weights.lambda_b2 / static_cast<double>(x_batch.size()) * term2;
  return value;
}

double loss_c(const Kernel& k, const SpectralFilter& f, const Image& x_mean,
              std::span<const Image> y_batch, const EcallWeights& weights) {
  const int n = static_cast<int>(y_batch.size());
  Image recon_sum(x_mean.channels(), x_mean.height(), x_mean.width());
  for (const Image& y : y_batch) {
    const Image r = apply_filter(f, y);
    for (std::size_t t = 0; t < recon_sum.size(); ++t) recon_sum.data()[t] += r.data()[t];
  }
  double diff = 0;
  for (std::size_t t = 0; t < recon_sum.size(); ++t) {
    const double d = n * x_mean.data()[t] - recon_sum.data()[t];
    diff += d * d;
  }
  return weights.lambda_c1 * k.squared_norm() + weights.lambda_c2 / n * diff;
}

Spectrum mean_spectrum_direct(std::span<const Image> images) {
  Spectrum sum = dft2(images[0]);
  for (std::size_t i = 1; i < images.size(); ++i) {
    const Spectrum s = dft2(images[i]);
    for (std::size_t t = 0; t < sum.size(); ++t) sum.data()[t] += s.data()[t];
  }
  const double inv = 1.0 / static_cast<double>(images.size());
  for (auto& z : sum.data()) z *= inv;
  return sum;
}

double psnr_direct(const Image& a, const Image& b, double peak) {
  double mse = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a.data()[i] - b.data()[i];
    mse += d * d;
  }
  mse /= static_cast<double>(a.size());
  return 10.0 * std::log10(peak * peak / mse);
}

double ssim_naive(const Image& a, const Image& b, double peak) {
  const int win = 11;
  const double sigma = 1.5;
  const int h = a.height(), w = a.width();
  const double c1 = (0.01 * peak) * (0.01 * peak);
  const double c2 = (0.03 * peak) * (0.03 * peak);

  std::vector<double> weight(static_cast<std::size_t>(win) * win);
  double wsum = 0;
  for (int i = 0; i < win; ++i) {
    for (int j = 0; j < win; ++j) {
      const double dy = i - win / 2, dx = j - win / 2;
      weight[static_cast<std::size_t>(i) * win + j] =
          std::exp(-(dy * dy + dx * dx) / (2.0 * sigma * sigma));
      wsum += weight[static_cast<std::size_t>(i) * win + j];
    }
  }
  for (auto& v : weight) v /= wsum;

  double total = 0;
  for (int c = 0; c < a.channels(); ++c) {
    double acc = 0;
    int count = 0;
    for (int y = 0; y + win <= h; ++y) {
      for (int x = 0; x + win <= w; ++x) {
        double ma = 0, mb = 0, maa = 0, mbb = 0, mab = 0;
        for (int i = 0; i < win; ++i) {
          for (int j = 0; j < win; ++j) {
            const double wv = weight[static_cast<std::size_t>(i) * win + j];
            const double va = a.at(c, y + i, x + j);
            const double vb = b.at(c, y + i, x + j);
            ma += wv * va;
            mb += wv * vb;
            maa += wv * va * va;
            mbb += wv * vb * vb;
            mab += wv * va * vb;
          }
        }
        const double var_a = maa - ma * ma;
        const double var_b = mbb - mb * mb;
        const double cov = mab - ma * mb;
        acc += ((2 * ma * mb + c1) * (2 * cov + c2)) /
               ((ma * ma + mb * mb + c1) * (var_a + var_b + c2));
        ++count;
      }
    }
    total += acc / count;
  }
  return total / a.channels();
}

}  // namespace ecall::ref
