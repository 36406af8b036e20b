#include "ecall/metrics.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace ecall {

namespace {

// Zero-pad a kernel centrally to the target odd size.
Kernel pad_to(const Kernel& k, int size) {
  if (k.size() == size) return k;
  Kernel out(size);
  const int off = (size - k.size()) / 2;
  for (int i = 0; i < k.size(); ++i) {
    for (int j = 0; j < k.size(); ++j) out.at(i + off, j + off) = k.at(i, j);
  }
  return out;
}

double norm2(const Kernel& k) { return std::sqrt(k.squared_norm()); }

}  // namespace

double l2err(const Kernel& k_est, const Kernel& k_true) {
  const int size = std::max(k_est.size(), k_true.size());
  const Kernel a = pad_to(k_est, size);
  const Kernel b = pad_to(k_true, size);
  const double nb = norm2(b);
  if (nb == 0) throw ZeroTrueKernel();
  double diff = 0;
  for (std::size_t i = 0; i < a.weights().size(); ++i) {
    const double d = a.weights()[i] - b.weights()[i];
    diff += d * d;
  }
  return std::sqrt(diff) / nb;
}

double mnc(const Kernel& k_est, const Kernel& k_true, bool use_convolution) {
  const double na = norm2(k_est), nb = norm2(k_true);
  if (na == 0 || nb == 0) throw ZeroKernel();
  const int s1 = k_est.size(), s2 = k_true.size();
  double best = -std::numeric_limits<double>::infinity();
  for (int dy = -(s2 - 1); dy <= s1 - 1; ++dy) {
    for (int dx = -(s2 - 1); dx <= s1 - 1; ++dx) {
      double acc = 0;
      for (int i = 0; i < s2; ++i) {
        const int y = dy + i;
        if (y < 0 || y >= s1) continue;
        for (int j = 0; j < s2; ++j) {
          const int x = dx + j;
          if (x < 0 || x >= s1) continue;
          const double t = use_convolution ? k_true.at(s2 - 1 - i, s2 - 1 - j) : k_true.at(i, j);
          acc += k_est.at(y, x) * t;
        }
      }
      best = std::max(best, acc);
    }
  }
  return best / (na * nb);
}

double psnr(const Image& a, const Image& b, double peak) {
  if (!a.same_shape(b)) throw DimensionMismatch();
  if (!(peak > 0)) throw ConfigError("psnr peak must be positive");
  double mse = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a.data()[i] - b.data()[i];
    mse += d * d;
  }
  mse /= static_cast<double>(a.size());
  if (mse == 0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(peak * peak / mse);
}

namespace {

constexpr int kSsimWindow = 11;
constexpr double kSsimSigma = 1.5;

std::vector<double> ssim_window_1d() {
  std::vector<double> w(kSsimWindow);
  const int c = kSsimWindow / 2;
  double sum = 0;
  for (int i = 0; i < kSsimWindow; ++i) {
    w[i] = std::exp(-(i - c) * (i - c) / (2.0 * kSsimSigma * kSsimSigma));
    sum += w[i];
  }
  for (auto& v : w) v /= sum;
  return w;
}

// Separable valid-mode convolution of a single channel with the 1-D window in
// both directions. Input h*w, output (h-10)*(w-10).
std::vector<double> window_filter(const double* src, int h, int w, const std::vector<double>& win) {
  const int oh = h - kSsimWindow + 1, ow = w - kSsimWindow + 1;
  std::vector<double> rows(static_cast<std::size_t>(h) * ow);
#pragma omp parallel for schedule(static)
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < ow; ++x) {
      double acc = 0;
      for (int t = 0; t < kSsimWindow; ++t) acc += win[t] * src[static_cast<std::size_t>(y) * w + x + t];
      rows[static_cast<std::size_t>(y) * ow + x] = acc;
    }
  }
  std::vector<double> out(static_cast<std::size_t>(oh) * ow);
#pragma omp parallel for schedule(static)
  for (int y = 0; y < oh; ++y) {
    for (int x = 0; x < ow; ++x) {
      double acc = 0;
      for (int t = 0; t < kSsimWindow; ++t) acc += win[t] * rows[static_cast<std::size_t>(y + t) * ow + x];
      out[static_cast<std::size_t>(y) * ow + x] = acc;
    }
  }
  return out;
}

}  // namespace

double ssim(const Image& a, const Image& b, double peak) {
  if (!a.same_shape(b)) throw DimensionMismatch();
  if (!(peak > 0)) throw ConfigError("ssim peak must be positive");
  const int h = a.height(), w = a.width();
  if (h < kSsimWindow || w < kSsimWindow) throw ImageTooSmall();
  const double c1 = (0.01 * peak) * (0.01 * peak);
  const double c2 = (0.03 * peak) * (0.03 * peak);
  const std::vector<double> win = ssim_window_1d();
  const std::size_t plane = static_cast<std::size_t>(h) * w;

  double total = 0;
  for (int c = 0; c < a.channels(); ++c) {
    const double* pa = a.channel(c);
    const double* pb = b.channel(c);
    std::vector<double> aa(plane), bb(plane), ab(plane);
    for (std::size_t i = 0; i < plane; ++i) {
      aa[i] = pa[i] * pa[i];
      bb[i] = pb[i] * pb[i];
      ab[i] = pa[i] * pb[i];
    }
    const auto mu_a = window_filter(pa, h, w, win);
    const auto mu_b = window_filter(pb, h, w, win);
    const auto m_aa = window_filter(aa.data(), h, w, win);
    const auto m_bb = window_filter(bb.data(), h, w, win);
    const auto m_ab = window_filter(ab.data(), h, w, win);
    double acc = 0;
    for (std::size_t i = 0; i < mu_a.size(); ++i) {
      const double va = m_aa[i] - mu_a[i] * mu_a[i];
      const double vb = m_bb[i] - mu_b[i] * mu_b[i];
      const double cov = m_ab[i] - mu_a[i] * mu_b[i];
      const double num = (2.0 * mu_a[i] * mu_b[i] + c1) * (2.0 * cov + c2);
      const double den = (mu_a[i] * mu_a[i] + mu_b[i] * mu_b[i] + c1) * (va + vb + c2);
      acc += num / den;
    }
    total += acc / static_cast<double>(mu_a.size());
  }
  return total / a.channels();
}

KernelScore score_kernel(const Kernel& k_est, const Kernel& k_true) {
  return {l2err(k_est, k_true), mnc(k_est, k_true)};
}

ImageScore score_image(const Image& reconstruction, const Image& original, double peak) {
  return {psnr(reconstruction, original, peak), ssim(reconstruction, original, peak)};
}

}  // namespace ecall
