#include "ecall/datagen.hpp"

#include <algorithm>
#include <cmath>

#include "ecall/fft.hpp"

namespace ecall {

Kernel gaussian_kernel(double std_dev, int size) {
  if (!(std_dev > 0)) throw InvalidStd();
  if (size <= 0 || size % 2 == 0) throw EvenSize();
  Kernel k(size);
  const int c = k.center();
  double sum = 0;
  for (int i = 0; i < size; ++i) {
    for (int j = 0; j < size; ++j) {
      const double dy = i - c, dx = j - c;
      const double v = std::exp(-(dy * dy + dx * dx) / (2.0 * std_dev * std_dev));
      k.at(i, j) = v;
      sum += v;
    }
  }
  for (auto& w : k.weights()) w /= sum;
  return k;
}

std::pair<Image, Image> blur_and_noise(const Image& img, const Kernel& k, double noise_frac,
                                       Rng& rng) {
  if (noise_frac < 0) throw ConfigError("noise_frac must be nonnegative");
  Image observation = convolve_periodic(img, k);
  Image noise(img.channels(), img.height(), img.width());
  if (noise_frac > 0) {
    const double sigma = noise_frac * img.max_value();
    for (std::size_t i = 0; i < noise.size(); ++i) {
      noise.data()[i] = sigma * rand_normal(rng);
      observation.data()[i] += noise.data()[i];
    }
  }
  return {std::move(observation), std::move(noise)};
}

namespace {

Image sample_noise_field(int channels, int height, int width, double sigma, Rng& rng) {
  Image noise(channels, height, width);
  if (sigma > 0) {
    for (auto& v : noise.data()) v = sigma * rand_normal(rng);
  }
  return noise;
}

}  // namespace

DatasetSplits make_splits(std::span<const Image> source_images, int n, int test_n,
                          const Kernel& k_true, double noise_frac, Rng& rng) {
  if (n <= 0 || test_n < 0) throw ConfigError("split sizes must be positive");
  if (source_images.size() < static_cast<std::size_t>(2 * n + test_n)) {
    throw InsufficientImages();
  }
  std::vector<int> order(source_images.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  shuffle_in_place(order, rng);

  DatasetSplits splits;
  const std::uint64_t item_seed = rng();

  splits.originals.reserve(n);
  for (int i = 0; i < n; ++i) {
    splits.originals.push_back(source_images[order[i]]);
    splits.originals_src.push_back(order[i]);
  }
  splits.observations.reserve(n);
  for (int i = 0; i < n; ++i) {
    const int src = order[n + i];
    Rng item_rng(mix_seed(item_seed, (1ULL << 32) | static_cast<std::uint64_t>(i)));
    splits.observations.push_back(
        blur_and_noise(source_images[src], k_true, noise_frac, item_rng).first);
    splits.observations_src.push_back(src);
  }
  splits.noises.reserve(n);
  const Image& probe = source_images[order[0]];
  for (int i = 0; i < n; ++i) {
    Rng item_rng(mix_seed(item_seed, (2ULL << 32) | static_cast<std::uint64_t>(i)));
    splits.noises.push_back(sample_noise_field(probe.channels(), probe.height(), probe.width(),
                                               noise_frac * 1.0, item_rng));
  }
  splits.test.reserve(test_n);
  for (int i = 0; i < test_n; ++i) {
    const int src = order[2 * n + i];
    Rng item_rng(mix_seed(item_seed, (3ULL << 32) | static_cast<std::uint64_t>(i)));
    Image obs = blur_and_noise(source_images[src], k_true, noise_frac, item_rng).first;
    splits.test.emplace_back(source_images[src], std::move(obs));
    splits.test_src.push_back(src);
  }
  return splits;
}

DatasetSplits make_splits(std::span<const Image> source_images, int n, const Kernel& k_true,
                          double noise_frac, Rng& rng) {
  return make_splits(source_images, n, n, k_true, noise_frac, rng);
}

namespace {

// Fixed broadband pattern shared by every texture: a deterministic white
// field in [-0.5, 0.5]. Part of the texture distribution, independent of the
// user seed.
Image broadband_pattern(int height, int width) {
  Rng rng(0x5eedba5ef1e1dULL);
  Image p(1, height, width);
  for (auto& v : p.data()) v = rand_unit(rng) - 0.5;
  return p;
}

void add_ellipse(Image& img, Rng& rng) {
  const int h = img.height(), w = img.width();
  const double cy = rand_range(rng, 0.1, 0.9) * h;
  const double cx = rand_range(rng, 0.1, 0.9) * w;
  const double ry = rand_range(rng, 0.08, 0.3) * h;
  const double rx = rand_range(rng, 0.08, 0.3) * w;
  const double amp = rand_range(rng, -0.3, 0.3);
  const double edge = rand_range(rng, 0.5, 2.5);  // pixels
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double dy = (y - cy) / ry, dx = (x - cx) / rx;
      const double d = std::sqrt(dy * dy + dx * dx);
      // signed distance to the unit ellipse, roughly in pixels
      const double px = (d - 1.0) * std::min(ry, rx);
      const double t = 1.0 / (1.0 + std::exp(px / edge * 4.0));
      img.at(0, y, x) += amp * t;
    }
  }
}

Image one_texture(int height, int width, const Image& pattern, Rng& rng) {
  Image img(1, height, width);
  const double base = rand_range(rng, 0.35, 0.65);
  for (auto& v : img.data()) v = base;

  // linear gradient
  const double theta = rand_range(rng, 0.0, 6.283185307179586);
  const double ga = rand_range(rng, 0.0, 0.3);
  const double gy = std::sin(theta), gx = std::cos(theta);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      img.at(0, y, x) += ga * ((gy * y / height + gx * x / width) - 0.5 * (gy + gx));
    }
  }

  const int n_ellipses = 1 + static_cast<int>(rand_below(rng, 3));
  for (int e = 0; e < n_ellipses; ++e) add_ellipse(img, rng);

  // smoothed noise
  {
    const double amp = rand_range(rng, 0.05, 0.18);
    const double sigma = rand_range(rng, 0.6, 2.5);
    Image noise(1, height, width);
    for (auto& v : noise.data()) v = rand_normal(rng);
    const int ks = std::min(9, std::min(height, width) % 2 == 0 ? std::min(height, width) - 1
                                                                : std::min(height, width));
    Image smooth = convolve_periodic(noise, gaussian_kernel(sigma, ks));
    // normalize to unit RMS before scaling
    double rms = 0;
    for (double v : smooth.data()) rms += v * v;
    rms = std::sqrt(rms / smooth.size());
    if (rms > 0) {
      for (std::size_t i = 0; i < img.size(); ++i) img.data()[i] += amp * smooth.data()[i] / rms;
    }
  }

  // fixed broadband component
  const double alpha = rand_range(rng, 0.12, 0.3);
  for (std::size_t i = 0; i < img.size(); ++i) img.data()[i] += alpha * pattern.data()[i];

  for (auto& v : img.data()) v = std::clamp(v, 0.0, 1.0);
  return img;
}

}  // namespace

std::vector<Image> synthetic_textures(int count, int height, int width, Rng& rng) {
  if (count < 1) throw ConfigError("texture count must be >= 1");
  const Image pattern = broadband_pattern(height, width);
  const std::uint64_t base_seed = rng();
  std::vector<Image> out(count);
#pragma omp parallel for schedule(static)
  for (int i = 0; i < count; ++i) {
    Rng item_rng(mix_seed(base_seed, static_cast<std::uint64_t>(i)));
    out[i] = one_texture(height, width, pattern, item_rng);
  }
  return out;
}

}  // namespace ecall
