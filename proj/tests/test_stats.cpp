#include <doctest.h>

#include <cmath>
#include <cstdio>

#include "ecall/datagen.hpp"
#include "ecall/fft.hpp"
#include "ecall/stats.hpp"

using namespace ecall;

namespace {

Image random_image(int c, int h, int w, Rng& rng) {
  Image img(c, h, w);
  for (auto& v : img.data()) v = rand_unit(rng);
  return img;
}

Image rolled(const Image& img, int dy, int dx) {
  Image out(img.channels(), img.height(), img.width());
  for (int c = 0; c < img.channels(); ++c) {
    for (int y = 0; y < img.height(); ++y) {
      for (int x = 0; x < img.width(); ++x) {
        out.at(c, wrap_index(y + dy, img.height()), wrap_index(x + dx, img.width())) =
            img.at(c, y, x);
      }
    }
  }
  return out;
}

}  // namespace

TEST_CASE("a single accumulated image reproduces its own statistics") {
  Rng rng(11);
  const Image img = random_image(1, 8, 8, rng);
  ExpectationBundle b;
  accumulate(b, img);
  CHECK(b.count == 1);
  const Spectrum s = fft2(img);
  for (std::size_t i = 0; i < s.size(); ++i) {
    CHECK(std::abs(b.mean_spectrum.data()[i] - s.data()[i]) < 1e-12);
    CHECK(b.mean_abs_spectrum[i] == doctest::Approx(std::abs(s.data()[i])).epsilon(1e-12));
  }
  for (std::size_t i = 0; i < img.size(); ++i) CHECK(b.mean_image.data()[i] == img.data()[i]);
}

TEST_CASE("x and -x cancel in the mean spectrum but not in the modulus mean") {
  Rng rng(12);
  const Image img = random_image(1, 8, 8, rng);
  Image neg(1, 8, 8);
  for (std::size_t i = 0; i < img.size(); ++i) neg.data()[i] = -img.data()[i];
  ExpectationBundle b;
  accumulate(b, img);
  accumulate(b, neg);
  const Spectrum s = fft2(img);
  for (std::size_t i = 0; i < s.size(); ++i) {
    CHECK(std::abs(b.mean_spectrum.data()[i]) < 1e-10);
    CHECK(b.mean_abs_spectrum[i] == doctest::Approx(std::abs(s.data()[i])).epsilon(1e-10));
  }
}

TEST_CASE("running means match a sum-then-divide oracle") {
  Rng rng(13);
  std::vector<Image> images;
  for (int i = 0; i < 100; ++i) images.push_back(random_image(1, 16, 16, rng));
  ExpectationBundle b;
  for (const Image& img : images) accumulate(b, img);

  Spectrum sum(1, 16, 16);
  std::vector<double> abs_sum(sum.size(), 0.0);
  for (const Image& img : images) {
    const Spectrum s = fft2(img);
    for (std::size_t i = 0; i < s.size(); ++i) {
      sum.data()[i] += s.data()[i];
      abs_sum[i] += std::abs(s.data()[i]);
    }
  }
  for (std::size_t i = 0; i < sum.size(); ++i) {
    const complexd direct = sum.data()[i] / 100.0;
    CHECK(std::abs(b.mean_spectrum.data()[i] - direct) <
          1e-12 * std::max(1.0, std::abs(direct)));
    CHECK(b.mean_abs_spectrum[i] ==
          doctest::Approx(abs_sum[i] / 100.0).epsilon(1e-12));
  }
}

TEST_CASE("bundle_of equals folding accumulate") {
  Rng rng(14);
  std::vector<Image> images;
  for (int i = 0; i < 17; ++i) images.push_back(random_image(2, 8, 8, rng));
  const ExpectationBundle fast = bundle_of(images);
  ExpectationBundle fold;
  for (const Image& img : images) accumulate(fold, img);
  CHECK(fast.count == fold.count);
  for (std::size_t i = 0; i < fast.mean_spectrum.size(); ++i) {
    CHECK(std::abs(fast.mean_spectrum.data()[i] - fold.mean_spectrum.data()[i]) < 1e-10);
  }
}

TEST_CASE("equal-count merge matches the concatenated bundle") {
  Rng rng(15);
  std::vector<Image> left, right, all;
  for (int i = 0; i < 8; ++i) {
    left.push_back(random_image(1, 8, 8, rng));
    right.push_back(random_image(1, 8, 8, rng));
  }
  all = left;
  all.insert(all.end(), right.begin(), right.end());
  const ExpectationBundle m = merge(bundle_of(left), bundle_of(right));
  const ExpectationBundle whole = bundle_of(all);
  CHECK(m.count == whole.count);
  for (std::size_t i = 0; i < m.mean_spectrum.size(); ++i) {
    CHECK(std::abs(m.mean_spectrum.data()[i] - whole.mean_spectrum.data()[i]) < 1e-12);
  }
}

TEST_CASE("the Jensen inequality holds after every accumulate") {
  Rng rng(16);
  ExpectationBundle b;
  for (int i = 0; i < 10; ++i) {
    accumulate(b, random_image(1, 12, 12, rng));
    CHECK(jensen_violation(b) <= 1e-9);
  }
}

TEST_CASE("mean_spectrum is linear in a global scale") {
  Rng rng(17);
  std::vector<Image> images, scaled;
  for (int i = 0; i < 5; ++i) {
    images.push_back(random_image(1, 8, 8, rng));
    Image s(1, 8, 8);
    for (std::size_t t = 0; t < s.size(); ++t) s.data()[t] = 2.5 * images.back().data()[t];
    scaled.push_back(std::move(s));
  }
  const ExpectationBundle a = bundle_of(images), b = bundle_of(scaled);
  for (std::size_t i = 0; i < a.mean_spectrum.size(); ++i) {
    CHECK(std::abs(b.mean_spectrum.data()[i] - 2.5 * a.mean_spectrum.data()[i]) < 1e-9);
  }
}

TEST_CASE("mean_abs_spectrum is shift-invariant while mean_spectrum is not") {
  Rng rng(18);
  std::vector<Image> images, shifted;
  for (int i = 0; i < 6; ++i) {
    images.push_back(random_image(1, 8, 8, rng));
    shifted.push_back(rolled(images.back(), 1 + i % 3, 2 + i % 2));
  }
  const ExpectationBundle a = bundle_of(images), b = bundle_of(shifted);
  double abs_diff = 0, spec_diff = 0;
  for (std::size_t i = 0; i < a.mean_spectrum.size(); ++i) {
    abs_diff = std::max(abs_diff, std::abs(a.mean_abs_spectrum[i] - b.mean_abs_spectrum[i]));
    spec_diff = std::max(spec_diff,
                         std::abs(a.mean_spectrum.data()[i] - b.mean_spectrum.data()[i]));
  }
  CHECK(abs_diff < 1e-9);
  CHECK(spec_diff > 1e-3);
}

TEST_CASE("pure-noise collections concentrate around a zero mean spectrum") {
  Rng rng(19);
  const int n = 1000, side = 16;
  const double sigma = 0.1;
  std::vector<Image> noises;
  noises.reserve(n);
  for (int i = 0; i < n; ++i) {
    Image img(1, side, side);
    for (auto& v : img.data()) v = sigma * rand_normal(rng);
    noises.push_back(std::move(img));
  }
  const ExpectationBundle b = bundle_of(noises);
  const double bound = 5.0 * sigma * std::sqrt(static_cast<double>(side * side) / n);
  for (const complexd& z : b.mean_spectrum.data()) CHECK(std::abs(z) < bound);
}

TEST_CASE("noiseless paired observations satisfy the spectral product identity") {
  Rng rng(20);
  const Kernel k = gaussian_kernel(1.0, 5);
  std::vector<Image> xs = synthetic_textures(50, 16, 16, rng);
  std::vector<Image> ys;
  ys.reserve(xs.size());
  for (const Image& x : xs) ys.push_back(convolve_periodic(x, k));
  const ExpectationBundle xb = bundle_of(xs), yb = bundle_of(ys);
  const Spectrum ks = kernel_spectrum(k, 16, 16);
  double scale = 0;
  for (const auto& z : yb.mean_spectrum.data()) scale = std::max(scale, std::abs(z));
  for (std::size_t i = 0; i < xb.mean_spectrum.size(); ++i) {
    const complexd expect = ks.data()[i] * xb.mean_spectrum.data()[i];
    CHECK(std::abs(yb.mean_spectrum.data()[i] - expect) < 1e-9 * std::max(1.0, scale));
  }
}

TEST_CASE("accumulate rejects mismatched shapes and empty collections fail") {
  Rng rng(21);
  ExpectationBundle b;
  accumulate(b, random_image(1, 8, 8, rng));
  const Image wrong = random_image(1, 4, 4, rng);
  CHECK_THROWS_AS(accumulate(b, wrong), DimensionMismatch);
  CHECK_THROWS_AS(bundle_of({}), EmptyCollection);
}

TEST_CASE("bundles serialize with their sidecar") {
  Rng rng(22);
  std::vector<Image> images;
  for (int i = 0; i < 4; ++i) images.push_back(random_image(1, 8, 8, rng));
  const ExpectationBundle b = bundle_of(images);
  save_bundle(b, "/tmp/ecall_stats_bundle", "manifest:deadbeef");
  const ExpectationBundle back = load_bundle("/tmp/ecall_stats_bundle");
  CHECK(back.count == b.count);
  for (std::size_t i = 0; i < b.mean_spectrum.size(); ++i) {
    CHECK(back.mean_spectrum.data()[i] == b.mean_spectrum.data()[i]);
    CHECK(back.mean_abs_spectrum[i] == b.mean_abs_spectrum[i]);
  }
  for (const char* suffix : {".mean_spectrum.bin", ".mean_abs.bin", ".mean_image.bin", ".json"}) {
    std::remove((std::string("/tmp/ecall_stats_bundle") + suffix).c_str());
  }
}
