#include <doctest.h>

#include <cmath>

#include "ecall/fft.hpp"
#include "ecall/rng.hpp"
#include "reference.hpp"

using namespace ecall;

namespace {

Image random_image(int c, int h, int w, Rng& rng, double lo = 0.0, double hi = 1.0) {
  Image img(c, h, w);
  for (auto& v : img.data()) v = rand_range(rng, lo, hi);
  return img;
}

Kernel random_kernel(int size, Rng& rng) {
  Kernel k(size);
  for (auto& v : k.weights()) v = rand_range(rng, -1.0, 1.0);
  return k;
}

double max_spec_diff(const Spectrum& a, const Spectrum& b) {
  double m = 0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
  return m;
}

double max_image_diff(const Image& a, const Image& b) {
  double m = 0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
  return m;
}

double spec_scale(const Spectrum& s) {
  double m = 0;
  for (const auto& z : s.data()) m = std::max(m, std::abs(z));
  return m;
}

}  // namespace

TEST_CASE("fft2 of a constant image concentrates at DC") {
  Image img(1, 4, 4);
  for (auto& v : img.data()) v = 1.0;
  const Spectrum s = fft2(img);
  CHECK(s.at(0, 0, 0).real() == doctest::Approx(16.0).epsilon(1e-12));
  CHECK(s.at(0, 0, 0).imag() == doctest::Approx(0.0).epsilon(1e-12));
  for (int u = 0; u < 4; ++u) {
    for (int v = 0; v < 4; ++v) {
      if (u == 0 && v == 0) continue;
      CHECK(std::abs(s.at(0, u, v)) < 1e-12);
    }
  }
}

TEST_CASE("fft2 of an impulse at the origin is flat") {
  Image img(1, 4, 4);
  img.at(0, 0, 0) = 1.0;
  const Spectrum s = fft2(img);
  for (int u = 0; u < 4; ++u) {
    for (int v = 0; v < 4; ++v) {
      CHECK(std::abs(s.at(0, u, v) - complexd(1.0, 0.0)) < 1e-12);
    }
  }
}

TEST_CASE("fft2 matches the naive double-sum DFT") {
  Rng rng(101);
  const Image img = random_image(1, 8, 8, rng);
  const Spectrum fast = fft2(img);
  const Spectrum naive = ref::dft2(img);
  CHECK(max_spec_diff(fast, naive) < 1e-10 * std::max(1.0, spec_scale(naive)));
}

TEST_CASE("fft2 handles non-square and non-power-of-two sizes") {
  Rng rng(102);
  for (auto [h, w] : {std::pair{12, 20}, std::pair{33, 17}, std::pair{7, 9}, std::pair{5, 16}}) {
    const Image img = random_image(1, h, w, rng);
    const Spectrum fast = fft2(img);
    const Spectrum naive = ref::dft2(img);
    CHECK(max_spec_diff(fast, naive) < 1e-10 * std::max(1.0, spec_scale(naive)));
    CHECK(max_image_diff(ifft2(fast), img) < 1e-10);
  }
}

TEST_CASE("ifft2 round-trips a random 16x16 image") {
  Rng rng(103);
  const Image img = random_image(3, 16, 16, rng);
  CHECK(max_image_diff(ifft2(fft2(img)), img) < 1e-10);
}

TEST_CASE("ifft2 of the zero spectrum is the zero image") {
  const Image out = ifft2(Spectrum(1, 6, 6));
  for (double v : out.data()) CHECK(v == 0.0);
}

TEST_CASE("ifft2 of the all-ones spectrum is a unit impulse at the origin") {
  Spectrum s(1, 4, 4);
  for (auto& z : s.data()) z = complexd(1.0, 0.0);
  const Image out = ifft2(s);
  CHECK(out.at(0, 0, 0) == doctest::Approx(1.0).epsilon(1e-12));
  double rest = 0;
  for (int y = 0; y < 4; ++y) {
    for (int x = 0; x < 4; ++x) {
      if (y || x) rest = std::max(rest, std::abs(out.at(0, y, x)));
    }
  }
  CHECK(rest < 1e-12);
}

TEST_CASE("ifft2 rejects spectra with non-negligible imaginary residue") {
  Rng rng(104);
  Spectrum s = fft2(random_image(1, 8, 8, rng));
  s.at(0, 1, 2) += complexd(0.0, 5.0);  // breaks conjugate symmetry
  CHECK_THROWS_AS(ifft2(s), NonNegligibleImaginaryPart);
}

TEST_CASE("kernel_spectrum of the delta kernel is identically one") {
  const Spectrum s = kernel_spectrum(Kernel::delta(5), 12, 8);
  for (const auto& z : s.data()) CHECK(std::abs(z - complexd(1.0, 0.0)) < 1e-12);
}

TEST_CASE("kernel_spectrum of a unit-sum kernel has DC gain one") {
  Kernel k(3);
  for (auto& v : k.weights()) v = 1.0 / 9.0;
  const Spectrum s = kernel_spectrum(k, 8, 8);
  CHECK(std::abs(s.at(0, 0, 0) - complexd(1.0, 0.0)) < 1e-12);
}

TEST_CASE("kernel_spectrum multiplication equals circular convolution") {
  Rng rng(105);
  const Image img = random_image(1, 8, 8, rng);
  const Kernel k = random_kernel(3, rng);
  Spectrum prod = fft2(img);
  const Spectrum ks = kernel_spectrum(k, 8, 8);
  for (std::size_t i = 0; i < prod.size(); ++i) prod.data()[i] *= ks.data()[i];
  CHECK(max_image_diff(ifft2(prod), convolve_periodic(img, k)) < 1e-10);
}

TEST_CASE("kernel_spectrum rejects kernels larger than the grid") {
  CHECK_THROWS_AS(kernel_spectrum(Kernel::delta(9), 8, 16), KernelLargerThanImage);
  CHECK_THROWS_AS(convolve_periodic(Image(1, 4, 4), Kernel::delta(5)), KernelLargerThanImage);
}

TEST_CASE("convolve_periodic with the delta kernel is the identity") {
  Rng rng(106);
  const Image img = random_image(2, 9, 7, rng);
  CHECK(max_image_diff(convolve_periodic(img, Kernel::delta(3)), img) < 1e-10);
}

TEST_CASE("unit-sum kernels preserve constant images") {
  Rng rng(107);
  Kernel k = random_kernel(5, rng);
  for (auto& v : k.weights()) v = std::abs(v);
  const double s = k.sum();
  for (auto& v : k.weights()) v /= s;
  Image img(1, 8, 8);
  for (auto& v : img.data()) v = 0.37;
  const Image out = convolve_periodic(img, k);
  for (double v : out.data()) CHECK(v == doctest::Approx(0.37).epsilon(1e-12));
}

TEST_CASE("convolve_periodic matches the spatial wraparound sum") {
  Rng rng(108);
  const Image img = random_image(1, 8, 8, rng);
  const Kernel k = random_kernel(5, rng);
  CHECK(max_image_diff(convolve_periodic(img, k), ref::convolve_wrap(img, k)) < 1e-10);
}

TEST_CASE("fft2 is linear") {
  Rng rng(109);
  const Image u = random_image(1, 10, 6, rng), v = random_image(1, 10, 6, rng);
  const double a = 1.7, b = -0.4;
  Image mix(1, 10, 6);
  for (std::size_t i = 0; i < mix.size(); ++i) {
    mix.data()[i] = a * u.data()[i] + b * v.data()[i];
  }
  const Spectrum su = fft2(u), sv = fft2(v), sm = fft2(mix);
  double err = 0;
  for (std::size_t i = 0; i < sm.size(); ++i) {
    err = std::max(err, std::abs(sm.data()[i] - (a * su.data()[i] + b * sv.data()[i])));
  }
  CHECK(err < 1e-10 * std::max(1.0, spec_scale(sm)));
}

TEST_CASE("convolution theorem holds on random instances") {
  Rng rng(110);
  for (int trial = 0; trial < 5; ++trial) {
    const Image img = random_image(1, 12, 10, rng);
    const Kernel k = random_kernel(3 + 2 * (trial % 3), rng);
    const Spectrum lhs = fft2(convolve_periodic(img, k));
    Spectrum rhs = fft2(img);
    const Spectrum ks = kernel_spectrum(k, 12, 10);
    for (std::size_t i = 0; i < rhs.size(); ++i) rhs.data()[i] *= ks.data()[i];
    CHECK(max_spec_diff(lhs, rhs) < 1e-9 * std::max(1.0, spec_scale(lhs)));
  }
}

TEST_CASE("convolution order commutes") {
  Rng rng(111);
  const Image img = random_image(1, 16, 16, rng);
  const Kernel k1 = random_kernel(3, rng), k2 = random_kernel(5, rng);
  const Image a = convolve_periodic(convolve_periodic(img, k1), k2);
  const Image b = convolve_periodic(convolve_periodic(img, k2), k1);
  CHECK(max_image_diff(a, b) < 1e-9);
}

TEST_CASE("Parseval holds for random images") {
  Rng rng(112);
  const Image img = random_image(2, 16, 16, rng);
  const Spectrum s = fft2(img);
  double space = 0, freq = 0;
  for (double v : img.data()) space += v * v;
  for (const auto& z : s.data()) freq += std::norm(z);
  freq /= 16.0 * 16.0;
  CHECK(space == doctest::Approx(freq).epsilon(1e-8));
}

TEST_CASE("tensor types enforce their invariants") {
  CHECK_THROWS_AS(Kernel(4), EvenSize);
  CHECK_THROWS_AS(Image(1, 2, 2, std::vector<double>{1.0, 2.0, 3.0}), DimensionMismatch);
  CHECK_THROWS_AS(Image(1, 1, 2, std::vector<double>{1.0, std::nan("")}), DataError);
}
