#include <doctest.h>

#include <cmath>

#include "ecall/datagen.hpp"
#include "ecall/fft.hpp"
#include "ecall/losses.hpp"
#include "reference.hpp"

using namespace ecall;

namespace {

Image random_image(int c, int h, int w, Rng& rng) {
  Image img(c, h, w);
  for (auto& v : img.data()) v = rand_unit(rng);
  return img;
}

Kernel random_kernel(int size, Rng& rng, double lo = -0.5, double hi = 0.5) {
  Kernel k(size);
  for (auto& v : k.weights()) v = rand_range(rng, lo, hi);
  return k;
}

// Conjugate-symmetric random gains (the spectrum of a random real field), so
// the spatial-domain reference and the Parseval evaluation agree exactly.
SpectralFilter random_symmetric_filter(int h, int w, Rng& rng) {
  Image field(1, h, w);
  for (auto& v : field.data()) v = rand_range(rng, -0.8, 0.8);
  const Spectrum s = fft2(field);
  SpectralFilter f(h, w);
  for (std::size_t i = 0; i < f.gains.size(); ++i) f.gains[i] = s.data()[i];
  return f;
}

struct Instance {
  std::vector<Image> xs, noises, ys;
  ExpectationBundle y_bundle, x_bundle;
};

Instance make_instance(int n, int side, double noise_frac, Rng& rng) {
  Instance ins;
  const Kernel k_true = gaussian_kernel(1.0, 5);
  std::vector<Image> pool = synthetic_textures(2 * n, side, side, rng);
  for (int i = 0; i < n; ++i) {
    ins.xs.push_back(pool[i]);
    auto [obs, noise] = blur_and_noise(pool[n + i], k_true, noise_frac, rng);
    ins.ys.push_back(std::move(obs));
    if (noise_frac > 0) {
      Image fresh(1, side, side);
      for (auto& v : fresh.data()) v = noise_frac * rand_normal(rng);
      ins.noises.push_back(std::move(fresh));
    }
  }
  ins.y_bundle = bundle_of(ins.ys);
  ins.x_bundle = bundle_of(ins.xs);
  return ins;
}

double rel_err(double a, double b) {
  const double denom = std::max(std::abs(a), std::abs(b));
  return denom == 0 ? 0.0 : std::abs(a - b) / denom;
}

}  // namespace

TEST_CASE("an all-pass mask reproduces the unmasked loss") {
  Rng rng(301);
  const Instance ins = make_instance(4, 8, 0.0, rng);
  const Kernel k = random_kernel(3, rng);
  EcallWeights w;
  w.lambda_a1 = 1.0;
  w.lambda_a2 = 0.7;
  Rng mask_rng(1);
  const FrequencyMask zero_frac = sample_mask(1, 8, 8, 0.0, mask_rng);
  const FrequencyMask all = FrequencyMask::all_pass(1, 8, 8);
  CHECK(loss_A(k, ins.xs, ins.noises, ins.y_bundle, zero_frac, w) ==
        loss_A(k, ins.xs, ins.noises, ins.y_bundle, all, w));
}

TEST_CASE("mask keep fraction concentrates near its target") {
  Rng rng(302);
  const FrequencyMask m = sample_mask(1, 64, 64, 0.2, rng);
  double kept = 0;
  for (auto b : m.keep) kept += b;
  kept /= static_cast<double>(m.keep.size());
  CHECK(kept > 0.78);
  CHECK(kept < 0.82);
  CHECK(m.keep_fraction == doctest::Approx(0.8));
}

TEST_CASE("masks are seed-deterministic and validate their arguments") {
  Rng g1(9), g2(9);
  const FrequencyMask a = sample_mask(2, 16, 16, 0.3, g1);
  const FrequencyMask b = sample_mask(2, 16, 16, 0.3, g2);
  CHECK(a.keep == b.keep);
  Rng g3(9);
  CHECK_THROWS_AS(sample_mask(1, 4, 4, 1.0, g3), ConfigError);
  CHECK_THROWS_AS(sample_mask(1, 4, 4, -0.1, g3), ConfigError);
}

TEST_CASE("loss_A vanishes at the true kernel on paired noiseless data") {
  Rng rng(303);
  const Kernel k_true = gaussian_kernel(1.0, 5);
  std::vector<Image> xs = synthetic_textures(6, 8, 8, rng), ys;
  for (const Image& x : xs) ys.push_back(convolve_periodic(x, k_true));
  const ExpectationBundle yb = bundle_of(ys);
  EcallWeights w;
  w.lambda_a1 = 1.0;
  w.lambda_a2 = 1.0;
  const double v = loss_A(k_true, xs, {}, yb, FrequencyMask::all_pass(1, 8, 8), w);
  CHECK(v < 1e-9);
}

TEST_CASE("loss_A at the zero kernel equals the L1 mass of E[y^]") {
  Rng rng(304);
  const Instance ins = make_instance(5, 8, 0.0, rng);
  EcallWeights w;
  w.lambda_a1 = 1.0;
  const Kernel zero(3);
  const double v = loss_A(zero, ins.xs, {}, ins.y_bundle, FrequencyMask::all_pass(1, 8, 8), w);
  double expect = 0;
  for (const complexd& z : ins.y_bundle.mean_spectrum.data()) expect += std::abs(z);
  CHECK(v == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("loss_A matches the independent spatial recomputation") {
  Rng rng(305);
  for (int trial = 0; trial < 3; ++trial) {
    const Instance ins = make_instance(4, 8, trial == 2 ? 0.01 : 0.0, rng);
    const Kernel k = random_kernel(3, rng);
    EcallWeights w;
    w.lambda_a1 = rand_range(rng, 0.5, 2.0);
    w.lambda_a2 = rand_range(rng, 0.5, 2.0);
    const FrequencyMask mask = sample_mask(1, 8, 8, 0.25, rng);
    const double fast = loss_A(k, ins.xs, ins.noises, ins.y_bundle, mask, w);
    const double slow = ref::loss_a(k, ins.xs, ins.noises, ins.y_bundle, mask, w);
    CHECK(rel_err(fast, slow) < 1e-10);
  }
}

TEST_CASE("masked loss_A averages to keep_fraction times the unmasked loss") {
  Rng rng(306);
  const Instance ins = make_instance(6, 16, 0.0, rng);
  const Kernel k = random_kernel(5, rng);
  EcallWeights w;
  w.lambda_a1 = 1.0;
  w.lambda_a2 = 1.0;
  const double unmasked =
      loss_A(k, ins.xs, {}, ins.y_bundle, FrequencyMask::all_pass(1, 16, 16), w);
  double acc = 0;
  for (int i = 0; i < 500; ++i) {
    acc += loss_A(k, ins.xs, {}, ins.y_bundle, sample_mask(1, 16, 16, 0.2, rng), w);
  }
  acc /= 500.0;
  CHECK(acc == doctest::Approx(0.8 * unmasked).epsilon(0.03));
}

TEST_CASE("grad_loss_A matches central finite differences") {
  Rng rng(307);
  for (int trial = 0; trial < 3; ++trial) {
    Instance ins = make_instance(4, 8, trial == 1 ? 0.01 : 0.0, rng);
    Kernel k = random_kernel(5, rng);
    EcallWeights w;
    w.lambda_a1 = 1.0;
    w.lambda_a2 = trial == 0 ? 0.0 : 1.3;
    const FrequencyMask mask = sample_mask(1, 8, 8, 0.2, rng);
    const Kernel analytic = grad_loss_A(k, ins.xs, ins.noises, ins.y_bundle, mask, w);
    const double h = 1e-6;
    for (int t = 0; t < 10; ++t) {
      const int idx = static_cast<int>(rand_below(rng, k.weights().size()));
      Kernel kp = k, km = k;
      kp.weights()[idx] += h;
      km.weights()[idx] -= h;
      const double fd = (loss_A(kp, ins.xs, ins.noises, ins.y_bundle, mask, w) -
                         loss_A(km, ins.xs, ins.noises, ins.y_bundle, mask, w)) /
                        (2 * h);
      if (std::abs(fd) < 1e-8 && std::abs(analytic.weights()[idx]) < 1e-8) continue;
      CHECK(rel_err(fd, analytic.weights()[idx]) < 1e-4);
    }
  }
}

TEST_CASE("grad_loss_A is zero at an exact minimum") {
  Rng rng(308);
  const Kernel k_true = gaussian_kernel(1.0, 5);
  std::vector<Image> xs = synthetic_textures(5, 8, 8, rng), ys;
  for (const Image& x : xs) ys.push_back(convolve_periodic(x, k_true));
  const ExpectationBundle yb = bundle_of(ys);
  EcallWeights w;
  w.lambda_a1 = 1.0;
  w.lambda_a2 = 1.0;
  const Kernel g = grad_loss_A(k_true, xs, {}, yb, FrequencyMask::all_pass(1, 8, 8), w);
  double norm = 0;
  for (double v : g.weights()) norm += v * v;
  CHECK(std::sqrt(norm) < 1e-8);
}

TEST_CASE("loss_B vanishes for the delta kernel with identity gains") {
  Rng rng(309);
  const Instance ins = make_instance(3, 8, 0.0, rng);
  EcallWeights w;
  w.lambda_b1 = 1.0;
  w.lambda_b2 = 1.0;
  const double v = loss_B(Kernel::delta(3), SpectralFilter::identity(8, 8), ins.xs, {}, ins.ys, w);
  CHECK(v < 1e-18);
}

TEST_CASE("loss_B vanishes for the true kernel with its exact inverse filter") {
  Rng rng(310);
  const Kernel k_true = gaussian_kernel(1.0, 5);
  // verify there are no zero bins before inverting
  const Spectrum ks = kernel_spectrum(k_true, 16, 16);
  double min_mag = 1e30;
  for (const auto& z : ks.data()) min_mag = std::min(min_mag, std::abs(z));
  REQUIRE(min_mag > 1e-12);
  const SpectralFilter inv = wiener_filter(k_true, 0.0, 16, 16);
  std::vector<Image> xs = synthetic_textures(2, 16, 16, rng), ys;
  for (const Image& x : xs) ys.push_back(convolve_periodic(x, k_true));
  EcallWeights w;
  w.lambda_b1 = 1.0;
  w.lambda_b2 = 1.0;
  CHECK(loss_B(k_true, inv, xs, {}, ys, w) < 1e-8);
}

TEST_CASE("loss_B matches the independent spatial recomputation") {
  Rng rng(311);
  const Instance ins = make_instance(2, 8, 0.01, rng);
  const Kernel k = random_kernel(3, rng);
  const SpectralFilter f = random_symmetric_filter(8, 8, rng);
  EcallWeights w;
  w.lambda_b1 = rand_range(rng, 0.5, 2.0);
  w.lambda_b2 = rand_range(rng, 0.5, 2.0);
  const double fast = loss_B(k, f, ins.xs, ins.noises, ins.ys, w);
  const double slow = ref::loss_b(k, f, ins.xs, ins.noises, ins.ys, w);
  CHECK(rel_err(fast, slow) < 1e-9);
}

TEST_CASE("loss_C closed forms") {
  Rng rng(312);
  const Instance ins = make_instance(4, 8, 0.0, rng);
  EcallWeights w;
  w.lambda_c1 = 2.0;
  w.lambda_c2 = 3.0;
  // E[R y] = E[x] with identity gains and y == x makes the C2 term vanish
  const double v =
      loss_C(Kernel(3), SpectralFilter::identity(8, 8), ins.x_bundle, ins.xs, w);
  CHECK(v < 1e-18);
  // lambda_c2 = 0 leaves the pure L2 penalty
  EcallWeights w2;
  w2.lambda_c1 = 1.7;
  const Kernel k = random_kernel(5, rng);
  const double v2 = loss_C(k, SpectralFilter::identity(8, 8), ins.x_bundle, ins.ys, w2);
  CHECK(v2 == doctest::Approx(1.7 * k.squared_norm()).epsilon(1e-12));
}

TEST_CASE("loss_C matches the independent spatial recomputation") {
  Rng rng(313);
  const Instance ins = make_instance(4, 8, 0.0, rng);
  const Kernel k = random_kernel(3, rng);
  const SpectralFilter f = random_symmetric_filter(8, 8, rng);
  EcallWeights w;
  w.lambda_c1 = rand_range(rng, 0.5, 2.0);
  w.lambda_c2 = rand_range(rng, 0.5, 2.0);
  const double fast = loss_C(k, f, ins.x_bundle, ins.ys, w);
  const double slow = ref::loss_c(k, f, ins.x_bundle.mean_image, ins.ys, w);
  CHECK(rel_err(fast, slow) < 1e-9);
}

namespace {

template <typename LossFn>
void check_filter_gradient(SpectralFilter f, const std::vector<complexd>& analytic, LossFn loss,
                           Rng& rng, double tol) {
  const double h = 1e-6;
  for (int t = 0; t < 12; ++t) {
    const std::size_t idx = rand_below(rng, f.gains.size());
    const bool imag = t % 2 == 1;
    const complexd delta = imag ? complexd(0, h) : complexd(h, 0);
    SpectralFilter fp = f, fm = f;
    fp.gains[idx] += delta;
    fm.gains[idx] -= delta;
    const double fd = (loss(fp) - loss(fm)) / (2 * h);
    const double an = imag ? analytic[idx].imag() : analytic[idx].real();
    if (std::abs(fd) < 1e-10 && std::abs(an) < 1e-10) continue;
    CHECK(rel_err(fd, an) < tol);
  }
}

}  // namespace

TEST_CASE("grad_loss_B matches finite differences in taps and gains") {
  Rng rng(314);
  const Instance ins = make_instance(4, 8, 0.01, rng);
  Kernel k = random_kernel(5, rng);
  const SpectralFilter f = random_symmetric_filter(8, 8, rng);
  EcallWeights w;
  w.lambda_b1 = 1.2;
  w.lambda_b2 = 0.8;
  const KernelFilterGrad g = grad_loss_B(k, f, ins.xs, ins.noises, ins.ys, w);

  const double h = 1e-6;
  for (int t = 0; t < 10; ++t) {
    const int idx = static_cast<int>(rand_below(rng, k.weights().size()));
    Kernel kp = k, km = k;
    kp.weights()[idx] += h;
    km.weights()[idx] -= h;
    const double fd = (loss_B(kp, f, ins.xs, ins.noises, ins.ys, w) -
                       loss_B(km, f, ins.xs, ins.noises, ins.ys, w)) /
                      (2 * h);
    CHECK(rel_err(fd, g.kernel.weights()[idx]) < 1e-5);
  }
  check_filter_gradient(
      f, g.gains, [&](const SpectralFilter& ff) { return loss_B(k, ff, ins.xs, ins.noises, ins.ys, w); },
      rng, 1e-5);
}

TEST_CASE("grad_loss_C matches finite differences and the quadratic rule") {
  Rng rng(315);
  const Instance ins = make_instance(4, 8, 0.0, rng);
  Kernel k = random_kernel(5, rng);
  const SpectralFilter f = random_symmetric_filter(8, 8, rng);
  EcallWeights w;
  w.lambda_c1 = 0.9;
  w.lambda_c2 = 2.1;
  const KernelFilterGrad g = grad_loss_C(k, f, ins.x_bundle, ins.ys, w);
  for (std::size_t t = 0; t < k.weights().size(); ++t) {
    CHECK(g.kernel.weights()[t] ==
          doctest::Approx(2.0 * w.lambda_c1 * k.weights()[t]).epsilon(1e-12));
  }
  check_filter_gradient(
      f, g.gains, [&](const SpectralFilter& ff) { return loss_C(k, ff, ins.x_bundle, ins.ys, w); },
      rng, 1e-5);
}
