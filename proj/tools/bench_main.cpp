// Benchmark comparing the OpenMP frequency-domain kernels in src/ against the
// serial spatial-domain reference implementations kept for testing.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <vector>

#include <CLI11.hpp>

#include "ecall/datagen.hpp"
#include "ecall/fft.hpp"
#include "ecall/losses.hpp"
#include "ecall/stats.hpp"
#include "ecall/threads.hpp"
#include "reference.hpp"

using namespace ecall;

namespace {

template <typename F>
double time_ms(int reps, F&& fn) {
  fn();  // warm-up
  const auto t0 = std::chrono::steady_clock::now();
  for (int i = 0; i < reps; ++i) fn();
  const auto t1 = std::chrono::steady_clock::now();
  return std::chrono::duration<double, std::milli>(t1 - t0).count() / reps;
}

double max_abs_diff(std::span<const complexd> a, std::span<const complexd> b) {
  double m = 0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double m = 0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

void row(const char* name, double fast_ms, double ref_ms, double diff) {
  std::printf("%-28s %10.3f ms %12.3f ms %9.1fx   %.3e\n", name, fast_ms, ref_ms,
              ref_ms / fast_ms, diff);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ecall-bench: fast kernels vs serial reference"};
  int size = 64, batch = 64, reps = 5, threads = 0, naive_size = 32;
  app.add_option("--size", size, "image side for the fast-path benchmarks");
  app.add_option("--naive-size", naive_size, "image side for naive-DFT comparisons");
  app.add_option("--batch", batch, "batch size for collection-level benchmarks");
  app.add_option("--reps", reps, "repetitions per measurement");
  app.add_option("--threads", threads, "OpenMP threads (0 = runtime default)");
  CLI11_PARSE(app, argc, argv);

  set_threads(threads);
  std::printf("threads: %d, size: %dx%d, naive size: %dx%d, batch: %d\n\n", current_threads(),
              size, size, naive_size, naive_size, batch);
  std::printf("%-28s %13s %15s %10s   %s\n", "kernel", "fast", "reference", "speedup",
              "max|diff|");

  Rng rng(42);

  // fft2 vs direct double-sum DFT
  {
    std::vector<Image> probe = synthetic_textures(1, naive_size, naive_size, rng);
    Spectrum fast_out, ref_out;
    const double fast_ms = time_ms(reps, [&] { fast_out = fft2(probe[0]); });
    const double ref_ms = time_ms(reps, [&] { ref_out = ref::dft2(probe[0]); });
    row("fft2 vs naive dft2", fast_ms, ref_ms, max_abs_diff(fast_out.data(), ref_out.data()));
  }

  // convolution via FFT vs explicit wraparound sum
  {
    std::vector<Image> probe = synthetic_textures(1, size, size, rng);
    const Kernel k = gaussian_kernel(2.0, 15);
    Image fast_out, ref_out;
    const double fast_ms = time_ms(reps, [&] { fast_out = convolve_periodic(probe[0], k); });
    const double ref_ms = time_ms(reps, [&] { ref_out = ref::convolve_wrap(probe[0], k); });
    row("convolve 15x15", fast_ms, ref_ms, max_abs_diff(fast_out.data(), ref_out.data()));
  }

  // collection statistics: chunked parallel fold vs serial fold
  {
    const std::vector<Image> images = synthetic_textures(batch, size, size, rng);
    ExpectationBundle fast_b, ref_b;
    const double fast_ms = time_ms(reps, [&] { fast_b = bundle_of(images); });
    const double ref_ms = time_ms(reps, [&] {
      ref_b = ExpectationBundle{};
      for (const Image& img : images) accumulate(ref_b, img);
    });
    row("bundle_of", fast_ms, ref_ms,
        max_abs_diff(fast_b.mean_spectrum.data(), ref_b.mean_spectrum.data()));
  }

  // expectation-calibration loss: frequency-domain vs spatial recomputation
  {
    const int n = std::min(batch, 16), side = std::min(size, 32);
    const std::vector<Image> xs = synthetic_textures(2 * n, side, side, rng);
    const Kernel k_true = gaussian_kernel(1.0, 9);
    std::vector<Image> ys;
    for (int i = n; i < 2 * n; ++i) ys.push_back(convolve_periodic(xs[i], k_true));
    const std::vector<Image> x_batch(xs.begin(), xs.begin() + n);
    const ExpectationBundle yb = bundle_of(ys);
    const FrequencyMask mask = FrequencyMask::all_pass(1, side, side);
    EcallWeights wts;
    wts.lambda_a1 = 1;
    wts.lambda_a2 = 1;
    const Kernel k = Kernel::delta(9);
    double fast_v = 0, ref_v = 0;
    const double fast_ms =
        time_ms(reps, [&] { fast_v = loss_A(k, x_batch, {}, yb, mask, wts); });
    const double ref_ms =
        time_ms(reps, [&] { ref_v = ref::loss_a(k, x_batch, {}, yb, mask, wts); });
    row("loss_A", fast_ms, ref_ms, std::abs(fast_v - ref_v));
  }

  return 0;
}
