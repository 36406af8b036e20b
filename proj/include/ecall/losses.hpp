#pragma once

#include <cstdint>
#include <span>

#include "ecall/filter.hpp"
#include "ecall/rng.hpp"
#include "ecall/stats.hpp"
#include "ecall/tensor.hpp"

namespace ecall {

struct EcallWeights {
  double lambda_a1 = 0, lambda_a2 = 0;
  double lambda_b1 = 0, lambda_b2 = 0;
  double lambda_c1 = 0, lambda_c2 = 0;
};

// Random per-bin keep mask applied inside the expectation-calibration loss.
struct FrequencyMask {
  int channels = 0, height = 0, width = 0;
  std::vector<std::uint8_t> keep;  // 1 = keep, 0 = zeroed
  double keep_fraction = 1.0;

  bool covers(int c, int h, int w) const { return channels == c && height == h && width == w; }
  static FrequencyMask all_pass(int channels, int height, int width);
};

// I.i.d. Bernoulli per bin with keep probability 1 - zero_fraction.
FrequencyMask sample_mask(int channels, int height, int width, double zero_fraction, Rng& rng);

// ---------------------------------------------------------------------------
// Expectation-calibration loss (term A). noise_batch is position-paired with
// x_batch; the caller supplies the random pairing by permuting it. The
// y-side statistics come from the bundle, scaled by the batch size.
// ---------------------------------------------------------------------------
double loss_A(const Kernel& k, std::span<const Image> x_batch, std::span<const Image> noise_batch,
              const ExpectationBundle& y_bundle, const FrequencyMask& mask,
              const EcallWeights& weights);

// Exact gradient of loss_A with respect to the kernel taps (subgradient 0 at
// zero-residual bins).
Kernel grad_loss_A(const Kernel& k, std::span<const Image> x_batch,
                   std::span<const Image> noise_batch, const ExpectationBundle& y_bundle,
                   const FrequencyMask& mask, const EcallWeights& weights);

// ---------------------------------------------------------------------------
// Cycle-consistency loss (term B) and regularization (term C). All squared
// norms are evaluated in the frequency domain via Parseval, which coincides
// with the spatial definition for conjugate-symmetric gains.
// ---------------------------------------------------------------------------
double loss_B(const Kernel& k, const SpectralFilter& f, std::span<const Image> x_batch,
              std::span<const Image> noise_batch, std::span<const Image> y_batch,
              const EcallWeights& weights);

double loss_C(const Kernel& k, const SpectralFilter& f, const ExpectationBundle& x_bundle,
              std::span<const Image> y_batch, const EcallWeights& weights);

struct KernelFilterGrad {
  Kernel kernel;                // d/d taps
  std::vector<complexd> gains;  // d/d(Re g) + i d/d(Im g), h*w
};

KernelFilterGrad grad_loss_B(const Kernel& k, const SpectralFilter& f,
                             std::span<const Image> x_batch, std::span<const Image> noise_batch,
                             std::span<const Image> y_batch, const EcallWeights& weights);

KernelFilterGrad grad_loss_C(const Kernel& k, const SpectralFilter& f,
                             const ExpectationBundle& x_bundle, std::span<const Image> y_batch,
                             const EcallWeights& weights);

// ---------------------------------------------------------------------------
// Precomputed-spectrum cores shared by the public wrappers above and the
// optimizers (identical math, no redundant transforms). Gradient outputs are
// filled when non-null. x_sum/noise_sum hints skip the batch reduction for
// the first A-term when the caller keeps running sums.
// ---------------------------------------------------------------------------
double eval_loss_a(const Kernel& k, std::span<const Spectrum* const> x,
                   std::span<const Spectrum* const> noise, const Spectrum& y_sum,
                   std::span<const double> y_abs_sum, const FrequencyMask& mask, double lambda_a1,
                   double lambda_a2, Kernel* grad_out, const Spectrum* x_sum_hint = nullptr,
                   const Spectrum* noise_sum_hint = nullptr);

double eval_loss_b(const Kernel& k, const SpectralFilter& f, std::span<const Spectrum* const> x,
                   std::span<const Spectrum* const> noise, std::span<const Spectrum* const> y,
                   double lambda_b1, double lambda_b2, Kernel* grad_k_out,
                   std::vector<complexd>* grad_g_out);

// The C2 statistic compares the (precomputed) collection mean of x with the
// batch mean of R y; batch_size is the N entering the 1/N factor.
double eval_loss_c(const Kernel& k, const SpectralFilter& f, const Spectrum& x_mean_spec,
                   const Spectrum& y_batch_sum, int batch_size, double lambda_c1, double lambda_c2,
                   Kernel* grad_k_out, std::vector<complexd>* grad_g_out);

// Adjoint of the kernel embedding: forward transform of the conjugated
// per-bin gradient grid, read out at the wrapped tap positions. Shared by
// every loss that is parameterized by kernel taps through the DFT.
Kernel kernel_taps_from_bin_gradient(std::vector<complexd> grid, int size, int height, int width);

}  // namespace ecall
