#pragma once

// Serial reference implementations used as independent oracles in tests and
// as the baseline side of the benchmark. Everything here is written directly
// from the defining formulas (double loops, spatial-domain norms) and shares
// no code with the FFT-based fast paths in src/.

#include <span>

#include "ecall/losses.hpp"
#include "ecall/reconstructor.hpp"
#include "ecall/stats.hpp"
#include "ecall/tensor.hpp"

namespace ecall::ref {

// Direct O(N^2) double-sum DFT per channel.
Spectrum dft2(const Image& img);

// Direct inverse DFT; returns the real part.
Image idft2(const Spectrum& spec);

// Centered circular convolution as an explicit spatial sum with wraparound
// indexing.
Image convolve_wrap(const Image& img, const Kernel& k);

// Filter application via naive transforms: real part of idft2(gains .* dft2).
Image apply_filter(const SpectralFilter& f, const Image& img);

// Expectation-calibration loss recomputed from its definition: per-sample
// naive transforms of k*x_i + d_i, sums, masked L1 norms.
double loss_a(const Kernel& k, std::span<const Image> x_batch, std::span<const Image> noise_batch,
              const ExpectationBundle& y_bundle, const FrequencyMask& mask,
              const EcallWeights& weights);

// Cycle-consistency loss recomputed with spatial-domain squared norms.
double loss_b(const Kernel& k, const SpectralFilter& f, std::span<const Image> x_batch,
              std::span<const Image> noise_batch, std::span<const Image> y_batch,
              const EcallWeights& weights);

// Regularization loss recomputed from its definition.
double loss_c(const Kernel& k, const SpectralFilter& f, const Image& x_mean,
              std::span<const Image> y_batch, const EcallWeights& weights);

// Batch mean statistics by sum-then-divide (no running update).
Spectrum mean_spectrum_direct(std::span<const Image> images);

// PSNR straight from the formula.
double psnr_direct(const Image& a, const Image& b, double peak);

// Mean SSIM with an explicit per-window double loop (11x11 Gaussian window,
// sigma 1.5, valid positions only).
double ssim_naive(const Image& a, const Image& b, double peak);

}  // namespace ecall::ref
