#pragma once

#include "ecall/config.hpp"
#include "ecall/datagen.hpp"
#include "ecall/losses.hpp"
#include "ecall/stats.hpp"

namespace ecall {

// Per-frequency spectral division implied by E[y^] = k^ * E[x^]:
// k^ = E[y^] conj(E[x^]) / (|E[x^]|^2 + eps), averaged over channels, inverse
// transformed, unwrapped from index (0,0) and cropped to size x size.
// Throws DegenerateDenominator when |E[x^]| < eps on more than half the bins.
Kernel closed_form_estimate(const ExpectationBundle& y_bundle, const ExpectationBundle& x_bundle,
                            double eps, int size);

// Default regularizer for the spectral division: 1e-6 * max |E[x^]|^2.
double default_closed_form_eps(const ExpectationBundle& x_bundle);

// Precomputed per-sample spectra and collection statistics; everything the
// iterative losses need, computed once per dataset.
struct TrainingData {
  int channels = 0, height = 0, width = 0;
  std::vector<Spectrum> x_spec;      // F(x_i)
  std::vector<Spectrum> noise_spec;  // F(d_i); empty when noiseless
  std::vector<Spectrum> y_spec;      // F(y_i)
  Spectrum x_sum;                    // sum of F(x_i)
  Spectrum noise_sum;                // sum of F(d_i); zero grid when noiseless
  Spectrum y_sum;                    // sum of F(y_i)
  std::vector<double> y_abs_sum;     // sum of |F(y_i)|
  Spectrum x_mean_spec;              // F(E[x])
  Spectrum y_full_sum;               // alias of y_sum, kept for the C term
  int n = 0;

  static TrainingData build(const DatasetSplits& splits);
};

// Loss-curve row shared by the estimator and the trainer.
struct LossRow {
  int iteration = 0;
  double loss_a = 0, loss_b = 0, loss_c = 0, total = 0;
};

// Phase 1: gradient minimization of the masked expectation-calibration loss
// plus L2 regularization, from a centered-delta initialization.
Kernel phase1_estimate(const TrainingData& data, const EcallConfig& cfg, Rng& rng,
                       std::vector<LossRow>* curve = nullptr);
Kernel phase1_estimate(const DatasetSplits& splits, const EcallConfig& cfg, Rng& rng,
                       std::vector<LossRow>* curve = nullptr);

}  // namespace ecall
