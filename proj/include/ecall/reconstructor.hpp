#pragma once

#include "ecall/estimator.hpp"
#include "ecall/filter.hpp"

namespace ecall {

struct TrainReport {
  std::vector<std::vector<LossRow>> phase_curves;  // one curve per executed phase
  double wall_seconds = 0;
  std::string config_json;
};

struct TrainResult {
  Kernel kernel;
  SpectralFilter filter;
  TrainReport report;
};

// The three-phase schedule: phase 1 trains the kernel on the masked
// expectation-calibration loss, phase 2 trains kernel and filter jointly on
// the full loss, phase 3 fine-tunes the filter only. Kernel-loss statistics
// use the full collection; the B/C image terms use the configured mini-batch.
TrainResult train_three_phase(const DatasetSplits& splits, const EcallConfig& cfg, Rng& rng);

// Paired baseline: builds y_i = k_true * x_i + d_i from the originals and
// minimizes (1/N) sum ||k*x_i - y_i||^2 + (1/N) sum ||x_i - R y_i||^2
// + lambda_reg ||k||^2. Single phase.
TrainResult supervised_baseline(std::span<const Image> originals, const Kernel& k_true,
                                const EcallConfig& cfg, Rng& rng);

// Writes iteration,phase,loss_a,loss_b,loss_c,total rows.
void save_loss_curves(const TrainReport& report, const std::string& path);

}  // namespace ecall
