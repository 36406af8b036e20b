#pragma once

#include <functional>
#include <string>

#include "ecall/config.hpp"
#include "ecall/datagen.hpp"
#include "ecall/reconstructor.hpp"

namespace ecall {

// Dataset directory layout: manifest.json, kernel_true.bin, originals/,
// observations/, noises/, test/ (paired original_/observed_ tensors). Every
// artifact file carries a content hash in the manifest.
void run_generate(const EcallConfig& cfg, const std::string& dataset_dir);

struct LoadedDataset {
  DatasetSplits splits;
  Kernel true_kernel;
  std::string manifest_hash;
  double noise_frac = 0;
};

LoadedDataset load_dataset(const std::string& dataset_dir);

// Kernel estimation (mode "closed-form" or "phase1"); writes kernel.bin and
// report.json under out_dir.
Kernel run_estimate(const EcallConfig& cfg, const std::string& dataset_dir,
                    const std::string& out_dir);

// Three-phase training; writes kernel.bin, filter.bin, report.json,
// loss_curves.csv and timing.json under out_dir.
TrainResult run_train(const EcallConfig& cfg, const std::string& dataset_dir,
                      const std::string& out_dir);

void run_reconstruct(const std::string& filter_path, const std::string& input_path,
                     const std::string& output_path);

struct EvaluateArgs {
  std::string kernel_path;       // estimated kernel
  std::string true_kernel_path;  // ground truth
  std::string dataset_dir;       // for the paired test set
  std::string filter_path;       // optional: reconstruct test observations
  std::string recon_dir;         // optional: precomputed reconstructions recon_%04d.bin
  std::string out_report;        // JSON report path
  std::string out_csv;           // optional per-image CSV
};

struct EvaluateResult {
  double l2err = 0, mnc = 0;
  double mean_psnr_recon = 0, mean_ssim_recon = 0;
  double mean_psnr_observed = 0, mean_ssim_observed = 0;
  bool has_images = false;
};

EvaluateResult run_evaluate(const EvaluateArgs& args);

// generate -> estimate/train -> evaluate under cfg.out_dir. Returns the
// evaluation summary and writes report.json.
EvaluateResult run_pipeline(const EcallConfig& cfg);

// Maps exceptions onto process exit codes: ConfigError 2, DataError 3,
// NumericError 4, anything else 1.
int guarded(const std::function<void()>& fn);

}  // namespace ecall
