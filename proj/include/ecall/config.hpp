#pragma once

#include <cstdint>
#include <string>

#include "ecall/losses.hpp"

namespace ecall {

struct PhaseConfig {
  EcallWeights weights;
  double kernel_lr = 0;
  double filter_lr = 0;
  int iterations = 0;
  int batch = 0;  // 0 = full collection
};

// Every hyperparameter of a run. Defaults are desk scale: 64x64 grayscale,
// N=200, kernel size 15; paper_scale() switches to 256x256, N=1000, size 31
// with the published iteration counts.
struct EcallConfig {
  // dataset
  int image_size = 64;
  int channels = 1;
  int dataset_n = 200;
  int test_n = 50;
  std::string kernel_preset = "medium";  // broad | medium | narrow | custom
  double kernel_std = 1.0;
  int kernel_size = 15;
  double noise_frac = 0.0;
  std::uint64_t seed = 7;

  // estimation / training
  double mask_zero_fraction = 0.2;
  double closed_form_eps = 0;  // 0 = auto: 1e-6 * max|E[x^]|^2
  PhaseConfig phase1;
  PhaseConfig phase2;
  PhaseConfig phase3;
  bool c_term_full_collection = false;

  // supervised baseline
  int supervised_iterations = 4000;
  int supervised_batch = 8;
  double supervised_kernel_lr = 1e-4;
  double supervised_filter_lr = 1e-3;
  double supervised_lambda_reg = 5.0;

  // execution
  int threads = 1;
  std::string mode = "train";  // pipeline stage: closed-form | phase1 | train
  std::string dataset_dir;
  std::string out_dir = "runs/ecall";

  EcallConfig();

  // 256x256, N=1000, kernel 31, iteration counts 1e3/1e4/1e4, batch 2.
  static EcallConfig paper_scale();

  // Applies the named preset to kernel_std (broad 0.5, medium 1, narrow 2).
  void apply_kernel_preset();

  std::string to_json() const;
  static EcallConfig from_json(const std::string& text);
  static EcallConfig from_json_file(const std::string& path);
};

}  // namespace ecall
