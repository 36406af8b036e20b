#include "ecall/config.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

namespace ecall {

EcallConfig::EcallConfig() {
  phase1.weights.lambda_a1 = 1;
  phase1.weights.lambda_c1 = 5;
  phase1.kernel_lr = 1e-3;
  phase1.iterations = 1000;

  phase2.weights.lambda_a1 = 10;
  phase2.weights.lambda_a2 = 10;
  phase2.weights.lambda_b1 = 1;
  phase2.weights.lambda_b2 = 1;
  phase2.weights.lambda_c1 = 5;
  phase2.weights.lambda_c2 = 10;
  phase2.kernel_lr = 1e-4;
  phase2.filter_lr = 1e-3;
  phase2.iterations = 1500;
  phase2.batch = 4;

  phase3.weights.lambda_b2 = 1;
  phase3.weights.lambda_c2 = 10;
  phase3.filter_lr = 1e-3;
  phase3.iterations = 3000;
  phase3.batch = 4;
}

EcallConfig EcallConfig::paper_scale() {
  EcallConfig cfg;
  cfg.image_size = 256;
  cfg.channels = 3;
  cfg.dataset_n = 1000;
  cfg.test_n = 1000;
  cfg.kernel_size = 31;
  cfg.phase1.iterations = 1000;
  cfg.phase2.iterations = 10000;
  cfg.phase2.batch = 2;
  cfg.phase3.iterations = 10000;
  cfg.phase3.batch = 2;
  cfg.supervised_iterations = 20000;
  cfg.supervised_batch = 2;
  return cfg;
}

void EcallConfig::apply_kernel_preset() {
  if (kernel_preset == "broad") {
    kernel_std = 0.5;
  } else if (kernel_preset == "medium") {
    kernel_std = 1.0;
  } else if (kernel_preset == "narrow") {
    kernel_std = 2.0;
  } else if (kernel_preset != "custom") {
    throw ConfigError("unknown kernel preset: " + kernel_preset);
  }
}

namespace {

using nlohmann::ordered_json;

ordered_json weights_to_json(const EcallWeights& w) {
  return ordered_json{{"lambda_a1", w.lambda_a1}, {"lambda_a2", w.lambda_a2},
                      {"lambda_b1", w.lambda_b1}, {"lambda_b2", w.lambda_b2},
                      {"lambda_c1", w.lambda_c1}, {"lambda_c2", w.lambda_c2}};
}

ordered_json phase_to_json(const PhaseConfig& p) {
  return ordered_json{{"weights", weights_to_json(p.weights)},
                      {"kernel_lr", p.kernel_lr},
                      {"filter_lr", p.filter_lr},
                      {"iterations", p.iterations},
                      {"batch", p.batch}};
}

template <typename T>
void maybe(const nlohmann::json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

void weights_from_json(const nlohmann::json& j, EcallWeights& w) {
  maybe(j, "lambda_a1", w.lambda_a1);
  maybe(j, "lambda_a2", w.lambda_a2);
  maybe(j, "lambda_b1", w.lambda_b1);
  maybe(j, "lambda_b2", w.lambda_b2);
  maybe(j, "lambda_c1", w.lambda_c1);
  maybe(j, "lambda_c2", w.lambda_c2);
}

void phase_from_json(const nlohmann::json& j, PhaseConfig& p) {
  if (j.contains("weights")) weights_from_json(j.at("weights"), p.weights);
  maybe(j, "kernel_lr", p.kernel_lr);
  maybe(j, "filter_lr", p.filter_lr);
  maybe(j, "iterations", p.iterations);
  maybe(j, "batch", p.batch);
}

}  // namespace

std::string EcallConfig::to_json() const {
  ordered_json j;
  j["image_size"] = image_size;
  j["channels"] = channels;
  j["dataset_n"] = dataset_n;
  j["test_n"] = test_n;
  j["kernel_preset"] = kernel_preset;
  j["kernel_std"] = kernel_std;
  j["kernel_size"] = kernel_size;
  j["noise_frac"] = noise_frac;
  j["seed"] = seed;
  j["mask_zero_fraction"] = mask_zero_fraction;
  j["closed_form_eps"] = closed_form_eps;
  j["phase1"] = phase_to_json(phase1);
  j["phase2"] = phase_to_json(phase2);
  j["phase3"] = phase_to_json(phase3);
  j["c_term_full_collection"] = c_term_full_collection;
  j["supervised_iterations"] = supervised_iterations;
  j["supervised_batch"] = supervised_batch;
  j["supervised_kernel_lr"] = supervised_kernel_lr;
  j["supervised_filter_lr"] = supervised_filter_lr;
  j["supervised_lambda_reg"] = supervised_lambda_reg;
  j["threads"] = threads;
  j["mode"] = mode;
  j["dataset_dir"] = dataset_dir;
  j["out_dir"] = out_dir;
  return j.dump(2);
}

EcallConfig EcallConfig::from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("invalid config JSON: ") + e.what());
  }
  EcallConfig cfg;
  try {
    maybe(j, "image_size", cfg.image_size);
    maybe(j, "channels", cfg.channels);
    maybe(j, "dataset_n", cfg.dataset_n);
    maybe(j, "test_n", cfg.test_n);
    maybe(j, "kernel_preset", cfg.kernel_preset);
    maybe(j, "kernel_std", cfg.kernel_std);
    maybe(j, "kernel_size", cfg.kernel_size);
    maybe(j, "noise_frac", cfg.noise_frac);
    maybe(j, "seed", cfg.seed);
    maybe(j, "mask_zero_fraction", cfg.mask_zero_fraction);
    maybe(j, "closed_form_eps", cfg.closed_form_eps);
    if (j.contains("phase1")) phase_from_json(j.at("phase1"), cfg.phase1);
    if (j.contains("phase2")) phase_from_json(j.at("phase2"), cfg.phase2);
    if (j.contains("phase3")) phase_from_json(j.at("phase3"), cfg.phase3);
    maybe(j, "c_term_full_collection", cfg.c_term_full_collection);
    maybe(j, "supervised_iterations", cfg.supervised_iterations);
    maybe(j, "supervised_batch", cfg.supervised_batch);
    maybe(j, "supervised_kernel_lr", cfg.supervised_kernel_lr);
    maybe(j, "supervised_filter_lr", cfg.supervised_filter_lr);
    maybe(j, "supervised_lambda_reg", cfg.supervised_lambda_reg);
    maybe(j, "threads", cfg.threads);
    maybe(j, "mode", cfg.mode);
    maybe(j, "dataset_dir", cfg.dataset_dir);
    maybe(j, "out_dir", cfg.out_dir);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("invalid config value: ") + e.what());
  }
  return cfg;
}

EcallConfig EcallConfig::from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file: " + path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return from_json(text);
}

}  // namespace ecall
