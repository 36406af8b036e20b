// ecall: unsupervised blind-deconvolution experiments from unpaired image
// collections. Subcommands: generate, estimate-kernel, train, reconstruct,
// evaluate, pipeline.

#include <filesystem>
#include <string>

#include <CLI11.hpp>

#include "ecall/pipeline.hpp"
#include "ecall/threads.hpp"

namespace fs = std::filesystem;
using ecall::EcallConfig;

namespace {

struct CommonFlags {
  std::string config_path;
  bool paper_scale = false;
};

EcallConfig base_config(const CommonFlags& flags) {
  if (!flags.config_path.empty()) {
    EcallConfig cfg = EcallConfig::from_json_file(flags.config_path);
    return cfg;
  }
  return flags.paper_scale ? EcallConfig::paper_scale() : EcallConfig();
}

void add_dataset_flags(CLI::App* cmd, EcallConfig& cfg) {
  cmd->add_option("--n", cfg.dataset_n, "collection size N");
  cmd->add_option("--test-n", cfg.test_n, "paired test-set size");
  cmd->add_option("--image-size", cfg.image_size, "square image side");
  cmd->add_option("--channels", cfg.channels, "image channels (1 or 3)");
  cmd->add_option("--kernel", cfg.kernel_preset, "kernel preset: broad|medium|narrow|custom");
  cmd->add_option("--kernel-std", cfg.kernel_std, "Gaussian std for --kernel custom");
  cmd->add_option("--kernel-size", cfg.kernel_size, "kernel side length (odd)");
  cmd->add_option("--noise", cfg.noise_frac, "noise std as a fraction of max(image)");
  cmd->add_option("--seed", cfg.seed, "RNG seed");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ECALL unsupervised blind deconvolution"};
  app.require_subcommand(1);

  int threads = 1;
  app.add_option("--threads", threads, "OpenMP thread count (default 1 for reproducibility)")
      ->envname("ECALL_THREADS");

  CommonFlags flags;
  EcallConfig cfg;

  // generate
  auto* gen = app.add_subcommand("generate", "create a synthetic unpaired dataset");
  std::string gen_out = "data";
  add_dataset_flags(gen, cfg);
  gen->add_option("--out", gen_out, "dataset directory")->required();

  // estimate-kernel
  auto* est = app.add_subcommand("estimate-kernel", "estimate the kernel from a dataset");
  std::string est_dataset, est_out = "kernel.bin";
  est->add_option("--dataset", est_dataset, "dataset directory")->required();
  est->add_option("--mode", cfg.mode, "closed-form | phase1")->required();
  est->add_option("--kernel-size", cfg.kernel_size, "estimated kernel side (odd)");
  est->add_option("--iters", cfg.phase1.iterations, "phase-1 iteration count");
  est->add_option("--lr", cfg.phase1.kernel_lr, "phase-1 learning rate");
  est->add_option("--lambda-a1", cfg.phase1.weights.lambda_a1, "phase-1 lambda_A1");
  est->add_option("--lambda-a2", cfg.phase1.weights.lambda_a2, "phase-1 lambda_A2");
  est->add_option("--lambda-c1", cfg.phase1.weights.lambda_c1, "phase-1 lambda_C1");
  est->add_option("--mask-frac", cfg.mask_zero_fraction, "mask zero fraction (0 disables)");
  est->add_option("--eps", cfg.closed_form_eps, "closed-form eps (0 = auto)");
  est->add_option("--seed", cfg.seed, "RNG seed");
  est->add_option("--out", est_out, "output kernel tensor path");

  // train
  auto* train = app.add_subcommand("train", "three-phase joint training");
  std::string train_dataset, train_out = "runs/ecall", phases = "1,2,3";
  train->add_option("--dataset", train_dataset, "dataset directory")->required();
  train->add_option("--config", flags.config_path, "JSON config file");
  train->add_option("--phases", phases, "comma-separated subset of 1,2,3");
  train->add_option("--seed", cfg.seed, "RNG seed");
  train->add_option("--out-dir", train_out, "output directory");

  // reconstruct
  auto* rec = app.add_subcommand("reconstruct", "apply a trained filter to an image");
  std::string rec_filter, rec_in, rec_out;
  rec->add_option("--filter", rec_filter, "filter tensor")->required();
  rec->add_option("--input", rec_in, "input image (.pgm/.ppm or tensor)")->required();
  rec->add_option("--output", rec_out, "output image")->required();

  // evaluate
  auto* ev = app.add_subcommand("evaluate", "kernel and reconstruction metrics");
  ecall::EvaluateArgs eval_args;
  ev->add_option("--kernel", eval_args.kernel_path, "estimated kernel tensor")->required();
  ev->add_option("--true", eval_args.true_kernel_path, "ground-truth kernel tensor")->required();
  ev->add_option("--dataset", eval_args.dataset_dir, "dataset directory with test pairs");
  ev->add_option("--filter", eval_args.filter_path, "filter tensor for reconstruction");
  ev->add_option("--recon-dir", eval_args.recon_dir, "directory of recon_%04d.bin tensors");
  ev->add_option("--report", eval_args.out_report, "JSON report path");
  ev->add_option("--csv", eval_args.out_csv, "per-image CSV path");

  // pipeline
  auto* pipe = app.add_subcommand("pipeline", "generate -> estimate/train -> evaluate");
  pipe->add_option("--config", flags.config_path, "JSON config file");
  pipe->add_flag("--paper-scale", flags.paper_scale, "paper-scale defaults (slow)");
  add_dataset_flags(pipe, cfg);
  pipe->add_option("--mode", cfg.mode, "closed-form | phase1 | train");
  pipe->add_option("--dataset", cfg.dataset_dir, "reuse an existing dataset directory");
  pipe->add_option("--out", cfg.out_dir, "output directory");

  CLI11_PARSE(app, argc, argv);

  return ecall::guarded([&] {
    ecall::set_threads(threads);

    // Precedence: CLI flag > config file > built-in default. Flags write
    // straight into cfg; a config file supplies the base for everything the
    // user did not set on the command line.
    if (!flags.config_path.empty() || flags.paper_scale) {
      CLI::App* active = app.get_subcommands().front();
      auto user_set = [&](const std::string& name) {
        return active->get_option_no_throw(name) && active->count(name) > 0;
      };
      EcallConfig merged = base_config(flags);
      if (user_set("--n")) merged.dataset_n = cfg.dataset_n;
      if (user_set("--test-n")) merged.test_n = cfg.test_n;
      if (user_set("--image-size")) merged.image_size = cfg.image_size;
      if (user_set("--channels")) merged.channels = cfg.channels;
      if (user_set("--kernel")) merged.kernel_preset = cfg.kernel_preset;
      if (user_set("--kernel-std")) merged.kernel_std = cfg.kernel_std;
      if (user_set("--kernel-size")) merged.kernel_size = cfg.kernel_size;
      if (user_set("--noise")) merged.noise_frac = cfg.noise_frac;
      if (user_set("--seed")) merged.seed = cfg.seed;
      if (user_set("--mode")) merged.mode = cfg.mode;
      if (user_set("--dataset")) merged.dataset_dir = cfg.dataset_dir;
      if (user_set("--out")) merged.out_dir = cfg.out_dir;
      cfg = merged;
    }
    cfg.threads = threads;

    if (gen->parsed()) {
      ecall::run_generate(cfg, gen_out);
    } else if (est->parsed()) {
      const fs::path out_path(est_out);
      const std::string out_dir = out_path.has_parent_path() ? out_path.parent_path().string() : ".";
      ecall::run_estimate(cfg, est_dataset, out_dir);
      const fs::path produced = fs::path(out_dir) / "kernel.bin";
      if (fs::absolute(produced) != fs::absolute(out_path)) {
        fs::rename(produced, out_path);
      }
    } else if (train->parsed()) {
      EcallConfig run_cfg = cfg;
      const bool p1 = phases.find('1') != std::string::npos;
      const bool p2 = phases.find('2') != std::string::npos;
      const bool p3 = phases.find('3') != std::string::npos;
      if (!p1) run_cfg.phase1.iterations = 0;
      if (!p2) run_cfg.phase2.iterations = 0;
      if (!p3) run_cfg.phase3.iterations = 0;
      ecall::run_train(run_cfg, train_dataset, train_out);
    } else if (rec->parsed()) {
      ecall::run_reconstruct(rec_filter, rec_in, rec_out);
    } else if (ev->parsed()) {
      ecall::run_evaluate(eval_args);
    } else if (pipe->parsed()) {
      ecall::run_pipeline(cfg);
    }
  });
}
