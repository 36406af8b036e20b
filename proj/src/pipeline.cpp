#include "ecall/pipeline.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>

#include <nlohmann/json.hpp>

#include "ecall/fft.hpp"
#include "ecall/io.hpp"
#include "ecall/metrics.hpp"

namespace ecall {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

std::string index_name(const char* stem, int i) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%s_%04d.bin", stem, i);
  return buf;
}

void write_json(const ordered_json& j, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path);
  out << j.dump(2) << "\n";
}

ordered_json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot read " + path);
  try {
    return ordered_json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw DataError("malformed JSON in " + path + ": " + e.what());
  }
}

// JSON has no infinity; PSNR of identical images is reported as the string
// "inf".
ordered_json json_metric(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

}  // namespace

void run_generate(const EcallConfig& cfg_in, const std::string& dataset_dir) {
  EcallConfig cfg = cfg_in;
  cfg.apply_kernel_preset();
  if (cfg.dataset_n <= 0 || cfg.test_n < 0) throw ConfigError("dataset sizes must be positive");
  if (cfg.kernel_size > cfg.image_size) throw ConfigError("kernel larger than image size");

  const Kernel k_true = gaussian_kernel(cfg.kernel_std, cfg.kernel_size);
  Rng rng(cfg.seed);
  const int source_count = 2 * cfg.dataset_n + cfg.test_n;
  const std::vector<Image> sources =
      synthetic_textures(source_count, cfg.image_size, cfg.image_size, rng);
  const DatasetSplits splits =
      make_splits(sources, cfg.dataset_n, cfg.test_n, k_true, cfg.noise_frac, rng);

  fs::create_directories(dataset_dir);
  for (const char* sub : {"originals", "observations", "noises", "test"}) {
    fs::create_directories(fs::path(dataset_dir) / sub);
  }

  ordered_json files = ordered_json::array();
  auto save_and_hash = [&](const Image& img, const std::string& rel) {
    const std::string full = (fs::path(dataset_dir) / rel).string();
    save_image(img, full);
    files.push_back({{"path", rel}, {"hash", file_hash(full)}});
  };

  save_kernel(k_true, (fs::path(dataset_dir) / "kernel_true.bin").string());
  files.push_back(
      {{"path", "kernel_true.bin"},
       {"hash", file_hash((fs::path(dataset_dir) / "kernel_true.bin").string())}});

  for (int i = 0; i < cfg.dataset_n; ++i) {
    save_and_hash(splits.originals[i], "originals/" + index_name("original", i));
    save_and_hash(splits.observations[i], "observations/" + index_name("observed", i));
    save_and_hash(splits.noises[i], "noises/" + index_name("noise", i));
  }
  for (int i = 0; i < cfg.test_n; ++i) {
    save_and_hash(splits.test[i].first, "test/" + index_name("original", i));
    save_and_hash(splits.test[i].second, "test/" + index_name("observed", i));
  }

  ordered_json manifest;
  manifest["format"] = "ecall-dataset";
  manifest["version"] = 1;
  manifest["seed"] = cfg.seed;
  manifest["image"] = {{"channels", cfg.channels}, {"size", cfg.image_size}};
  manifest["kernel"] = {{"preset", cfg.kernel_preset},
                        {"std", cfg.kernel_std},
                        {"size", cfg.kernel_size}};
  manifest["noise_frac"] = cfg.noise_frac;
  manifest["counts"] = {{"originals", cfg.dataset_n},
                        {"observations", cfg.dataset_n},
                        {"noises", cfg.dataset_n},
                        {"test", cfg.test_n}};
  manifest["splits"] = {{"originals_src", splits.originals_src},
                        {"observations_src", splits.observations_src},
                        {"test_src", splits.test_src}};
  manifest["files"] = files;
  write_json(manifest, (fs::path(dataset_dir) / "manifest.json").string());
}

LoadedDataset load_dataset(const std::string& dataset_dir) {
  const std::string manifest_path = (fs::path(dataset_dir) / "manifest.json").string();
  const ordered_json manifest = read_json(manifest_path);
  if (!manifest.contains("format") || manifest["format"] != "ecall-dataset") {
    throw DataError("not an ecall dataset: " + dataset_dir);
  }
  LoadedDataset d;
  d.manifest_hash = file_hash(manifest_path);
  d.noise_frac = manifest.at("noise_frac").get<double>();
  d.true_kernel = load_kernel((fs::path(dataset_dir) / "kernel_true.bin").string());
  const int n = manifest.at("counts").at("originals").get<int>();
  const int test_n = manifest.at("counts").at("test").get<int>();
  d.splits.originals.reserve(n);
  d.splits.observations.reserve(n);
  d.splits.noises.reserve(n);
  for (int i = 0; i < n; ++i) {
    d.splits.originals.push_back(
        load_image((fs::path(dataset_dir) / "originals" / index_name("original", i)).string()));
    d.splits.observations.push_back(load_image(
        (fs::path(dataset_dir) / "observations" / index_name("observed", i)).string()));
    d.splits.noises.push_back(
        load_image((fs::path(dataset_dir) / "noises" / index_name("noise", i)).string()));
  }
  d.splits.test.reserve(test_n);
  for (int i = 0; i < test_n; ++i) {
    Image orig = load_image((fs::path(dataset_dir) / "test" / index_name("original", i)).string());
    Image obs = load_image((fs::path(dataset_dir) / "test" / index_name("observed", i)).string());
    d.splits.test.emplace_back(std::move(orig), std::move(obs));
  }
  if (manifest.contains("splits")) {
    const auto& s = manifest["splits"];
    d.splits.originals_src = s.at("originals_src").get<std::vector<int>>();
    d.splits.observations_src = s.at("observations_src").get<std::vector<int>>();
    d.splits.test_src = s.at("test_src").get<std::vector<int>>();
  }
  return d;
}

Kernel run_estimate(const EcallConfig& cfg, const std::string& dataset_dir,
                    const std::string& out_dir) {
  if (cfg.mode != "closed-form" && cfg.mode != "phase1") {
    throw ConfigError("estimate mode must be closed-form or phase1");
  }
  const LoadedDataset data = load_dataset(dataset_dir);
  fs::create_directories(out_dir);

  ordered_json report;
  report["mode"] = cfg.mode;
  report["dataset"] = dataset_dir;
  report["dataset_manifest_hash"] = data.manifest_hash;
  report["config"] = ordered_json::parse(cfg.to_json());

  Kernel k_est;
  if (cfg.mode == "closed-form") {
    const ExpectationBundle xb = bundle_of(data.splits.originals);
    const ExpectationBundle yb = bundle_of(data.splits.observations);
    const double eps = cfg.closed_form_eps > 0 ? cfg.closed_form_eps : default_closed_form_eps(xb);
    k_est = closed_form_estimate(yb, xb, eps, cfg.kernel_size);
    double lo = std::numeric_limits<double>::infinity(), hi = 0, acc = 0;
    for (const complexd& z : xb.mean_spectrum.data()) {
      const double m = std::abs(z);
      lo = std::min(lo, m);
      hi = std::max(hi, m);
      acc += m;
    }
    report["eps"] = eps;
    report["ex_spectrum_abs"] = {{"min", lo},
                                 {"max", hi},
                                 {"mean", acc / static_cast<double>(xb.mean_spectrum.size())}};
  } else {
    Rng rng(cfg.seed);
    std::vector<LossRow> curve;
    k_est = phase1_estimate(data.splits, cfg, rng, &curve);
    report["iterations"] = cfg.phase1.iterations;
    report["final_loss"] = curve.empty() ? 0.0 : curve.back().total;
    TrainReport tr;
    tr.phase_curves.push_back(std::move(curve));
    save_loss_curves(tr, (fs::path(out_dir) / "loss_curves.csv").string());
  }

  const std::string kernel_path = (fs::path(out_dir) / "kernel.bin").string();
  save_kernel(k_est, kernel_path);
  report["artifacts"] = {{"kernel", {{"path", "kernel.bin"}, {"hash", file_hash(kernel_path)}}}};
  write_json(report, (fs::path(out_dir) / "report.json").string());
  return k_est;
}

TrainResult run_train(const EcallConfig& cfg, const std::string& dataset_dir,
                      const std::string& out_dir) {
  const LoadedDataset data = load_dataset(dataset_dir);
  fs::create_directories(out_dir);
  Rng rng(cfg.seed);
  TrainResult result = train_three_phase(data.splits, cfg, rng);

  const std::string kernel_path = (fs::path(out_dir) / "kernel.bin").string();
  const std::string filter_path = (fs::path(out_dir) / "filter.bin").string();
  save_kernel(result.kernel, kernel_path);
  save_filter(result.filter, filter_path);
  save_loss_curves(result.report, (fs::path(out_dir) / "loss_curves.csv").string());

  ordered_json report;
  report["mode"] = "train";
  report["dataset"] = dataset_dir;
  report["dataset_manifest_hash"] = data.manifest_hash;
  report["config"] = ordered_json::parse(cfg.to_json());
  ordered_json final_losses = ordered_json::array();
  for (const auto& curve : result.report.phase_curves) {
    final_losses.push_back(curve.empty() ? 0.0 : curve.back().total);
  }
  report["final_phase_losses"] = final_losses;
  report["artifacts"] = {
      {"kernel", {{"path", "kernel.bin"}, {"hash", file_hash(kernel_path)}}},
      {"filter", {{"path", "filter.bin"}, {"hash", file_hash(filter_path)}}},
      {"loss_curves",
       {{"path", "loss_curves.csv"},
        {"hash", file_hash((fs::path(out_dir) / "loss_curves.csv").string())}}}};
  write_json(report, (fs::path(out_dir) / "report.json").string());

  // Wall-clock timing is run-dependent; it lives outside report.json so the
  // report stays byte-identical across runs with the same seed.
  ordered_json timing;
  timing["wall_seconds"] = result.report.wall_seconds;
  write_json(timing, (fs::path(out_dir) / "timing.json").string());
  return result;
}

void run_reconstruct(const std::string& filter_path, const std::string& input_path,
                     const std::string& output_path) {
  const SpectralFilter f = load_filter(filter_path);
  const Image input = load_image_auto(input_path);
  save_image_auto(apply(f, input), output_path);
}

EvaluateResult run_evaluate(const EvaluateArgs& args) {
  EvaluateResult res;
  const Kernel k_est = load_kernel(args.kernel_path);
  const Kernel k_true = load_kernel(args.true_kernel_path);
  res.l2err = l2err(k_est, k_true);
  res.mnc = mnc(k_est, k_true);

  ordered_json report;
  report["kernel"] = {{"estimated", args.kernel_path},
                      {"true", args.true_kernel_path},
                      {"l2err", res.l2err},
                      {"mnc", res.mnc}};

  std::ofstream csv;
  if (!args.out_csv.empty()) {
    csv.open(args.out_csv);
    if (!csv) throw DataError("cannot write " + args.out_csv);
    csv << "index,psnr_recon,ssim_recon,psnr_observed,ssim_observed\n";
  }

  if (!args.dataset_dir.empty() && (!args.filter_path.empty() || !args.recon_dir.empty())) {
    const LoadedDataset data = load_dataset(args.dataset_dir);
    if (data.splits.test.empty()) throw DataError("dataset has no test pairs");
    SpectralFilter filter;
    const bool use_filter = !args.filter_path.empty();
    if (use_filter) filter = load_filter(args.filter_path);
    double ps_r = 0, ss_r = 0, ps_o = 0, ss_o = 0;
    for (std::size_t i = 0; i < data.splits.test.size(); ++i) {
      const Image& orig = data.splits.test[i].first;
      const Image& obs = data.splits.test[i].second;
      const Image recon =
          use_filter ? apply(filter, obs)
                     : load_image((fs::path(args.recon_dir) /
                                   index_name("recon", static_cast<int>(i))).string());
      const ImageScore sr = score_image(recon, orig);
      const ImageScore so = score_image(obs, orig);
      ps_r += sr.psnr;
      ss_r += sr.ssim;
      ps_o += so.psnr;
      ss_o += so.ssim;
      if (csv.is_open()) {
        char line[256];
        std::snprintf(line, sizeof(line), "%zu,%.10g,%.10g,%.10g,%.10g\n", i, sr.psnr, sr.ssim,
                      so.psnr, so.ssim);
        csv << line;
      }
    }
    const double inv = 1.0 / static_cast<double>(data.splits.test.size());
    res.mean_psnr_recon = ps_r * inv;
    res.mean_ssim_recon = ss_r * inv;
    res.mean_psnr_observed = ps_o * inv;
    res.mean_ssim_observed = ss_o * inv;
    res.has_images = true;
    report["images"] = {{"count", data.splits.test.size()},
                        {"mean_psnr_recon", json_metric(res.mean_psnr_recon)},
                        {"mean_ssim_recon", res.mean_ssim_recon},
                        {"mean_psnr_observed", json_metric(res.mean_psnr_observed)},
                        {"mean_ssim_observed", res.mean_ssim_observed}};
  }

  if (!args.out_report.empty()) write_json(report, args.out_report);
  return res;
}

EvaluateResult run_pipeline(const EcallConfig& cfg) {
  const fs::path out(cfg.out_dir);
  fs::create_directories(out);
  const std::string dataset_dir =
      cfg.dataset_dir.empty() ? (out / "data").string() : cfg.dataset_dir;
  if (cfg.dataset_dir.empty()) run_generate(cfg, dataset_dir);

  const std::string run_dir = (out / "run").string();
  bool has_filter = false;
  if (cfg.mode == "train") {
    run_train(cfg, dataset_dir, run_dir);
    has_filter = true;
  } else {
    run_estimate(cfg, dataset_dir, run_dir);
  }

  EvaluateArgs eval;
  eval.kernel_path = (fs::path(run_dir) / "kernel.bin").string();
  eval.true_kernel_path = (fs::path(dataset_dir) / "kernel_true.bin").string();
  eval.dataset_dir = dataset_dir;
  if (has_filter) eval.filter_path = (fs::path(run_dir) / "filter.bin").string();
  eval.out_report = (out / "evaluation.json").string();
  eval.out_csv = (out / "evaluation.csv").string();
  const EvaluateResult res = run_evaluate(eval);

  ordered_json report;
  report["config"] = ordered_json::parse(cfg.to_json());
  report["dataset_dir"] = dataset_dir;
  report["run_dir"] = run_dir;
  report["kernel"] = {{"l2err", res.l2err}, {"mnc", res.mnc}};
  if (res.has_images) {
    report["images"] = {{"mean_psnr_recon", json_metric(res.mean_psnr_recon)},
                        {"mean_ssim_recon", res.mean_ssim_recon},
                        {"mean_psnr_observed", json_metric(res.mean_psnr_observed)},
                        {"mean_ssim_observed", res.mean_ssim_observed}};
  }
  write_json(report, (out / "report.json").string());
  return res;
}

int guarded(const std::function<void()>& fn) {
  try {
    fn();
    return 0;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 3;
  } catch (const NumericError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace ecall
