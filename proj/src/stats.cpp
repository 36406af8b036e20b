#include "ecall/stats.hpp"

#include <cmath>
#include <fstream>
#include <limits>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <nlohmann/json.hpp>

#include "ecall/fft.hpp"
#include "ecall/io.hpp"

namespace ecall {

ExpectationBundle& accumulate(ExpectationBundle& bundle, const Image& img) {
  Spectrum spec = fft2(img);
  if (bundle.empty()) {
    bundle.mean_spectrum = std::move(spec);
    bundle.mean_abs_spectrum.resize(bundle.mean_spectrum.size());
    for (std::size_t i = 0; i < bundle.mean_abs_spectrum.size(); ++i) {
      bundle.mean_abs_spectrum[i] = std::abs(bundle.mean_spectrum.data()[i]);
    }
    bundle.mean_image = img;
    bundle.count = 1;
    return bundle;
  }
  if (!bundle.mean_image.same_shape(img)) throw DimensionMismatch();
  const double inv = 1.0 / (bundle.count + 1);
  for (std::size_t i = 0; i < bundle.mean_spectrum.size(); ++i) {
    bundle.mean_spectrum.data()[i] += (spec.data()[i] - bundle.mean_spectrum.data()[i]) * inv;
    bundle.mean_abs_spectrum[i] += (std::abs(spec.data()[i]) - bundle.mean_abs_spectrum[i]) * inv;
  }
  for (std::size_t i = 0; i < bundle.mean_image.size(); ++i) {
    bundle.mean_image.data()[i] += (img.data()[i] - bundle.mean_image.data()[i]) * inv;
  }
  bundle.count += 1;
  return bundle;
}

ExpectationBundle merge(const ExpectationBundle& a, const ExpectationBundle& b) {
  if (a.empty()) return b;
  if (b.empty()) return a;
  if (!a.mean_image.same_shape(b.mean_image)) throw DimensionMismatch();
  ExpectationBundle out = a;
  const double wa = static_cast<double>(a.count) / (a.count + b.count);
  const double wb = static_cast<double>(b.count) / (a.count + b.count);
  for (std::size_t i = 0; i < out.mean_spectrum.size(); ++i) {
    out.mean_spectrum.data()[i] = wa * a.mean_spectrum.data()[i] + wb * b.mean_spectrum.data()[i];
    out.mean_abs_spectrum[i] = wa * a.mean_abs_spectrum[i] + wb * b.mean_abs_spectrum[i];
  }
  for (std::size_t i = 0; i < out.mean_image.size(); ++i) {
    out.mean_image.data()[i] = wa * a.mean_image.data()[i] + wb * b.mean_image.data()[i];
  }
  out.count = a.count + b.count;
  return out;
}

ExpectationBundle bundle_of(std::span<const Image> images) {
  if (images.empty()) throw EmptyCollection();
  int chunks = 1;
#ifdef _OPENMP
#pragma omp parallel
  {
#pragma omp single
    chunks = omp_get_num_threads();
  }
#endif
  chunks = std::min<std::size_t>(chunks, images.size());
  std::vector<ExpectationBundle> partial(chunks);
#pragma omp parallel for schedule(static) num_threads(chunks)
  for (int c = 0; c < chunks; ++c) {
    const std::size_t lo = images.size() * c / chunks;
    const std::size_t hi = images.size() * (c + 1) / chunks;
    for (std::size_t i = lo; i < hi; ++i) accumulate(partial[c], images[i]);
  }
  ExpectationBundle out = std::move(partial[0]);
  for (int c = 1; c < chunks; ++c) out = merge(out, partial[c]);
  return out;
}

double jensen_violation(const ExpectationBundle& bundle) {
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < bundle.mean_spectrum.size(); ++i) {
    worst = std::max(worst, std::abs(bundle.mean_spectrum.data()[i]) - bundle.mean_abs_spectrum[i]);
  }
  return worst;
}

void save_bundle(const ExpectationBundle& bundle, const std::string& path_prefix,
                 const std::string& provenance) {
  if (bundle.empty()) throw EmptyCollection();
  save_spectrum(bundle.mean_spectrum, path_prefix + ".mean_spectrum.bin");
  Image abs_img(bundle.channels(), bundle.height(), bundle.width(),
                std::vector<double>(bundle.mean_abs_spectrum));
  save_image(abs_img, path_prefix + ".mean_abs.bin");
  save_image(bundle.mean_image, path_prefix + ".mean_image.bin");
  nlohmann::ordered_json side;
  side["count"] = bundle.count;
  side["provenance"] = provenance;
  std::ofstream out(path_prefix + ".json");
  if (!out) throw DataError("cannot write bundle sidecar: " + path_prefix + ".json");
  out << side.dump(2) << "\n";
}

ExpectationBundle load_bundle(const std::string& path_prefix) {
  ExpectationBundle b;
  b.mean_spectrum = load_spectrum(path_prefix + ".mean_spectrum.bin");
  Image abs_img = load_image(path_prefix + ".mean_abs.bin");
  b.mean_abs_spectrum.assign(abs_img.data().begin(), abs_img.data().end());
  b.mean_image = load_image(path_prefix + ".mean_image.bin");
  std::ifstream in(path_prefix + ".json");
  if (!in) throw DataError("cannot read bundle sidecar: " + path_prefix + ".json");
  nlohmann::json side = nlohmann::json::parse(in);
  b.count = side.at("count").get<long>();
  return b;
}

}  // namespace ecall
