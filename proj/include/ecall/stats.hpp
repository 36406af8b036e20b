#pragma once

#include <span>
#include <string>
#include <vector>

#include "ecall/tensor.hpp"

namespace ecall {

// Empirical expectation statistics over an image collection: E[F(.)],
// E[|F(.)|] and E[.]. Accumulated in double precision with running means.
struct ExpectationBundle {
  Spectrum mean_spectrum;                 // empirical E[F(.)]
  std::vector<double> mean_abs_spectrum;  // empirical E[|F(.)|], c*h*w
  Image mean_image;                       // empirical E[.]
  long count = 0;

  bool empty() const { return count == 0; }
  int channels() const { return mean_spectrum.channels(); }
  int height() const { return mean_spectrum.height(); }
  int width() const { return mean_spectrum.width(); }
};

// Running-mean update of all three statistics with one more sample.
ExpectationBundle& accumulate(ExpectationBundle& bundle, const Image& img);

// Fold of accumulate over the collection. Partial bundles are accumulated in
// parallel chunks and merged in fixed chunk order, so results are bit-stable
// for a fixed thread count.
ExpectationBundle bundle_of(std::span<const Image> images);

// Associative merge of partial bundles (weighted by counts).
ExpectationBundle merge(const ExpectationBundle& a, const ExpectationBundle& b);

// Largest violation of |mean_spectrum| <= mean_abs_spectrum over all bins
// (negative when the inequality holds strictly).
double jensen_violation(const ExpectationBundle& bundle);

// Persist as flat binary tensors plus a JSON sidecar carrying the count and a
// provenance hash of the dataset manifest.
void save_bundle(const ExpectationBundle& bundle, const std::string& path_prefix,
                 const std::string& provenance);
ExpectationBundle load_bundle(const std::string& path_prefix);

}  // namespace ecall
