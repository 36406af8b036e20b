#pragma once

#include <span>
#include <utility>
#include <vector>

#include "ecall/rng.hpp"
#include "ecall/tensor.hpp"

namespace ecall {

// Unpaired training collections plus a held-out paired test set. The three
// source-image subsets behind originals, observations and test are pairwise
// disjoint; noises are freshly sampled fields.
struct DatasetSplits {
  std::vector<Image> originals;
  std::vector<Image> observations;
  std::vector<Image> noises;
  std::vector<std::pair<Image, Image>> test;  // (original, observation)

  // Source indices for bookkeeping / manifests; observations_src[i] is the
  // index of the hidden source behind observations[i].
  std::vector<int> originals_src, observations_src, test_src;
};

// Isotropic Gaussian, point-evaluated on the integer grid, truncated to
// size x size and normalized to unit sum.
Kernel gaussian_kernel(double std_dev, int size);

// observation = convolve_periodic(img, k) + noise, with i.i.d. zero-mean
// Gaussian noise of standard deviation noise_frac * max(img). The noise field
// is returned separately.
std::pair<Image, Image> blur_and_noise(const Image& img, const Kernel& k, double noise_frac,
                                       Rng& rng);

// Shuffles the sources and partitions them into disjoint subsets of size
// n (originals), n (observation sources) and test_n (test sources); blurs and
// noises the latter two with the ground-truth kernel; samples n fresh noise
// fields with standard deviation noise_frac * 1.0 ([0,1]-normalized images).
DatasetSplits make_splits(std::span<const Image> source_images, int n, int test_n,
                          const Kernel& k_true, double noise_frac, Rng& rng);
// Paper-style overload: test subset of size n as well.
DatasetSplits make_splits(std::span<const Image> source_images, int n, const Kernel& k_true,
                          double noise_frac, Rng& rng);

// Random mixtures of smoothed noise, gradients and soft ellipses on a nonzero
// base level, plus a fixed broadband pattern, clipped to [0,1]. The fixed
// pattern keeps |E[F(x)]| well away from zero on every frequency.
std::vector<Image> synthetic_textures(int count, int height, int width, Rng& rng);

}  // namespace ecall
