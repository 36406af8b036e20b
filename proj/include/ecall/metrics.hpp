#pragma once

#include "ecall/tensor.hpp"

namespace ecall {

struct KernelScore {
  double l2err = 0;  // relative L2 error, >= 0
  double mnc = 0;    // max normalized cross-correlation, in [-1, 1]
};

struct ImageScore {
  double psnr = 0;  // dB; +infinity for identical images
  double ssim = 0;
};

// ||k_est - k_true||_2 / ||k_true||_2; the smaller kernel is zero-padded
// centrally to match.
double l2err(const Kernel& k_est, const Kernel& k_true);

// Maximum over all shifts of the cross-correlation of k_est with k_true,
// divided by the product of the L2 norms. For symmetric kernels convolution
// and correlation coincide; use_convolution flips the second argument.
double mnc(const Kernel& k_est, const Kernel& k_true, bool use_convolution = false);

// 10*log10(peak^2 / MSE) over all pixels and channels.
double psnr(const Image& a, const Image& b, double peak = 1.0);

// Mean local SSIM with an 11x11 Gaussian window (sigma 1.5), constants
// C1=(0.01*peak)^2 and C2=(0.03*peak)^2, valid window positions, computed per
// channel and averaged.
double ssim(const Image& a, const Image& b, double peak = 1.0);

KernelScore score_kernel(const Kernel& k_est, const Kernel& k_true);
ImageScore score_image(const Image& reconstruction, const Image& original, double peak = 1.0);

}  // namespace ecall
