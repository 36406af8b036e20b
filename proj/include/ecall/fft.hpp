#pragma once

#include "ecall/tensor.hpp"

namespace ecall {

// In-place unnormalized 2-D DFT of a single height x width complex grid.
// inverse=true applies the conjugate transform; the caller scales by
// 1/(height*width). Mixed sizes are handled (radix-2 for powers of two,
// Bluestein otherwise). No internal shared state; safe to call concurrently.
void fft2_inplace(complexd* grid, int height, int width, bool inverse);

// Per-channel forward 2-D DFT.
Spectrum fft2(const Image& img);

// Inverse DFT with 1/(H*W) normalization. The spectrum is expected to come
// from a real image; an imaginary residue above max(1e-8, 1e-6 * max|Re|)
// signals an upstream bug and throws NonNegligibleImaginaryPart.
Image ifft2(const Spectrum& spec);

// DFT of the kernel embedded in an H x W zero grid with its center wrapped to
// index (0,0), so multiplication in frequency equals centered circular
// convolution in space. Single channel, broadcastable over image channels.
Spectrum kernel_spectrum(const Kernel& k, int height, int width);
std::vector<complexd> kernel_spectrum_grid(const Kernel& k, int height, int width);

// Centered circular convolution of every channel with k, via FFT.
Image convolve_periodic(const Image& img, const Kernel& k);

}  // namespace ecall
