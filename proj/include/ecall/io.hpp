#pragma once

#include <string>

#include "ecall/filter.hpp"
#include "ecall/tensor.hpp"

namespace ecall {

// Flat binary tensor file: 16-byte header ("ECALL.TENSOR" + u32 LE version),
// one UTF-8 JSON metadata line ({"dtype":"f64","shape":[c,h,w]}), then raw
// little-endian values. Complex tensors use dtype "c128" with interleaved
// re,im pairs.
void save_image(const Image& img, const std::string& path);
Image load_image(const std::string& path);

void save_kernel(const Kernel& k, const std::string& path);  // shape [1,s,s]
Kernel load_kernel(const std::string& path);

void save_spectrum(const Spectrum& s, const std::string& path);
Spectrum load_spectrum(const std::string& path);

void save_filter(const SpectralFilter& f, const std::string& path);  // c128 [1,h,w]
SpectralFilter load_filter(const std::string& path);

// 8-bit binary PGM (P5, grayscale) and PPM (P6, color); pixel values map
// linearly between [0,1] and 0..maxval.
void save_pnm(const Image& img, const std::string& path);
Image load_pnm(const std::string& path);

// Reads/writes by extension: .pgm/.ppm as PNM, anything else as tensor.
void save_image_auto(const Image& img, const std::string& path);
Image load_image_auto(const std::string& path);

// FNV-1a 64-bit content hash, as a fixed-width hex string.
std::string file_hash(const std::string& path);

}  // namespace ecall
