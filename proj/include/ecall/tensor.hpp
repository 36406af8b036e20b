#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "ecall/errors.hpp"

namespace ecall {

using complexd = std::complex<double>;

// Real-valued c x H x W pixel grid, row-major per channel. Natural images live
// in [0,1]; noise images may be negative.
class Image {
 public:
  Image() = default;
  Image(int channels, int height, int width);
  Image(int channels, int height, int width, std::vector<double> values);

  int channels() const { return channels_; }
  int height() const { return height_; }
  int width() const { return width_; }
  std::size_t size() const { return data_.size(); }

  double& at(int c, int y, int x) { return data_[(static_cast<std::size_t>(c) * height_ + y) * width_ + x]; }
  double at(int c, int y, int x) const { return data_[(static_cast<std::size_t>(c) * height_ + y) * width_ + x]; }

  double* channel(int c) { return data_.data() + static_cast<std::size_t>(c) * height_ * width_; }
  const double* channel(int c) const { return data_.data() + static_cast<std::size_t>(c) * height_ * width_; }

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }

  bool same_shape(const Image& other) const {
    return channels_ == other.channels_ && height_ == other.height_ && width_ == other.width_;
  }

  double max_value() const;
  void ensure_finite() const;

 private:
  int channels_ = 0, height_ = 0, width_ = 0;
  std::vector<double> data_;
};

// Complex-valued c x H x W frequency grid, unnormalized forward-DFT convention.
class Spectrum {
 public:
  Spectrum() = default;
  Spectrum(int channels, int height, int width);
  Spectrum(int channels, int height, int width, std::vector<complexd> values);

  int channels() const { return channels_; }
  int height() const { return height_; }
  int width() const { return width_; }
  std::size_t size() const { return data_.size(); }

  complexd& at(int c, int u, int v) { return data_[(static_cast<std::size_t>(c) * height_ + u) * width_ + v]; }
  complexd at(int c, int u, int v) const { return data_[(static_cast<std::size_t>(c) * height_ + u) * width_ + v]; }

  complexd* channel(int c) { return data_.data() + static_cast<std::size_t>(c) * height_ * width_; }
  const complexd* channel(int c) const { return data_.data() + static_cast<std::size_t>(c) * height_ * width_; }

  std::span<complexd> data() { return data_; }
  std::span<const complexd> data() const { return data_; }

  bool same_shape(const Spectrum& other) const {
    return channels_ == other.channels_ && height_ == other.height_ && width_ == other.width_;
  }

 private:
  int channels_ = 0, height_ = 0, width_ = 0;
  std::vector<complexd> data_;
};

// s x s real weight grid with odd s, applied identically to every channel.
class Kernel {
 public:
  Kernel() = default;
  explicit Kernel(int size);
  Kernel(int size, std::vector<double> weights);

  int size() const { return size_; }
  int center() const { return size_ / 2; }

  double& at(int i, int j) { return weights_[static_cast<std::size_t>(i) * size_ + j]; }
  double at(int i, int j) const { return weights_[static_cast<std::size_t>(i) * size_ + j]; }

  std::span<double> weights() { return weights_; }
  std::span<const double> weights() const { return weights_; }

  double sum() const;
  double squared_norm() const;

  // Identity convolution: 1 at the center tap.
  static Kernel delta(int size);

 private:
  int size_ = 0;
  std::vector<double> weights_;
};

inline int wrap_index(int v, int n) {
  const int r = v % n;
  return r < 0 ? r + n : r;
}

}  // namespace ecall
