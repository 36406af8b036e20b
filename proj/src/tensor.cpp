#include "ecall/tensor.hpp"

#include <cmath>
#include <utility>

namespace ecall {

namespace {

void check_dims(int channels, int height, int width) {
  if (channels <= 0 || height <= 0 || width <= 0) {
    throw DimensionMismatch("channels, height and width must be positive");
  }
}

}  // namespace

Image::Image(int channels, int height, int width)
    : channels_(channels), height_(height), width_(width) {
  check_dims(channels, height, width);
  data_.assign(static_cast<std::size_t>(channels) * height * width, 0.0);
}

Image::Image(int channels, int height, int width, std::vector<double> values)
    : channels_(channels), height_(height), width_(width), data_(std::move(values)) {
  check_dims(channels, height, width);
  if (data_.size() != static_cast<std::size_t>(channels) * height * width) {
    throw DimensionMismatch("data length does not equal channels*height*width");
  }
  ensure_finite();
}

double Image::max_value() const {
  double m = data_.empty() ? 0.0 : data_[0];
  for (double v : data_) m = std::max(m, v);
  return m;
}

void Image::ensure_finite() const {
  for (double v : data_) {
    if (!std::isfinite(v)) throw DataError("image contains a non-finite value");
  }
}

Spectrum::Spectrum(int channels, int height, int width)
    : channels_(channels), height_(height), width_(width) {
  check_dims(channels, height, width);
  data_.assign(static_cast<std::size_t>(channels) * height * width, complexd{});
}

Spectrum::Spectrum(int channels, int height, int width, std::vector<complexd> values)
    : channels_(channels), height_(height), width_(width), data_(std::move(values)) {
  check_dims(channels, height, width);
  if (data_.size() != static_cast<std::size_t>(channels) * height * width) {
    throw DimensionMismatch("data length does not equal channels*height*width");
  }
}

Kernel::Kernel(int size) : size_(size) {
  if (size <= 0 || size % 2 == 0) throw EvenSize();
  weights_.assign(static_cast<std::size_t>(size) * size, 0.0);
}

Kernel::Kernel(int size, std::vector<double> weights) : size_(size), weights_(std::move(weights)) {
  if (size <= 0 || size % 2 == 0) throw EvenSize();
  if (weights_.size() != static_cast<std::size_t>(size) * size) {
    throw DimensionMismatch("kernel weights length does not equal size*size");
  }
  for (double v : weights_) {
    if (!std::isfinite(v)) throw DataError("kernel contains a non-finite value");
  }
}

double Kernel::sum() const {
  double s = 0;
  for (double v : weights_) s += v;
  return s;
}

double Kernel::squared_norm() const {
  double s = 0;
  for (double v : weights_) s += v * v;
  return s;
}

Kernel Kernel::delta(int size) {
  Kernel k(size);
  k.at(k.center(), k.center()) = 1.0;
  return k;
}

}  // namespace ecall
