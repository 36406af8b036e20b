#pragma once

#include <stdexcept>
#include <string>

namespace ecall {

// Error classes map onto CLI exit codes: ConfigError -> 2, DataError -> 3,
// NumericError -> 4.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DimensionMismatch : DataError {
  DimensionMismatch() : DataError("tensor dimensions do not match") {}
  explicit DimensionMismatch(const std::string& what) : DataError(what) {}
};

struct KernelLargerThanImage : DataError {
  KernelLargerThanImage() : DataError("kernel does not fit inside the image grid") {}
};

struct EvenSize : DataError {
  EvenSize() : DataError("kernel size must be odd") {}
};

struct InvalidStd : DataError {
  InvalidStd() : DataError("standard deviation must be positive") {}
};

struct InsufficientImages : DataError {
  InsufficientImages() : DataError("not enough source images for the requested splits") {}
};

struct EmptyCollection : DataError {
  EmptyCollection() : DataError("collection is empty") {}
};

struct ImageTooSmall : DataError {
  ImageTooSmall() : DataError("image is smaller than the metric window") {}
};

struct ZeroKernel : DataError {
  ZeroKernel() : DataError("kernel has zero norm") {}
};

struct ZeroTrueKernel : DataError {
  ZeroTrueKernel() : DataError("reference kernel has zero norm") {}
};

struct NonNegligibleImaginaryPart : NumericError {
  NonNegligibleImaginaryPart()
      : NumericError("inverse transform of a real-originated spectrum has a non-negligible "
                     "imaginary part") {}
  explicit NonNegligibleImaginaryPart(const std::string& what) : NumericError(what) {}
};

struct DegenerateDenominator : NumericError {
  DegenerateDenominator()
      : NumericError("|E[x^]| is below eps on most frequencies; the spectral division is "
                     "meaningless") {}
};

}  // namespace ecall
