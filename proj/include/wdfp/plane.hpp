#pragma once

#include <algorithm>
#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "wdfp/error.hpp"

namespace wdfp {

/// Dense row-major 2-D array. Used for image channels, wavelet subbands and
/// spectra alike.
template <typename T>
class Plane {
 public:
  using value_type = T;

  Plane() = default;
  Plane(std::size_t rows, std::size_t cols, T fill = T{})
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Plane(std::size_t rows, std::size_t cols, std::vector<T> data)
      : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows_ * cols_) {
      throw Error(ErrorCode::DimensionMismatch, "plane data does not match rows*cols");
    }
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  T& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
  const T& operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }

  std::span<T> row(std::size_t r) noexcept { return {data_.data() + r * cols_, cols_}; }
  std::span<const T> row(std::size_t r) const noexcept { return {data_.data() + r * cols_, cols_}; }

  std::span<T> values() noexcept { return data_; }
  std::span<const T> values() const noexcept { return data_; }
  T* data() noexcept { return data_.data(); }
  const T* data() const noexcept { return data_.data(); }

  bool same_shape(const Plane& other) const noexcept {
    return rows_ == other.rows_ && cols_ == other.cols_;
  }

  friend bool operator==(const Plane&, const Plane&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

using ImagePlane = Plane<double>;
using ComplexPlane = Plane<std::complex<double>>;

template <typename T>
Plane<T> transpose(const Plane<T>& in) {
  Plane<T> out(in.cols(), in.rows());
  constexpr std::size_t kBlock = 32;
  for (std::size_t r0 = 0; r0 < in.rows(); r0 += kBlock) {
    for (std::size_t c0 = 0; c0 < in.cols(); c0 += kBlock) {
      const std::size_t r1 = std::min(r0 + kBlock, in.rows());
      const std::size_t c1 = std::min(c0 + kBlock, in.cols());
      for (std::size_t r = r0; r < r1; ++r) {
        for (std::size_t c = c0; c < c1; ++c) out(c, r) = in(r, c);
      }
    }
  }
  return out;
}

inline ComplexPlane to_complex(const ImagePlane& in) {
  ComplexPlane out(in.rows(), in.cols());
  for (std::size_t i = 0; i < in.size(); ++i) out.data()[i] = in.data()[i];
  return out;
}

inline ImagePlane real_part(const ComplexPlane& in) {
  ImagePlane out(in.rows(), in.cols());
  for (std::size_t i = 0; i < in.size(); ++i) out.data()[i] = in.data()[i].real();
  return out;
}

}  // namespace wdfp
