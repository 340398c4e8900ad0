#pragma once

#include <array>
#include <cstdint>
#include <string_view>
#include <vector>

#include "wdfp/plane.hpp"

namespace wdfp {

enum class Wavelet : std::uint8_t { Db4 = 0 };

/// Orthonormal two-channel filter bank (analysis low/high pass).
struct WaveletFilter {
  std::vector<double> lowpass;
  std::vector<double> highpass;
};

Wavelet parse_wavelet(std::string_view name);
std::string_view wavelet_name(Wavelet w);
const WaveletFilter& wavelet_filter(Wavelet w);

/// Detail subbands of one decomposition level. `horizontal` is high-pass
/// down the columns and low-pass along the rows (pywt's cH), `vertical` the
/// transpose pairing, `diagonal` high-pass in both directions.
struct DetailLevel {
  ImagePlane horizontal;
  ImagePlane vertical;
  ImagePlane diagonal;
};

/// levels[0] is the finest scale (j = 1); approx is cA at the coarsest.
struct WaveletPyramid {
  ImagePlane approx;
  std::vector<DetailLevel> levels;
  std::size_t rows = 0;
  std::size_t cols = 0;
  Wavelet wavelet = Wavelet::Db4;

  int depth() const noexcept { return static_cast<int>(levels.size()); }
};

/// Separable periodized DWT: convolve-and-decimate along rows, then along
/// columns, repeated on cA. Both plane sides must be divisible by 2^levels.
WaveletPyramid dwt2_forward(const ImagePlane& plane, int levels, Wavelet wavelet = Wavelet::Db4);
WaveletPyramid dwt2_forward(const ImagePlane& plane, int levels, std::string_view wavelet);

ImagePlane dwt2_inverse(const WaveletPyramid& pyramid);

/// 1-D periodized analysis/synthesis, exposed for the dense-matrix tests.
void dwt1_forward(std::span<const double> x, const WaveletFilter& f, std::span<double> approx,
                  std::span<double> detail);
void dwt1_inverse(std::span<const double> approx, std::span<const double> detail,
                  const WaveletFilter& f, std::span<double> x);

}  // namespace wdfp
