#include "wdfp/dwt.hpp"

#include <algorithm>
#include <string>

namespace wdfp {
namespace {

WaveletFilter make_db4() {
  // Daubechies 4 (8 taps) decomposition low-pass; high-pass is the
  // alternating-sign reversal.
  std::vector<double> lo{-0.010597401785069032, 0.0328830116668852,   0.030841381835560764,
                         -0.18703481171909309,  -0.027983769416859854, 0.6308807679298589,
                         0.7148465705529157,    0.2303778133088965};
  std::vector<double> hi(lo.size());
  for (std::size_t t = 0; t < lo.size(); ++t) {
    const double sign = (t % 2 == 0) ? -1.0 : 1.0;
    hi[t] = sign * lo[lo.size() - 1 - t];
  }
  return {std::move(lo), std::move(hi)};
}

// Output k reads x[(2k + shift - t) mod n]; shift = taps/2 reproduces the
// usual periodization alignment.
inline std::size_t wrap(std::ptrdiff_t i, std::size_t n) {
  const auto m = static_cast<std::ptrdiff_t>(n);
  i %= m;
  return static_cast<std::size_t>(i < 0 ? i + m : i);
}

void check_divisible(std::size_t rows, std::size_t cols, int levels) {
  if (levels < 1) throw Error(ErrorCode::BadDimensions, "DWT needs at least one level");
  if (levels > 30) throw Error(ErrorCode::BadDimensions, "DWT level count out of range");
  const std::size_t block = std::size_t{1} << levels;
  if (rows == 0 || cols == 0 || rows % block != 0 || cols % block != 0) {
    throw Error(ErrorCode::BadDimensions, std::to_string(rows) + "x" + std::to_string(cols) +
                                              " is not divisible by 2^" + std::to_string(levels));
  }
}

// Filters every row of `in` (length cols) into [low | high] halves.
void analyze_rows(const ImagePlane& in, const WaveletFilter& f, ImagePlane& low,
                  ImagePlane& high) {
  const std::size_t half = in.cols() / 2;
  low = ImagePlane(in.rows(), half);
  high = ImagePlane(in.rows(), half);
  for (std::size_t r = 0; r < in.rows(); ++r) {
    dwt1_forward(in.row(r), f, low.row(r), high.row(r));
  }
}

// Column pass done a full row at a time so the inner loop stays contiguous.
void analyze_cols(const ImagePlane& in, const WaveletFilter& f, ImagePlane& low,
                  ImagePlane& high) {
  const std::size_t n = in.rows();
  const std::size_t half = n / 2;
  const std::size_t cols = in.cols();
  const auto taps = static_cast<std::ptrdiff_t>(f.lowpass.size());
  const std::ptrdiff_t shift = taps / 2;
  low = ImagePlane(half, cols);
  high = ImagePlane(half, cols);
  for (std::size_t k = 0; k < half; ++k) {
    auto lo_row = low.row(k);
    auto hi_row = high.row(k);
    for (std::ptrdiff_t t = 0; t < taps; ++t) {
      const auto src = in.row(wrap(static_cast<std::ptrdiff_t>(2 * k) + shift - t, n));
      const double hl = f.lowpass[t];
      const double hh = f.highpass[t];
      for (std::size_t c = 0; c < cols; ++c) {
        lo_row[c] += hl * src[c];
        hi_row[c] += hh * src[c];
      }
    }
  }
}

ImagePlane synthesize_cols(const ImagePlane& low, const ImagePlane& high, const WaveletFilter& f) {
  const std::size_t half = low.rows();
  const std::size_t n = 2 * half;
  const std::size_t cols = low.cols();
  const auto taps = static_cast<std::ptrdiff_t>(f.lowpass.size());
  const std::ptrdiff_t shift = taps / 2;
  ImagePlane out(n, cols);
  for (std::size_t k = 0; k < half; ++k) {
    const auto lo_row = low.row(k);
    const auto hi_row = high.row(k);
    for (std::ptrdiff_t t = 0; t < taps; ++t) {
      auto dst = out.row(wrap(static_cast<std::ptrdiff_t>(2 * k) + shift - t, n));
      const double hl = f.lowpass[t];
      const double hh = f.highpass[t];
      for (std::size_t c = 0; c < cols; ++c) dst[c] += hl * lo_row[c] + hh * hi_row[c];
    }
  }
  return out;
}

ImagePlane synthesize_rows(const ImagePlane& low, const ImagePlane& high, const WaveletFilter& f) {
  ImagePlane out(low.rows(), 2 * low.cols());
  for (std::size_t r = 0; r < low.rows(); ++r) {
    dwt1_inverse(low.row(r), high.row(r), f, out.row(r));
  }
  return out;
}

}  // namespace

Wavelet parse_wavelet(std::string_view name) {
  if (name == "db4") return Wavelet::Db4;
  throw Error(ErrorCode::UnknownWavelet, std::string(name));
}

std::string_view wavelet_name(Wavelet w) {
  switch (w) {
    case Wavelet::Db4: return "db4";
  }
  return "unknown";
}

const WaveletFilter& wavelet_filter(Wavelet w) {
  static const WaveletFilter db4 = make_db4();
  switch (w) {
    case Wavelet::Db4: return db4;
  }
  throw Error(ErrorCode::UnknownWavelet, "unsupported wavelet id");
}

void dwt1_forward(std::span<const double> x, const WaveletFilter& f, std::span<double> approx,
                  std::span<double> detail) {
  const std::size_t n = x.size();
  const auto taps = static_cast<std::ptrdiff_t>(f.lowpass.size());
  const std::ptrdiff_t shift = taps / 2;
  for (std::size_t k = 0; k < n / 2; ++k) {
    double a = 0.0, d = 0.0;
    for (std::ptrdiff_t t = 0; t < taps; ++t) {
      const double v = x[wrap(static_cast<std::ptrdiff_t>(2 * k) + shift - t, n)];
      a += f.lowpass[t] * v;
      d += f.highpass[t] * v;
    }
    approx[k] = a;
    detail[k] = d;
  }
}

void dwt1_inverse(std::span<const double> approx, std::span<const double> detail,
                  const WaveletFilter& f, std::span<double> x) {
  const std::size_t n = x.size();
  const auto taps = static_cast<std::ptrdiff_t>(f.lowpass.size());
  const std::ptrdiff_t shift = taps / 2;
  std::fill(x.begin(), x.end(), 0.0);
  for (std::size_t k = 0; k < n / 2; ++k) {
    for (std::ptrdiff_t t = 0; t < taps; ++t) {
      x[wrap(static_cast<std::ptrdiff_t>(2 * k) + shift - t, n)] +=
          f.lowpass[t] * approx[k] + f.highpass[t] * detail[k];
    }
  }
}

WaveletPyramid dwt2_forward(const ImagePlane& plane, int levels, Wavelet wavelet) {
  check_divisible(plane.rows(), plane.cols(), levels);
  const WaveletFilter& f = wavelet_filter(wavelet);
  WaveletPyramid out;
  out.rows = plane.rows();
  out.cols = plane.cols();
  out.wavelet = wavelet;
  out.levels.reserve(levels);

  ImagePlane current = plane;
  for (int j = 0; j < levels; ++j) {
    ImagePlane row_low, row_high;
    analyze_rows(current, f, row_low, row_high);
    DetailLevel level;
    ImagePlane approx;
    analyze_cols(row_low, f, approx, level.horizontal);
    analyze_cols(row_high, f, level.vertical, level.diagonal);
    out.levels.push_back(std::move(level));
    current = std::move(approx);
  }
  out.approx = std::move(current);
  return out;
}

WaveletPyramid dwt2_forward(const ImagePlane& plane, int levels, std::string_view wavelet) {
  return dwt2_forward(plane, levels, parse_wavelet(wavelet));
}

ImagePlane dwt2_inverse(const WaveletPyramid& pyramid) {
  const int levels = pyramid.depth();
  check_divisible(pyramid.rows, pyramid.cols, levels);
  const WaveletFilter& f = wavelet_filter(pyramid.wavelet);

  auto expect = [](const ImagePlane& p, std::size_t r, std::size_t c, const char* what) {
    if (p.rows() != r || p.cols() != c) {
      throw Error(ErrorCode::InconsistentPyramid,
                  std::string(what) + " is " + std::to_string(p.rows()) + "x" +
                      std::to_string(p.cols()) + ", expected " + std::to_string(r) + "x" +
                      std::to_string(c));
    }
  };
  expect(pyramid.approx, pyramid.rows >> levels, pyramid.cols >> levels, "cA");

  ImagePlane current = pyramid.approx;
  for (int j = levels - 1; j >= 0; --j) {
    const DetailLevel& level = pyramid.levels[j];
    const std::size_t r = pyramid.rows >> (j + 1);
    const std::size_t c = pyramid.cols >> (j + 1);
    expect(level.horizontal, r, c, "cH");
    expect(level.vertical, r, c, "cV");
    expect(level.diagonal, r, c, "cD");
    ImagePlane row_low = synthesize_cols(current, level.horizontal, f);
    ImagePlane row_high = synthesize_cols(level.vertical, level.diagonal, f);
    current = synthesize_rows(row_low, row_high, f);
  }
  return current;
}

}  // namespace wdfp
