#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "wdfp/plane.hpp"

namespace wdfp {

/// Six oriented subbands per level, in fingerprint concatenation order:
/// cH, cV, cD of the first tree pair then cH, cV, cD of the second
/// (orientations 15, 75, 45, 165, 105, 135 degrees).
enum class DtcwtBand : std::size_t { H1 = 0, V1, D1, H2, V2, D2 };
inline constexpr std::size_t kDtcwtBands = 6;

using DtcwtLevel = std::array<ComplexPlane, kDtcwtBands>;

/// levels[0] is the finest scale; each band there is (rows/2) x (cols/2).
/// `lowpass` is the real scaling image, which the dual tree keeps at twice
/// the decimation of the last band: (rows / 2^(J-1)) x (cols / 2^(J-1)).
struct DtcwtPyramid {
  ImagePlane lowpass;
  std::vector<DtcwtLevel> levels;
  std::size_t rows = 0;
  std::size_t cols = 0;

  int depth() const noexcept { return static_cast<int>(levels.size()); }
};

/// Kingsbury near_sym_b (13,19 taps) at level 1 and qshift_b (14 taps)
/// beyond, with symmetric (repeated-edge) extension.
DtcwtPyramid dtcwt_forward(const ImagePlane& plane, int levels);
ImagePlane dtcwt_inverse(const DtcwtPyramid& pyramid);

}  // namespace wdfp
