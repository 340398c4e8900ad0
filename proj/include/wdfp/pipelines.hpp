#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "wdfp/dwt.hpp"
#include "wdfp/filters.hpp"
#include "wdfp/image_io.hpp"

namespace wdfp {

/// Extraction methods; the numeric values are the on-disk method ids.
enum class Method : std::uint8_t {
  Law = 0,
  GrayWdlaw = 1,
  RgbWdlaw = 2,
  WdlawGray = 3,
  DtcwtResidual = 4,
  DtcwtResidualAr = 5,
  LawDtcwt = 6,
  GrayWdlawDtcwt = 7,
};

inline constexpr std::array<Method, 8> kAllMethods{
    Method::Law,           Method::GrayWdlaw,       Method::RgbWdlaw, Method::WdlawGray,
    Method::DtcwtResidual, Method::DtcwtResidualAr, Method::LawDtcwt, Method::GrayWdlawDtcwt};

std::string_view method_name(Method m);
Method parse_method(std::string_view name);
std::optional<Method> method_from_id(std::uint8_t id);
bool uses_dtcwt(Method m);

/// Transform family recorded with a fingerprint (on-disk wavelet id).
enum class TransformId : std::uint8_t { Db4 = 0, DtcwtNearSymBQshiftB = 1 };

struct ExtractionConfig {
  int levels = 4;
  Wavelet wavelet = Wavelet::Db4;
  FilterConfig filter;
};

struct Fingerprint {
  Method method = Method::Law;
  std::vector<double> values;
  std::uint32_t source_size = 0;
  std::uint8_t levels = 0;
  TransformId transform = TransformId::Db4;
  double sigma_n2 = 0.0;

  std::size_t length() const noexcept { return values.size(); }
};

/// l = sum_{j=1..J} 3 (m / 2^j)^2, the number of DWT detail coefficients.
std::size_t wd_fingerprint_length(std::size_t m, int levels);

/// Length a method produces for an m x m input: m^2, l, 3l or 4l.
std::size_t expected_length(Method method, std::size_t m, int levels);

/// Runs one extraction method on a square image whose side is divisible by
/// 2^levels. Throws NonSquareInput / BadDimensions otherwise.
Fingerprint extract(Method method, const RgbImage& img, const ExtractionConfig& cfg);

Fingerprint extract_law(const RgbImage& img, const ExtractionConfig& cfg);
Fingerprint extract_gray_wdlaw(const RgbImage& img, const ExtractionConfig& cfg);
Fingerprint extract_rgb_wdlaw(const RgbImage& img, const ExtractionConfig& cfg);
Fingerprint extract_wdlaw_gray(const RgbImage& img, const ExtractionConfig& cfg);
Fingerprint extract_dtcwt_residual(const RgbImage& img, const ExtractionConfig& cfg,
                                   bool artifact_removal);
Fingerprint extract_law_dtcwt(const RgbImage& img, const ExtractionConfig& cfg);
Fingerprint extract_gray_wdlaw_dtcwt(const RgbImage& img, const ExtractionConfig& cfg);

/// Building blocks shared by the extraction methods.
namespace stage {

/// Adaptive noise estimate on every detail subband, cA zeroed, inverted.
ImagePlane dwt_noise_image(const ImagePlane& channel, const ExtractionConfig& cfg);
ImagePlane dtcwt_noise_image(const ImagePlane& channel, const ExtractionConfig& cfg);

/// Zero-mean followed by the Fourier-domain noise filter.
ImagePlane remove_artifacts(const ImagePlane& plane, const FilterConfig& cfg);

/// Per-level adaptive then Fourier filtering of detail subbands, left in
/// the wavelet domain (levels[0] finest).
std::vector<DetailLevel> wd_filtered_details(const ImagePlane& channel, const ExtractionConfig& cfg);

/// Level 1 -> J, within a level cH, cV, cD, each row-major.
void append_details(const std::vector<DetailLevel>& details, std::vector<double>& out);

}  // namespace stage

}  // namespace wdfp
