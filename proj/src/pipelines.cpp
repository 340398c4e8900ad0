#include "wdfp/pipelines.hpp"

#include <cmath>
#include <string>

#include "wdfp/dtcwt.hpp"

namespace wdfp {
namespace {

void check_input(const RgbImage& img, const ExtractionConfig& cfg) {
  if (img.width() != img.height()) {
    throw Error(ErrorCode::NonSquareInput, std::to_string(img.width()) + "x" +
                                               std::to_string(img.height()) + " input");
  }
  if (cfg.levels < 1 || cfg.levels > 30) {
    throw Error(ErrorCode::BadDimensions, "level count out of range");
  }
  const std::size_t block = std::size_t{1} << cfg.levels;
  if (img.width() % block != 0) {
    throw Error(ErrorCode::BadDimensions, "side " + std::to_string(img.width()) +
                                              " is not divisible by 2^" + std::to_string(cfg.levels));
  }
  cfg.filter.validate();
}

Fingerprint make_fingerprint(Method method, const RgbImage& img, const ExtractionConfig& cfg,
                             std::vector<double> values) {
  Fingerprint fp;
  fp.method = method;
  fp.values = std::move(values);
  fp.source_size = static_cast<std::uint32_t>(img.width());
  fp.levels = static_cast<std::uint8_t>(cfg.levels);
  fp.transform = uses_dtcwt(method) ? TransformId::DtcwtNearSymBQshiftB : TransformId::Db4;
  fp.sigma_n2 = cfg.filter.sigma_n2;
  return fp;
}

std::vector<double> flatten(const ImagePlane& plane) {
  return {plane.values().begin(), plane.values().end()};
}

ImagePlane subtract(const ImagePlane& a, const ImagePlane& b) {
  ImagePlane out(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.size(); ++i) out.data()[i] = a.data()[i] - b.data()[i];
  return out;
}

ImagePlane per_channel_luma(const RgbImage& img, auto&& per_channel) {
  return combine_luma(per_channel(img.red()), per_channel(img.green()), per_channel(img.blue()));
}

}  // namespace

std::string_view method_name(Method m) {
  switch (m) {
    case Method::Law: return "law";
    case Method::GrayWdlaw: return "gray-wdlaw";
    case Method::RgbWdlaw: return "rgb-wdlaw";
    case Method::WdlawGray: return "wdlaw-gray";
    case Method::DtcwtResidual: return "dtcwt";
    case Method::DtcwtResidualAr: return "dtcwt-ar";
    case Method::LawDtcwt: return "law-dtcwt";
    case Method::GrayWdlawDtcwt: return "gray-wdlaw-dtcwt";
  }
  return "unknown";
}

Method parse_method(std::string_view name) {
  for (Method m : kAllMethods) {
    if (method_name(m) == name) return m;
  }
  throw Error(ErrorCode::InvalidConfig, "unknown method '" + std::string(name) + "'");
}

std::optional<Method> method_from_id(std::uint8_t id) {
  if (id < kAllMethods.size()) return kAllMethods[id];
  return std::nullopt;
}

bool uses_dtcwt(Method m) {
  return m == Method::DtcwtResidual || m == Method::DtcwtResidualAr || m == Method::LawDtcwt ||
         m == Method::GrayWdlawDtcwt;
}

std::size_t wd_fingerprint_length(std::size_t m, int levels) {
  if (levels < 1 || levels > 30 || m == 0 || m % (std::size_t{1} << levels) != 0) {
    throw Error(ErrorCode::BadDimensions,
                "m=" + std::to_string(m) + " is not divisible by 2^" + std::to_string(levels));
  }
  std::size_t total = 0;
  for (int j = 1; j <= levels; ++j) {
    const std::size_t side = m >> j;
    total += 3 * side * side;
  }
  return total;
}

std::size_t expected_length(Method method, std::size_t m, int levels) {
  const std::size_t l = wd_fingerprint_length(m, levels);
  switch (method) {
    case Method::Law:
    case Method::DtcwtResidual:
    case Method::DtcwtResidualAr:
    case Method::LawDtcwt: return m * m;
    case Method::GrayWdlaw:
    case Method::WdlawGray: return l;
    case Method::RgbWdlaw: return 3 * l;
    case Method::GrayWdlawDtcwt: return 4 * l;
  }
  return 0;
}

namespace stage {

ImagePlane dwt_noise_image(const ImagePlane& channel, const ExtractionConfig& cfg) {
  WaveletPyramid pyr = dwt2_forward(channel, cfg.levels, cfg.wavelet);
  for (DetailLevel& level : pyr.levels) {
    level.horizontal = mihcak_noise(level.horizontal, cfg.filter);
    level.vertical = mihcak_noise(level.vertical, cfg.filter);
    level.diagonal = mihcak_noise(level.diagonal, cfg.filter);
  }
  pyr.approx = ImagePlane(pyr.approx.rows(), pyr.approx.cols());
  return dwt2_inverse(pyr);
}

ImagePlane dtcwt_noise_image(const ImagePlane& channel, const ExtractionConfig& cfg) {
  DtcwtPyramid pyr = dtcwt_forward(channel, cfg.levels);
  for (DtcwtLevel& level : pyr.levels) {
    for (ComplexPlane& band : level) band = mihcak_noise_complex(band, cfg.filter);
  }
  pyr.lowpass = ImagePlane(pyr.lowpass.rows(), pyr.lowpass.cols());
  return dtcwt_inverse(pyr);
}

ImagePlane remove_artifacts(const ImagePlane& plane, const FilterConfig& cfg) {
  return fourier_wiener_noise(zero_mean(plane), cfg);
}

std::vector<DetailLevel> wd_filtered_details(const ImagePlane& channel,
                                             const ExtractionConfig& cfg) {
  WaveletPyramid pyr = dwt2_forward(channel, cfg.levels, cfg.wavelet);
  for (DetailLevel& level : pyr.levels) {
    for (ImagePlane* sub : {&level.horizontal, &level.vertical, &level.diagonal}) {
      *sub = fourier_wiener_noise(mihcak_noise(*sub, cfg.filter), cfg.filter);
    }
  }
  return std::move(pyr.levels);
}

void append_details(const std::vector<DetailLevel>& details, std::vector<double>& out) {
  for (const DetailLevel& level : details) {
    for (const ImagePlane* sub : {&level.horizontal, &level.vertical, &level.diagonal}) {
      out.insert(out.end(), sub->values().begin(), sub->values().end());
    }
  }
}

}  // namespace stage

Fingerprint extract_law(const RgbImage& img, const ExtractionConfig& cfg) {
  check_input(img, cfg);
  const ImagePlane noise =
      per_channel_luma(img, [&](const ImagePlane& ch) { return stage::dwt_noise_image(ch, cfg); });
  return make_fingerprint(Method::Law, img, cfg,
                          flatten(stage::remove_artifacts(noise, cfg.filter)));
}

Fingerprint extract_gray_wdlaw(const RgbImage& img, const ExtractionConfig& cfg) {
  check_input(img, cfg);
  std::vector<double> values;
  values.reserve(wd_fingerprint_length(img.width(), cfg.levels));
  stage::append_details(stage::wd_filtered_details(to_grayscale(img), cfg), values);
  return make_fingerprint(Method::GrayWdlaw, img, cfg, std::move(values));
}

Fingerprint extract_rgb_wdlaw(const RgbImage& img, const ExtractionConfig& cfg) {
  check_input(img, cfg);
  std::vector<double> values;
  values.reserve(3 * wd_fingerprint_length(img.width(), cfg.levels));
  for (std::size_t ch = 0; ch < 3; ++ch) {
    stage::append_details(stage::wd_filtered_details(img.channel(ch), cfg), values);
  }
  return make_fingerprint(Method::RgbWdlaw, img, cfg, std::move(values));
}

Fingerprint extract_wdlaw_gray(const RgbImage& img, const ExtractionConfig& cfg) {
  check_input(img, cfg);
  const auto red = stage::wd_filtered_details(img.red(), cfg);
  const auto green = stage::wd_filtered_details(img.green(), cfg);
  const auto blue = stage::wd_filtered_details(img.blue(), cfg);
  std::vector<DetailLevel> combined(red.size());
  for (std::size_t j = 0; j < red.size(); ++j) {
    combined[j].horizontal =
        combine_luma(red[j].horizontal, green[j].horizontal, blue[j].horizontal);
    combined[j].vertical = combine_luma(red[j].vertical, green[j].vertical, blue[j].vertical);
    combined[j].diagonal = combine_luma(red[j].diagonal, green[j].diagonal, blue[j].diagonal);
  }
  std::vector<double> values;
  values.reserve(wd_fingerprint_length(img.width(), cfg.levels));
  stage::append_details(combined, values);
  return make_fingerprint(Method::WdlawGray, img, cfg, std::move(values));
}

Fingerprint extract_dtcwt_residual(const RgbImage& img, const ExtractionConfig& cfg,
                                   bool artifact_removal) {
  check_input(img, cfg);
  auto residual = [&](const ImagePlane& ch) {
    DtcwtPyramid pyr = dtcwt_forward(ch, cfg.levels);
    for (DtcwtLevel& level : pyr.levels) {
      for (ComplexPlane& band : level) band = mihcak_filter_complex(band, cfg.filter);
    }
    return subtract(ch, dtcwt_inverse(pyr));
  };
  ImagePlane combined = per_channel_luma(img, residual);
  if (artifact_removal) combined = stage::remove_artifacts(combined, cfg.filter);
  return make_fingerprint(artifact_removal ? Method::DtcwtResidualAr : Method::DtcwtResidual, img,
                          cfg, flatten(combined));
}

Fingerprint extract_law_dtcwt(const RgbImage& img, const ExtractionConfig& cfg) {
  check_input(img, cfg);
  const ImagePlane noise = per_channel_luma(
      img, [&](const ImagePlane& ch) { return stage::dtcwt_noise_image(ch, cfg); });
  return make_fingerprint(Method::LawDtcwt, img, cfg,
                          flatten(stage::remove_artifacts(noise, cfg.filter)));
}

Fingerprint extract_gray_wdlaw_dtcwt(const RgbImage& img, const ExtractionConfig& cfg) {
  check_input(img, cfg);
  const DtcwtPyramid pyr = dtcwt_forward(to_grayscale(img), cfg.levels);
  std::vector<double> values;
  values.reserve(4 * wd_fingerprint_length(img.width(), cfg.levels));
  for (const DtcwtLevel& level : pyr.levels) {
    for (const ComplexPlane& band : level) {
      const ComplexPlane filtered =
          fourier_wiener_noise_complex(mihcak_noise_complex(band, cfg.filter), cfg.filter);
      for (const auto& z : filtered.values()) {
        values.push_back(z.real());
        values.push_back(z.imag());
      }
    }
  }
  return make_fingerprint(Method::GrayWdlawDtcwt, img, cfg, std::move(values));
}

Fingerprint extract(Method method, const RgbImage& img, const ExtractionConfig& cfg) {
  switch (method) {
    case Method::Law: return extract_law(img, cfg);
    case Method::GrayWdlaw: return extract_gray_wdlaw(img, cfg);
    case Method::RgbWdlaw: return extract_rgb_wdlaw(img, cfg);
    case Method::WdlawGray: return extract_wdlaw_gray(img, cfg);
    case Method::DtcwtResidual: return extract_dtcwt_residual(img, cfg, false);
    case Method::DtcwtResidualAr: return extract_dtcwt_residual(img, cfg, true);
    case Method::LawDtcwt: return extract_law_dtcwt(img, cfg);
    case Method::GrayWdlawDtcwt: return extract_gray_wdlaw_dtcwt(img, cfg);
  }
  throw Error(ErrorCode::InvalidConfig, "unknown method");
}

}  // namespace wdfp
