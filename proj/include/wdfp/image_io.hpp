#pragma once

#include <cstddef>
#include <filesystem>

#include "wdfp/plane.hpp"

namespace wdfp {

/// Three equally sized channels with samples kept in the 8-bit range [0, 255].
class RgbImage {
 public:
  RgbImage() = default;
  RgbImage(ImagePlane red, ImagePlane green, ImagePlane blue);

  std::size_t width() const noexcept { return red_.cols(); }
  std::size_t height() const noexcept { return red_.rows(); }

  const ImagePlane& red() const noexcept { return red_; }
  const ImagePlane& green() const noexcept { return green_; }
  const ImagePlane& blue() const noexcept { return blue_; }
  const ImagePlane& channel(std::size_t i) const;

  /// Image with all three channels equal to `plane`.
  static RgbImage from_gray(const ImagePlane& plane);

 private:
  ImagePlane red_, green_, blue_;
};

inline constexpr double kLumaRed = 0.299;
inline constexpr double kLumaGreen = 0.587;
inline constexpr double kLumaBlue = 0.114;

/// Decodes a JPEG or PNG file (format sniffed from the leading bytes).
/// Grayscale sources are replicated into all three channels; alpha is dropped.
RgbImage load_image(const std::filesystem::path& path);

void write_png(const RgbImage& img, const std::filesystem::path& path);
void write_jpeg(const RgbImage& img, const std::filesystem::path& path, int quality = 95);

/// size x size window with top-left offset floor((dim - size) / 2).
RgbImage center_crop(const RgbImage& img, std::size_t size);
ImagePlane center_crop(const ImagePlane& plane, std::size_t size);

/// 0.299 R + 0.587 G + 0.114 B in double precision, no rounding.
ImagePlane to_grayscale(const RgbImage& img);

/// Same luminance weighting applied to any three like-shaped planes.
ImagePlane combine_luma(const ImagePlane& red, const ImagePlane& green, const ImagePlane& blue);
ComplexPlane combine_luma(const ComplexPlane& red, const ComplexPlane& green,
                          const ComplexPlane& blue);

}  // namespace wdfp
