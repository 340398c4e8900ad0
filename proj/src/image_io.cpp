#include "wdfp/image_io.hpp"

#include <array>
#include <cmath>
#include <csetjmp>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <memory>
#include <string>
#include <vector>

#include <jpeglib.h>
#include <png.h>

namespace wdfp {
namespace {

namespace fs = std::filesystem;

struct FileCloser {
  void operator()(std::FILE* f) const noexcept {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

void check_plane(const ImagePlane& p, const char* name) {
  if (p.rows() == 0 || p.cols() == 0) {
    throw Error(ErrorCode::BadDimensions, std::string(name) + " channel is empty");
  }
  for (double v : p.values()) {
    if (!std::isfinite(v)) {
      throw Error(ErrorCode::BadDimensions, std::string(name) + " channel has non-finite samples");
    }
  }
}

RgbImage from_interleaved(const std::vector<std::uint8_t>& pixels, std::size_t width,
                          std::size_t height, std::size_t components) {
  ImagePlane r(height, width), g(height, width), b(height, width);
  for (std::size_t i = 0; i < width * height; ++i) {
    const std::uint8_t* px = pixels.data() + i * components;
    r.data()[i] = px[0];
    g.data()[i] = components >= 3 ? px[1] : px[0];
    b.data()[i] = components >= 3 ? px[2] : px[0];
  }
  return RgbImage(std::move(r), std::move(g), std::move(b));
}

std::vector<std::uint8_t> to_interleaved(const RgbImage& img) {
  std::vector<std::uint8_t> out(img.width() * img.height() * 3);
  auto quantize = [](double v) {
    return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 255.0)));
  };
  for (std::size_t i = 0; i < img.width() * img.height(); ++i) {
    out[3 * i + 0] = quantize(img.red().data()[i]);
    out[3 * i + 1] = quantize(img.green().data()[i]);
    out[3 * i + 2] = quantize(img.blue().data()[i]);
  }
  return out;
}

// libjpeg reports fatal errors through error_exit, which must not return.
struct JpegErrorManager {
  jpeg_error_mgr pub;
  std::jmp_buf jump;
  char message[JMSG_LENGTH_MAX];
};

void jpeg_error_exit(j_common_ptr cinfo) {
  auto* err = reinterpret_cast<JpegErrorManager*>(cinfo->err);
  (*cinfo->err->format_message)(cinfo, err->message);
  std::longjmp(err->jump, 1);
}

RgbImage decode_jpeg(const fs::path& path) {
  FilePtr file(std::fopen(path.c_str(), "rb"));
  if (!file) throw Error(ErrorCode::FileNotFound, path.string());

  jpeg_decompress_struct cinfo{};
  JpegErrorManager jerr{};
  cinfo.err = jpeg_std_error(&jerr.pub);
  jerr.pub.error_exit = jpeg_error_exit;
  std::vector<std::uint8_t> pixels;
  std::size_t width = 0, height = 0, components = 0;

  if (setjmp(jerr.jump)) {
    jpeg_destroy_decompress(&cinfo);
    throw Error(ErrorCode::DecodeError, path.string() + ": " + jerr.message);
  }
  jpeg_create_decompress(&cinfo);
  jpeg_stdio_src(&cinfo, file.get());
  jpeg_read_header(&cinfo, TRUE);
  if (cinfo.jpeg_color_space != JCS_GRAYSCALE) cinfo.out_color_space = JCS_RGB;
  jpeg_start_decompress(&cinfo);
  width = cinfo.output_width;
  height = cinfo.output_height;
  components = cinfo.output_components;
  pixels.resize(width * height * components);
  while (cinfo.output_scanline < cinfo.output_height) {
    JSAMPROW row = pixels.data() + std::size_t{cinfo.output_scanline} * width * components;
    jpeg_read_scanlines(&cinfo, &row, 1);
  }
  jpeg_finish_decompress(&cinfo);
  jpeg_destroy_decompress(&cinfo);
  return from_interleaved(pixels, width, height, components);
}

RgbImage decode_png(const fs::path& path) {
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&image, path.c_str())) {
    const std::string msg = image.message;
    png_image_free(&image);
    throw Error(ErrorCode::DecodeError, path.string() + ": " + msg);
  }
  image.format = PNG_FORMAT_RGB;
  std::vector<std::uint8_t> pixels(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, pixels.data(), 0, nullptr)) {
    const std::string msg = image.message;
    png_image_free(&image);
    throw Error(ErrorCode::DecodeError, path.string() + ": " + msg);
  }
  return from_interleaved(pixels, image.width, image.height, 3);
}

// 0.299 R + 0.587 G + 0.114 B written around G so that equal channels map
// to themselves bit-exactly; the weights still sum to one in real arithmetic.
template <typename T>
T luma(const T& red, const T& green, const T& blue) {
  return green + kLumaRed * (red - green) + kLumaBlue * (blue - green);
}

}  // namespace

RgbImage::RgbImage(ImagePlane red, ImagePlane green, ImagePlane blue)
    : red_(std::move(red)), green_(std::move(green)), blue_(std::move(blue)) {
  check_plane(red_, "red");
  check_plane(green_, "green");
  check_plane(blue_, "blue");
  if (!red_.same_shape(green_) || !red_.same_shape(blue_)) {
    throw Error(ErrorCode::DimensionMismatch, "RGB channels differ in size");
  }
}

const ImagePlane& RgbImage::channel(std::size_t i) const {
  switch (i) {
    case 0: return red_;
    case 1: return green_;
    case 2: return blue_;
    default: throw Error(ErrorCode::DimensionMismatch, "channel index out of range");
  }
}

RgbImage RgbImage::from_gray(const ImagePlane& plane) { return RgbImage(plane, plane, plane); }

RgbImage load_image(const fs::path& path) {
  std::error_code ec;
  if (!fs::is_regular_file(path, ec)) throw Error(ErrorCode::FileNotFound, path.string());

  std::array<unsigned char, 8> magic{};
  {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::FileNotFound, path.string());
    in.read(reinterpret_cast<char*>(magic.data()), magic.size());
    if (in.gcount() < 3) throw Error(ErrorCode::DecodeError, path.string() + ": file too short");
  }
  if (magic[0] == 0xFF && magic[1] == 0xD8 && magic[2] == 0xFF) return decode_jpeg(path);
  static constexpr std::array<unsigned char, 8> kPngSig{0x89, 'P', 'N', 'G', '\r', '\n', 0x1A, '\n'};
  if (magic == kPngSig) return decode_png(path);
  throw Error(ErrorCode::DecodeError, path.string() + ": not a JPEG or PNG stream");
}

void write_png(const RgbImage& img, const fs::path& path) {
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(img.width());
  image.height = static_cast<png_uint_32>(img.height());
  image.format = PNG_FORMAT_RGB;
  const auto pixels = to_interleaved(img);
  if (!png_image_write_to_file(&image, path.c_str(), 0, pixels.data(), 0, nullptr)) {
    const std::string msg = image.message;
    png_image_free(&image);
    throw Error(ErrorCode::IoError, path.string() + ": " + msg);
  }
}

void write_jpeg(const RgbImage& img, const fs::path& path, int quality) {
  FilePtr file(std::fopen(path.c_str(), "wb"));
  if (!file) throw Error(ErrorCode::IoError, "cannot open " + path.string() + " for writing");
  const auto pixels = to_interleaved(img);

  jpeg_compress_struct cinfo{};
  JpegErrorManager jerr{};
  cinfo.err = jpeg_std_error(&jerr.pub);
  jerr.pub.error_exit = jpeg_error_exit;
  if (setjmp(jerr.jump)) {
    jpeg_destroy_compress(&cinfo);
    throw Error(ErrorCode::IoError, path.string() + ": " + jerr.message);
  }
  jpeg_create_compress(&cinfo);
  jpeg_stdio_dest(&cinfo, file.get());
  cinfo.image_width = static_cast<JDIMENSION>(img.width());
  cinfo.image_height = static_cast<JDIMENSION>(img.height());
  cinfo.input_components = 3;
  cinfo.in_color_space = JCS_RGB;
  jpeg_set_defaults(&cinfo);
  jpeg_set_quality(&cinfo, quality, TRUE);
  jpeg_start_compress(&cinfo, TRUE);
  while (cinfo.next_scanline < cinfo.image_height) {
    auto* row = const_cast<JSAMPROW>(pixels.data() + std::size_t{cinfo.next_scanline} * img.width() * 3);
    jpeg_write_scanlines(&cinfo, &row, 1);
  }
  jpeg_finish_compress(&cinfo);
  jpeg_destroy_compress(&cinfo);
}

ImagePlane center_crop(const ImagePlane& plane, std::size_t size) {
  if (size == 0 || size > plane.rows() || size > plane.cols()) {
    throw Error(ErrorCode::CropTooLarge, "crop " + std::to_string(size) + " exceeds " +
                                             std::to_string(plane.cols()) + "x" +
                                             std::to_string(plane.rows()));
  }
  const std::size_t top = (plane.rows() - size) / 2;
  const std::size_t left = (plane.cols() - size) / 2;
  ImagePlane out(size, size);
  for (std::size_t r = 0; r < size; ++r) {
    const auto src = plane.row(top + r).subspan(left, size);
    std::copy(src.begin(), src.end(), out.row(r).begin());
  }
  return out;
}

RgbImage center_crop(const RgbImage& img, std::size_t size) {
  return RgbImage(center_crop(img.red(), size), center_crop(img.green(), size),
                  center_crop(img.blue(), size));
}

ImagePlane combine_luma(const ImagePlane& red, const ImagePlane& green, const ImagePlane& blue) {
  if (!red.same_shape(green) || !red.same_shape(blue)) {
    throw Error(ErrorCode::DimensionMismatch, "luma combination of unequal planes");
  }
  ImagePlane out(red.rows(), red.cols());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out.data()[i] =
        luma(red.data()[i], green.data()[i], blue.data()[i]);
  }
  return out;
}

ComplexPlane combine_luma(const ComplexPlane& red, const ComplexPlane& green,
                          const ComplexPlane& blue) {
  if (!red.same_shape(green) || !red.same_shape(blue)) {
    throw Error(ErrorCode::DimensionMismatch, "luma combination of unequal planes");
  }
  ComplexPlane out(red.rows(), red.cols());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out.data()[i] =
        luma(red.data()[i], green.data()[i], blue.data()[i]);
  }
  return out;
}

ImagePlane to_grayscale(const RgbImage& img) {
  return combine_luma(img.red(), img.green(), img.blue());
}

}  // namespace wdfp
