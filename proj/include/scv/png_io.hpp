#ifndef SCV_PNG_IO_HPP
#define SCV_PNG_IO_HPP

// PNG input/output through libpng's simplified API. Link with PNG::PNG.

#include <png.h>

#include <cstdint>
#include <cstring>
#include <memory>
#include <string>
#include <vector>

#include "scv/error.hpp"
#include "scv/flow_color.hpp"
#include "scv/grid.hpp"

namespace scv::io {

namespace detail {

struct PngImage {
  png_image image;
  PngImage() {
    std::memset(&image, 0, sizeof image);
    image.version = PNG_IMAGE_VERSION;
  }
  ~PngImage() { png_image_free(&image); }
  PngImage(const PngImage &) = delete;
  PngImage &operator=(const PngImage &) = delete;
};

} // namespace detail

/// Loads any PNG as 8-bit grayscale with values in [0, 255].
inline ScalarGrid read_png_gray(const std::string &path) {
  detail::PngImage png;
  if (!png_image_begin_read_from_file(&png.image, path.c_str()))
    throw FormatError("cannot read PNG " + path + ": " + png.image.message);
  png.image.format = PNG_FORMAT_GRAY;
  const auto w = static_cast<int>(png.image.width);
  const auto h = static_cast<int>(png.image.height);
  if (w <= 0 || h <= 0)
    throw FormatError("PNG has empty dimensions: " + path);
  std::vector<png_byte> buf(PNG_IMAGE_SIZE(png.image));
  if (!png_image_finish_read(&png.image, nullptr, buf.data(), 0, nullptr))
    throw FormatError("cannot decode PNG " + path + ": " + png.image.message);
  ScalarGrid out(h, w);
  auto dst = out.data();
  for (std::size_t i = 0; i < dst.size(); ++i)
    dst[i] = static_cast<float>(buf[i]);
  return out;
}

inline void write_png_rgb(const RgbImage &img, const std::string &path) {
  detail::PngImage png;
  png.image.width = static_cast<png_uint_32>(img.width);
  png.image.height = static_cast<png_uint_32>(img.height);
  png.image.format = PNG_FORMAT_RGB;
  if (!png_image_write_to_file(&png.image, path.c_str(), 0, img.rgb.data(), 0, nullptr))
    throw FormatError("cannot write PNG " + path + ": " + png.image.message);
}

/// Values are rounded and clamped to [0, 255].
inline void write_png_gray(const ScalarGrid &img, const std::string &path) {
  std::vector<png_byte> buf(img.size());
  const auto src = img.data();
  for (std::size_t i = 0; i < buf.size(); ++i) {
    const float v = src[i] < 0.0f ? 0.0f : (src[i] > 255.0f ? 255.0f : src[i]);
    buf[i] = static_cast<png_byte>(v + 0.5f);
  }
  detail::PngImage png;
  png.image.width = static_cast<png_uint_32>(img.width());
  png.image.height = static_cast<png_uint_32>(img.height());
  png.image.format = PNG_FORMAT_GRAY;
  if (!png_image_write_to_file(&png.image, path.c_str(), 0, buf.data(), 0, nullptr))
    throw FormatError("cannot write PNG " + path + ": " + png.image.message);
}

} // namespace scv::io

#endif // SCV_PNG_IO_HPP
