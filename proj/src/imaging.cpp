#include "mixhist/imaging.hpp"

#include <algorithm>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iterator>
#include <string>

#include <jpeglib.h>
#include <png.h>

#include "mixhist/error.hpp"

namespace mixhist {

namespace {

void require_min_size(int width, int height) {
  if (width < kMinImageSide || height < kMinImageSide) {
    throw Error(ErrorCode::ImageTooSmall,
                "image is " + std::to_string(width) + "x" + std::to_string(height) +
                    ", need at least 3x3");
  }
}

bool is_png(std::span<const std::uint8_t> bytes) {
  static constexpr std::uint8_t kSig[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
  return bytes.size() >= 8 && std::equal(std::begin(kSig), std::end(kSig), bytes.begin());
}

bool is_jpeg(std::span<const std::uint8_t> bytes) {
  return bytes.size() >= 3 && bytes[0] == 0xff && bytes[1] == 0xd8 && bytes[2] == 0xff;
}

RGBImage decode_png(std::span<const std::uint8_t> bytes) {
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&image, bytes.data(), bytes.size())) {
    std::string msg = image.message;
    png_image_free(&image);
    throw Error(ErrorCode::CorruptImage, "png: " + msg);
  }
  // Decode with alpha and discard it ourselves; libpng would otherwise composite.
  image.format = PNG_FORMAT_RGBA;
  const int width = static_cast<int>(image.width);
  const int height = static_cast<int>(image.height);
  if (width < kMinImageSide || height < kMinImageSide) {
    png_image_free(&image);
    require_min_size(width, height);
  }
  std::vector<std::uint8_t> rgba(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, rgba.data(), 0, nullptr)) {
    std::string msg = image.message;
    png_image_free(&image);
    throw Error(ErrorCode::CorruptImage, "png: " + msg);
  }
  std::vector<std::uint8_t> rgb(static_cast<std::size_t>(width) * height * 3);
  for (std::size_t i = 0, n = rgb.size() / 3; i < n; ++i) {
    rgb[3 * i] = rgba[4 * i];
    rgb[3 * i + 1] = rgba[4 * i + 1];
    rgb[3 * i + 2] = rgba[4 * i + 2];
  }
  return RGBImage(width, height, std::move(rgb));
}

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

void jpeg_silence(j_common_ptr, int) {}

// No objects with non-trivial destructors may live across the setjmp below.
bool decode_jpeg_raw(std::span<const std::uint8_t> bytes, std::uint8_t** out, int* width,
                     int* height, char* message) {
  jpeg_decompress_struct cinfo;
  JpegErrorManager jerr;
  cinfo.err = jpeg_std_error(&jerr.pub);
  jerr.pub.error_exit = jpeg_error_exit;
  jerr.pub.emit_message = jpeg_silence;
  *out = nullptr;
  if (setjmp(jerr.jump)) {
    std::snprintf(message, JMSG_LENGTH_MAX, "%s", jerr.message);
    jpeg_destroy_decompress(&cinfo);
    std::free(*out);
    *out = nullptr;
    return false;
  }
  jpeg_create_decompress(&cinfo);
  jpeg_mem_src(&cinfo, bytes.data(), static_cast<unsigned long>(bytes.size()));
  jpeg_read_header(&cinfo, TRUE);
  cinfo.out_color_space = JCS_RGB;
  jpeg_start_decompress(&cinfo);
  *width = static_cast<int>(cinfo.output_width);
  *height = static_cast<int>(cinfo.output_height);
  const std::size_t stride = static_cast<std::size_t>(cinfo.output_width) * 3;
  *out = static_cast<std::uint8_t*>(std::malloc(stride * cinfo.output_height));
  if (*out == nullptr) {
    std::snprintf(message, JMSG_LENGTH_MAX, "out of memory");
    jpeg_destroy_decompress(&cinfo);
    return false;
  }
  while (cinfo.output_scanline < cinfo.output_height) {
    JSAMPROW row = *out + stride * cinfo.output_scanline;
    jpeg_read_scanlines(&cinfo, &row, 1);
  }
  jpeg_finish_decompress(&cinfo);
  jpeg_destroy_decompress(&cinfo);
  return true;
}

RGBImage decode_jpeg(std::span<const std::uint8_t> bytes) {
  std::uint8_t* raw = nullptr;
  int width = 0;
  int height = 0;
  char message[JMSG_LENGTH_MAX] = {};
  if (!decode_jpeg_raw(bytes, &raw, &width, &height, message)) {
    throw Error(ErrorCode::CorruptImage, std::string("jpeg: ") + message);
  }
  std::vector<std::uint8_t> rgb(raw, raw + static_cast<std::size_t>(width) * height * 3);
  std::free(raw);
  require_min_size(width, height);
  return RGBImage(width, height, std::move(rgb));
}

}  // namespace

RGBImage::RGBImage(int width, int height)
    : width_(width), height_(height) {
  require_min_size(width, height);
  data_.assign(pixel_count() * 3, 0);
}

RGBImage::RGBImage(int width, int height, std::vector<std::uint8_t> interleaved)
    : width_(width), height_(height), data_(std::move(interleaved)) {
  require_min_size(width, height);
  if (data_.size() != pixel_count() * 3) {
    throw Error(ErrorCode::DimensionMismatch, "pixel buffer does not match width*height*3");
  }
}

std::array<double, 3> rgb_to_hsv(Rgb rgb) noexcept {
  const int r = rgb[0];
  const int g = rgb[1];
  const int b = rgb[2];
  const int hi = std::max({r, g, b});
  const int lo = std::min({r, g, b});
  const int delta = hi - lo;

  double h = 0.0;
  if (delta != 0) {
    // Sextant offset plus in-sextant position, over the full turn of 6*delta.
    int numer = 0;
    if (hi == r) {
      numer = g - b;
      if (numer < 0) numer += 6 * delta;
    } else if (hi == g) {
      numer = b - r + 2 * delta;
    } else {
      numer = r - g + 4 * delta;
    }
    h = static_cast<double>(numer) / static_cast<double>(6 * delta);
  }
  const double s = hi == 0 ? 0.0 : static_cast<double>(delta) / static_cast<double>(hi);
  const double v = static_cast<double>(hi) / 255.0;
  return {h, s, v};
}

Rgb hsv_to_rgb(double h, double s, double v) noexcept {
  h = std::clamp(h, 0.0, 1.0);
  s = std::clamp(s, 0.0, 1.0);
  v = std::clamp(v, 0.0, 1.0);
  const double chroma = v * s;
  const double sector = h * 6.0;
  const double x = chroma * (1.0 - std::abs(std::fmod(sector, 2.0) - 1.0));
  double r = 0, g = 0, b = 0;
  switch (static_cast<int>(sector) % 6) {
    case 0: r = chroma; g = x; break;
    case 1: r = x; g = chroma; break;
    case 2: g = chroma; b = x; break;
    case 3: g = x; b = chroma; break;
    case 4: r = x; b = chroma; break;
    default: r = chroma; b = x; break;
  }
  const double m = v - chroma;
  auto to8 = [](double c) {
    return static_cast<std::uint8_t>(std::clamp(std::lround(c * 255.0), 0L, 255L));
  };
  return {to8(r + m), to8(g + m), to8(b + m)};
}

HSVImage rgb_to_hsv(const RGBImage& img) {
  HSVImage out;
  out.h.resize(img.height(), img.width());
  out.s.resize(img.height(), img.width());
  out.v.resize(img.height(), img.width());
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      const auto hsv = rgb_to_hsv(img.at(x, y));
      out.h(y, x) = hsv[0];
      out.s(y, x) = hsv[1];
      out.v(y, x) = hsv[2];
    }
  }
  return out;
}

RGBImage decode_image(std::span<const std::uint8_t> bytes) {
  if (is_png(bytes)) return decode_png(bytes);
  if (is_jpeg(bytes)) return decode_jpeg(bytes);
  throw Error(ErrorCode::UnsupportedFormat, "not a PNG or JPEG stream");
}

RGBImage load_image(const std::filesystem::path& path) {
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec)) {
    throw Error(ErrorCode::FileNotFound, "no such image file: " + path.string());
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::FileNotFound, "cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  try {
    return decode_image(bytes);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

std::vector<std::uint8_t> encode_png(const RGBImage& img) {
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(img.width());
  image.height = static_cast<png_uint_32>(img.height());
  image.format = PNG_FORMAT_RGB;
  png_alloc_size_t size = 0;
  if (!png_image_write_to_memory(&image, nullptr, &size, 0, img.data().data(), 0, nullptr)) {
    throw Error(ErrorCode::IOError, std::string("png encode: ") + image.message);
  }
  std::vector<std::uint8_t> out(size);
  if (!png_image_write_to_memory(&image, out.data(), &size, 0, img.data().data(), 0,
                                 nullptr)) {
    throw Error(ErrorCode::IOError, std::string("png encode: ") + image.message);
  }
  out.resize(size);
  return out;
}

void save_png(const RGBImage& img, const std::filesystem::path& path) {
  const auto bytes = encode_png(img);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::IOError, "cannot write " + path.string());
}

}  // namespace mixhist
