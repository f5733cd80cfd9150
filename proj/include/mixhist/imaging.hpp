#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace mixhist {

/// Single-channel raster, indexed (row, col) = (y, x).
template <typename Scalar>
using Plane = Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

using Rgb = std::array<std::uint8_t, 3>;

/// Smallest width/height accepted anywhere in the pipeline (3x3 Sobel support).
inline constexpr int kMinImageSide = 3;

/// 8-bit interleaved RGB raster.
class RGBImage {
 public:
  RGBImage() = default;
  /// Zero-filled image. Throws ImageTooSmall when either side is below 3.
  RGBImage(int width, int height);
  RGBImage(int width, int height, std::vector<std::uint8_t> interleaved);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t pixel_count() const noexcept {
    return static_cast<std::size_t>(width_) * static_cast<std::size_t>(height_);
  }

  Rgb at(int x, int y) const noexcept {
    const auto* p = &data_[offset(x, y)];
    return {p[0], p[1], p[2]};
  }
  void set(int x, int y, Rgb c) noexcept {
    auto* p = &data_[offset(x, y)];
    p[0] = c[0];
    p[1] = c[1];
    p[2] = c[2];
  }

  std::span<const std::uint8_t> data() const noexcept { return data_; }

  bool operator==(const RGBImage&) const = default;

 private:
  std::size_t offset(int x, int y) const noexcept {
    return 3 * (static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
                static_cast<std::size_t>(x));
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> data_;
};

/// H, S and V planes, each normalized to [0,1] (H to [0,1)).
struct HSVImage {
  Plane<double> h;
  Plane<double> s;
  Plane<double> v;

  int width() const noexcept { return static_cast<int>(h.cols()); }
  int height() const noexcept { return static_cast<int>(h.rows()); }
};

/// Hexcone RGB -> HSV for one pixel. Hue is the angle over 360 degrees;
/// achromatic pixels get H = 0 and black pixels S = 0.
std::array<double, 3> rgb_to_hsv(Rgb rgb) noexcept;

/// Inverse of rgb_to_hsv, rounded to the nearest 8-bit level.
Rgb hsv_to_rgb(double h, double s, double v) noexcept;

HSVImage rgb_to_hsv(const RGBImage& img);

/// Decodes a JPEG or PNG held in memory. Format is sniffed from the signature.
RGBImage decode_image(std::span<const std::uint8_t> bytes);

/// Reads and decodes a JPEG or PNG file; alpha is dropped.
RGBImage load_image(const std::filesystem::path& path);

/// 8-bit RGB PNG encoding with no timestamp chunks, so identical pixels give identical bytes.
std::vector<std::uint8_t> encode_png(const RGBImage& img);
void save_png(const RGBImage& img, const std::filesystem::path& path);

}  // namespace mixhist
