#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "mixhist/imaging.hpp"

namespace mixhist::testing {

inline std::vector<std::uint8_t> random_pixels(std::mt19937_64& gen, int width, int height) {
  std::vector<std::uint8_t> px(static_cast<std::size_t>(width) * height * 3);
  for (auto& b : px) b = static_cast<std::uint8_t>(gen() & 0xffu);
  return px;
}

inline RGBImage random_image(std::mt19937_64& gen, int width, int height) {
  return RGBImage(width, height, random_pixels(gen, width, height));
}

inline RGBImage constant_image(int width, int height, Rgb color) {
  RGBImage img(width, height);
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x) img.set(x, y, color);
  return img;
}

/// Fresh per-test scratch directory under the build tree.
inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::path(MIXHIST_TEST_TMP) / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline std::vector<std::uint8_t> to_vector(std::span<const std::uint8_t> s) {
  return {s.begin(), s.end()};
}

}  // namespace mixhist::testing
