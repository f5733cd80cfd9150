#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "mixhist/imaging.hpp"
#include "mixhist/index.hpp"

namespace mixhist {

enum class StripeOrientation { Vertical, Horizontal, Diagonal };

/// A synthetic category: one base hue crossed with one stripe direction. Hues come in
/// pairs of categories; even hues pair vertical with horizontal stripes and odd hues
/// pair vertical with diagonal ones, so neither hue nor stripe direction alone tells
/// every category apart.
struct SynthCategory {
  std::string name;
  double hue = 0.0;
  StripeOrientation orientation = StripeOrientation::Vertical;
};

struct SynthConfig {
  int categories = 4;
  int per_category = 25;
  std::uint64_t seed = 42;
  int width = 64;
  int height = 64;

  void validate() const;
};

/// At most 20 categories (10 hues x 2 stripe directions).
std::vector<SynthCategory> synth_categories(int count);

/// Renders one image of triangle-wave brightness stripes. Phase, brightness, saturation
/// and a small hue offset are drawn from `jitter_seed`.
RGBImage synth_image(const SynthCategory& category, std::uint64_t jitter_seed, int width,
                     int height);

/// Writes `images/<id>.png` for every image plus `manifest.csv` under out_dir and
/// returns the manifest entries (paths relative to out_dir).
std::vector<ManifestEntry> generate_corpus(const SynthConfig& config,
                                           const std::filesystem::path& out_dir);

}  // namespace mixhist
