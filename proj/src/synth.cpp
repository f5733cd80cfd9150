#include "mixhist/synth.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <random>

#include "mixhist/error.hpp"

namespace mixhist {

namespace {

struct HueName {
  const char* name;
  double hue;
};

// One hue per H bin center (10 bins), ordered so that consecutive hues are far apart.
constexpr std::array<HueName, 10> kHues = {{{"red", 0.05},
                                            {"blue", 0.65},
                                            {"green", 0.35},
                                            {"purple", 0.85},
                                            {"yellow", 0.15},
                                            {"cyan", 0.55},
                                            {"lime", 0.25},
                                            {"violet", 0.75},
                                            {"teal", 0.45},
                                            {"magenta", 0.95}}};

constexpr double kStripePeriod = 8.0;

double unit(std::mt19937_64& gen) {
  return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

double stripe_normal(StripeOrientation o) {
  switch (o) {
    case StripeOrientation::Vertical: return 0.0;
    case StripeOrientation::Horizontal: return std::numbers::pi / 2;
    case StripeOrientation::Diagonal: return 3 * std::numbers::pi / 8;
  }
  return 0.0;
}

const char* orientation_name(StripeOrientation o) {
  switch (o) {
    case StripeOrientation::Vertical: return "vertical";
    case StripeOrientation::Horizontal: return "horizontal";
    case StripeOrientation::Diagonal: return "diagonal";
  }
  return "?";
}

std::string pad3(int i) {
  std::string s = std::to_string(i);
  while (s.size() < 3) s.insert(s.begin(), '0');
  return s;
}

}  // namespace

void SynthConfig::validate() const {
  if (categories < 1 || categories > 2 * static_cast<int>(kHues.size())) {
    throw Error(ErrorCode::InvalidArgument, "categories must be in [1, 20]");
  }
  if (per_category < 1) throw Error(ErrorCode::InvalidArgument, "per_category must be >= 1");
  if (width < kMinImageSide || height < kMinImageSide) {
    throw Error(ErrorCode::InvalidArgument, "synthetic images must be at least 3x3");
  }
}

std::vector<SynthCategory> synth_categories(int count) {
  std::vector<SynthCategory> out;
  for (int i = 0; i < count; ++i) {
    const int hue = i / 2;
    if (hue >= static_cast<int>(kHues.size())) {
      throw Error(ErrorCode::InvalidArgument, "at most 20 synthetic categories");
    }
    StripeOrientation o = StripeOrientation::Vertical;
    if (i % 2 == 1) {
      o = hue % 2 == 0 ? StripeOrientation::Horizontal : StripeOrientation::Diagonal;
    }
    out.push_back({std::string(kHues[hue].name) + "-" + orientation_name(o), kHues[hue].hue, o});
  }
  return out;
}

RGBImage synth_image(const SynthCategory& category, std::uint64_t jitter_seed, int width,
                     int height) {
  std::mt19937_64 gen(jitter_seed);
  const double phase = unit(gen);
  const double base = 0.25 + 0.10 * unit(gen);
  const double amplitude = 0.50 + 0.10 * unit(gen);
  // Saturation and hue stay inside one bin of every named color preset.
  const double saturation = 0.56 + 0.08 * unit(gen);
  const double hue = category.hue + 0.02 * (unit(gen) - 0.5);

  const double normal = stripe_normal(category.orientation);
  const double nx = std::cos(normal);
  const double ny = std::sin(normal);
  RGBImage img(width, height);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const double along = x * nx + y * ny;
      // Triangle wave: constant slope keeps the gradient well above HSV rounding noise.
      const double t = along / kStripePeriod + phase;
      const double wave = 2.0 * std::abs(t - std::floor(t) - 0.5);
      img.set(x, y, hsv_to_rgb(hue, saturation, base + amplitude * wave));
    }
  }
  return img;
}

std::vector<ManifestEntry> generate_corpus(const SynthConfig& config,
                                           const std::filesystem::path& out_dir) {
  config.validate();
  const auto cats = synth_categories(config.categories);
  std::error_code ec;
  std::filesystem::create_directories(out_dir / "images", ec);
  if (ec) throw Error(ErrorCode::IOError, "cannot create " + (out_dir / "images").string());

  std::mt19937_64 seeds(config.seed);
  std::vector<ManifestEntry> manifest;
  for (const auto& cat : cats) {
    for (int i = 0; i < config.per_category; ++i) {
      const std::string id = cat.name + "_" + pad3(i);
      const auto rel = std::filesystem::path("images") / (id + ".png");
      save_png(synth_image(cat, seeds(), config.width, config.height), out_dir / rel);
      manifest.push_back({id, rel, cat.name});
    }
  }
  write_manifest(manifest, out_dir / "manifest.csv");
  return manifest;
}

}  // namespace mixhist
