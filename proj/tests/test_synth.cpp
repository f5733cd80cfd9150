#include <set>

#include <gtest/gtest.h>

#include "mixhist/io.hpp"
#include "mixhist/query.hpp"
#include "mixhist/synth.hpp"
#include "test_support.hpp"

namespace mixhist {
namespace {

TEST(SynthCategories, HueTimesStripeLayout) {
  const auto cats = synth_categories(4);
  ASSERT_EQ(cats.size(), 4u);
  EXPECT_EQ(cats[0].name, "red-vertical");
  EXPECT_EQ(cats[1].name, "red-horizontal");
  EXPECT_EQ(cats[2].name, "blue-vertical");
  EXPECT_EQ(cats[3].name, "blue-diagonal");
  EXPECT_EQ(cats[0].hue, cats[1].hue);
  EXPECT_EQ(cats[0].orientation, cats[2].orientation);

  const auto many = synth_categories(20);
  std::set<std::string> names;
  for (const auto& c : many) names.insert(c.name);
  EXPECT_EQ(names.size(), 20u);
  EXPECT_THROW(synth_categories(21), Error);
}

TEST(SynthImage, DeterministicPerSeed) {
  const auto cat = synth_categories(2)[1];
  EXPECT_EQ(synth_image(cat, 5, 20, 16), synth_image(cat, 5, 20, 16));
  EXPECT_NE(synth_image(cat, 5, 20, 16), synth_image(cat, 6, 20, 16));
}

TEST(SynthImage, StripesSetTheDominantOrientationBin) {
  const QuantizationScheme s{10, 4, 4, 4};
  const auto cats = synth_categories(4);
  // vertical -> bin 0, horizontal -> bin 2, diagonal (67.5 deg) -> bin 1
  const int expected[] = {0, 2, 0, 1};
  for (int k = 0; k < 4; ++k) {
    const auto fv = extract(synth_image(cats[k], 11, 48, 48), s);
    Eigen::Vector4d rows;
    for (int q = 0; q < 4; ++q) rows(q) = fv.values.segment(q * 160, 160).sum();
    Eigen::Index best = 0;
    rows.maxCoeff(&best);
    EXPECT_EQ(best, expected[k]) << cats[k].name << " rows " << rows.transpose();
    EXPECT_GT(rows(best), 0.6) << cats[k].name;
  }
}

TEST(GenerateCorpus, WritesImagesAndManifest) {
  const auto dir = testing::scratch_dir("corpus");
  SynthConfig cfg;
  cfg.categories = 4;
  cfg.per_category = 25;
  const auto manifest = generate_corpus(cfg, dir);
  ASSERT_EQ(manifest.size(), 100u);
  const auto read = read_manifest(dir / "manifest.csv");
  ASSERT_EQ(read.size(), 100u);
  std::set<std::string> cats;
  for (const auto& e : read) {
    cats.insert(e.category);
    ASSERT_TRUE(std::filesystem::exists(e.path)) << e.path;
  }
  EXPECT_EQ(cats.size(), 4u);
  const auto img = load_image(read.front().path);
  EXPECT_EQ(img.width(), 64);
  EXPECT_EQ(img.height(), 64);
}

TEST(GenerateCorpus, SameSeedSameBytes) {
  SynthConfig cfg;
  cfg.categories = 2;
  cfg.per_category = 3;
  const auto a = testing::scratch_dir("corpus_a");
  const auto b = testing::scratch_dir("corpus_b");
  const auto ma = generate_corpus(cfg, a);
  generate_corpus(cfg, b);
  EXPECT_EQ(read_file(a / "manifest.csv"), read_file(b / "manifest.csv"));
  for (const auto& e : ma) EXPECT_EQ(read_file(a / e.path), read_file(b / e.path)) << e.path;
}

TEST(GenerateCorpus, RejectsBadConfig) {
  SynthConfig cfg;
  cfg.categories = 0;
  EXPECT_THROW(cfg.validate(), Error);
  cfg.categories = 4;
  cfg.per_category = 0;
  EXPECT_THROW(cfg.validate(), Error);
  cfg.per_category = 1;
  cfg.width = 2;
  EXPECT_THROW(cfg.validate(), Error);
}

TEST(GenerateCorpus, SameHueCategoriesAreSeparatedByOrientation) {
  const QuantizationScheme s{10, 4, 4, 4};
  const auto cats = synth_categories(2);  // red-vertical, red-horizontal
  std::vector<Eigen::VectorXd> vertical, horizontal;
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    vertical.push_back(extract(synth_image(cats[0], seed, 64, 64), s).values);
    horizontal.push_back(extract(synth_image(cats[1], 100 + seed, 64, 64), s).values);
  }
  double worst_within = 0.0;
  double best_across = 1e9;
  for (std::size_t i = 0; i < 6; ++i) {
    for (std::size_t j = 0; j < 6; ++j) {
      if (i < j) {
        worst_within = std::max({worst_within, distance(vertical[i], vertical[j]),
                                 distance(horizontal[i], horizontal[j])});
      }
      best_across = std::min(best_across, distance(vertical[i], horizontal[j]));
    }
  }
  EXPECT_GT(best_across, worst_within);
}

}  // namespace
}  // namespace mixhist
