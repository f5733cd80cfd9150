#include <fstream>

#include <gtest/gtest.h>

#include "mixhist/index.hpp"
#include "mixhist/io.hpp"
#include "test_support.hpp"

namespace mixhist {
namespace {

using testing::scratch_dir;

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::InvalidArgument;
}

void write_text(const std::filesystem::path& p, const std::string& text) {
  std::ofstream(p, std::ios::binary) << text;
}

TEST(Manifest, ParsesRowsInOrder) {
  const auto entries =
      parse_manifest("image_id,path,category\na,img/a.png,cats\nb,/abs/b.jpg,dogs\n", "/data");
  ASSERT_EQ(entries.size(), 2u);
  EXPECT_EQ(entries[0], (ManifestEntry{"a", "/data/img/a.png", "cats"}));
  EXPECT_EQ(entries[1], (ManifestEntry{"b", "/abs/b.jpg", "dogs"}));
}

TEST(Manifest, ToleratesCrlfBomAndQuotedFields) {
  const auto entries = parse_manifest(
      "\xEF\xBB\xBFimage_id,path,category\r\n\"x,1\",\"dir/with, comma.png\",\"say \"\"hi\"\"\"\r\n\r\n");
  ASSERT_EQ(entries.size(), 1u);
  EXPECT_EQ(entries[0].image_id, "x,1");
  EXPECT_EQ(entries[0].path, "dir/with, comma.png");
  EXPECT_EQ(entries[0].category, "say \"hi\"");
}

TEST(Manifest, Errors) {
  EXPECT_EQ(code_of([] { parse_manifest("image_id,path,category\na,p,c\na,q,c\n"); }),
            ErrorCode::DuplicateId);
  EXPECT_EQ(code_of([] { parse_manifest("image_id,path,category\na,p\n"); }),
            ErrorCode::MalformedRow);
  EXPECT_EQ(code_of([] { parse_manifest("image_id,path,category\na,p,c,extra\n"); }),
            ErrorCode::MalformedRow);
  EXPECT_EQ(code_of([] { parse_manifest("id,file,label\na,p,c\n"); }), ErrorCode::MalformedRow);
  EXPECT_EQ(code_of([] { parse_manifest("image_id,path,category\na,,c\n"); }),
            ErrorCode::MalformedRow);
  EXPECT_EQ(code_of([] { read_manifest("/nonexistent/manifest.csv"); }), ErrorCode::MissingFile);
}

TEST(Manifest, ReadResolvesAgainstManifestDirectory) {
  const auto dir = scratch_dir("manifest_read");
  write_text(dir / "m.csv", "image_id,path,category\nq,pics/q.png,x\n");
  const auto entries = read_manifest(dir / "m.csv");
  ASSERT_EQ(entries.size(), 1u);
  EXPECT_EQ(entries[0].path, dir / "pics/q.png");
}

TEST(Manifest, WriteThenReadRoundTrips) {
  const auto dir = scratch_dir("manifest_write");
  const std::vector<ManifestEntry> entries = {{"a", "images/a.png", "red"},
                                              {"b,2", "images/b.png", "blue \"x\""}};
  write_manifest(entries, dir / "m.csv");
  const auto back = read_manifest(dir / "m.csv");
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[1].image_id, "b,2");
  EXPECT_EQ(back[1].category, "blue \"x\"");
  EXPECT_EQ(back[0].path, dir / "images/a.png");
}

std::vector<ManifestEntry> write_corpus(const std::filesystem::path& dir, int count,
                                        std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::vector<ManifestEntry> entries;
  for (int i = 0; i < count; ++i) {
    const auto path = dir / ("img" + std::to_string(i) + ".png");
    save_png(testing::random_image(gen, 10 + i, 9), path);
    entries.push_back({"id" + std::to_string(i), path, i % 2 ? "odd" : "even"});
  }
  return entries;
}

TEST(BuildIndex, OneRecordPerEntryInManifestOrder) {
  const auto dir = scratch_dir("build_four");
  const auto entries = write_corpus(dir, 4, 1);
  const QuantizationScheme scheme;
  const auto db = build_index(entries, scheme, 3);
  ASSERT_EQ(db.size(), 4u);
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_EQ(db.records[i].image_id, entries[i].image_id);
    EXPECT_EQ(db.records[i].category, entries[i].category);
    EXPECT_EQ(db.records[i].vector.size(), 640);
    EXPECT_EQ(db.records[i].vector, extract(load_image(entries[i].path), scheme).values);
  }
  EXPECT_NO_THROW(db.validate());
  EXPECT_EQ(build_index(entries, scheme, 1), db);
}

TEST(BuildIndex, EmptyManifestGivesEmptyDb) {
  const auto db = build_index({}, QuantizationScheme{});
  EXPECT_TRUE(db.empty());
  EXPECT_EQ(db.scheme, QuantizationScheme{});
}

TEST(BuildIndex, FailureNamesTheFirstBadImage) {
  const auto dir = scratch_dir("build_fail");
  auto entries = write_corpus(dir, 6, 2);
  entries[2].path = dir / "missing.png";
  entries[4].path = dir / "also_missing.png";
  try {
    build_index(entries, QuantizationScheme{}, 4);
    FAIL() << "expected failure";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ExtractionFailed);
    EXPECT_NE(std::string(e.what()).find("'id2'"), std::string::npos) << e.what();
  }
}

TEST(BuildIndex, MultiSchemeBuildMatchesSingleBuilds) {
  const auto dir = scratch_dir("build_multi");
  const auto entries = write_corpus(dir, 3, 3);
  const std::vector<QuantizationScheme> schemes = {{8, 3, 3, 3}, {10, 4, 4, 5}};
  const auto dbs = build_indexes(entries, schemes);
  ASSERT_EQ(dbs.size(), 2u);
  EXPECT_EQ(dbs[0], build_index(entries, schemes[0]));
  EXPECT_EQ(dbs[1], build_index(entries, schemes[1]));
}

FeatureDB random_db(std::mt19937_64& gen) {
  FeatureDB db;
  db.scheme = {1 + int(gen() % 6), 1 + int(gen() % 3), 1 + int(gen() % 3), 1 + int(gen() % 4)};
  const int count = int(gen() % 8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < count; ++i) {
    Eigen::VectorXd v(db.scheme.feature_length());
    for (auto& x : v) x = u(gen);
    v /= v.sum();
    std::string id = "r" + std::to_string(i) + std::string(gen() % 5, 'z') + "\xC3\xA9";
    db.records.push_back({id, "cat" + std::to_string(gen() % 3), v});
  }
  return db;
}

TEST(FeatureDbFormat, RoundTripIsExactOnRandomDbs) {
  std::mt19937_64 gen(7);
  for (int trial = 0; trial < 50; ++trial) {
    const auto db = random_db(gen);
    const auto bytes = encode_db(db);
    const auto back = decode_db(bytes);
    ASSERT_EQ(back, db);
    ASSERT_EQ(encode_db(back), bytes);
  }
}

TEST(FeatureDbFormat, ByteLayout) {
  FeatureDB db;
  db.scheme = {2, 1, 1, 1};
  db.records.push_back({"ab", "c", Eigen::Vector2d(0.25, 0.75)});
  const auto bytes = encode_db(db);
  const std::vector<std::uint8_t> header = {'M', 'I', 'X', 'H', 'D', 'B', '0', '1',
                                            2, 0, 1, 0, 1, 0, 1, 0,  // n_h n_s n_v n_q
                                            1, 0, 0, 0, 0, 0, 0, 0,  // record count
                                            2, 0, 0, 0, 'a', 'b',    // image_id
                                            1, 0, 0, 0, 'c'};        // category
  ASSERT_EQ(bytes.size(), header.size() + 16 + 4);
  EXPECT_TRUE(std::equal(header.begin(), header.end(), bytes.begin()));
  // 0.25 = 0x3FD0000000000000, little-endian.
  const std::vector<std::uint8_t> quarter = {0, 0, 0, 0, 0, 0, 0xD0, 0x3F};
  EXPECT_TRUE(std::equal(quarter.begin(), quarter.end(), bytes.begin() + header.size()));
}

TEST(FeatureDbFormat, RejectsDamagedFiles) {
  std::mt19937_64 gen(9);
  FeatureDB db = random_db(gen);
  while (db.empty()) db = random_db(gen);
  const auto bytes = encode_db(db);

  for (std::size_t cut : {std::size_t{3}, std::size_t{12}, bytes.size() / 2, bytes.size() - 1}) {
    const std::vector<std::uint8_t> truncated(bytes.begin(), bytes.begin() + cut);
    const auto code = code_of([&] { decode_db(truncated); });
    EXPECT_TRUE(code == ErrorCode::ChecksumMismatch || code == ErrorCode::BadMagic) << cut;
  }

  auto flipped = bytes;
  flipped[flipped.size() / 2] ^= 0x10;
  EXPECT_EQ(code_of([&] { decode_db(flipped); }), ErrorCode::ChecksumMismatch);

  auto magic = bytes;
  magic[0] = 'X';
  EXPECT_EQ(code_of([&] { decode_db(magic); }), ErrorCode::BadMagic);

  auto version = bytes;
  version[7] = '2';
  EXPECT_EQ(code_of([&] { decode_db(version); }), ErrorCode::VersionMismatch);
}

TEST(FeatureDbFormat, SaveAndLoadFiles) {
  const auto dir = scratch_dir("db_files");
  std::mt19937_64 gen(10);
  const auto db = random_db(gen);
  save_db(db, dir / "x.mhdb");
  EXPECT_EQ(load_db(dir / "x.mhdb"), db);
  EXPECT_FALSE(std::filesystem::exists(dir / "x.mhdb.tmp"));
  EXPECT_EQ(code_of([&] { load_db(dir / "nope.mhdb"); }), ErrorCode::IOError);
}

TEST(FeatureDb, ValidateCatchesBrokenInvariants) {
  FeatureDB db;
  db.scheme = {2, 1, 1, 1};
  db.records.push_back({"a", "c", Eigen::Vector2d(0.5, 0.5)});
  EXPECT_NO_THROW(db.validate());
  db.records.push_back({"a", "c", Eigen::Vector2d(0.5, 0.5)});
  EXPECT_EQ(code_of([&] { db.validate(); }), ErrorCode::DuplicateId);
  db.records.back() = {"b", "c", Eigen::Vector3d(0.5, 0.5, 0)};
  EXPECT_EQ(code_of([&] { db.validate(); }), ErrorCode::SchemeMismatch);
  db.records.back() = {"b", "c", Eigen::Vector2d(0.5, 0.6)};
  EXPECT_EQ(code_of([&] { db.validate(); }), ErrorCode::InvalidArgument);
  EXPECT_EQ(db.find("b"), std::optional<std::size_t>(1));
  EXPECT_EQ(db.find("zz"), std::nullopt);
}

}  // namespace
}  // namespace mixhist
