#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "mixhist/descriptor.hpp"

namespace mixhist {

struct ManifestEntry {
  std::string image_id;
  std::filesystem::path path;
  std::string category;

  bool operator==(const ManifestEntry&) const = default;
};

/// Parses a UTF-8 CSV with header `image_id,path,category`. Relative paths are
/// resolved against the manifest's directory.
std::vector<ManifestEntry> read_manifest(const std::filesystem::path& path);
std::vector<ManifestEntry> parse_manifest(const std::string& text,
                                          const std::filesystem::path& base_dir = {});

void write_manifest(const std::vector<ManifestEntry>& entries, const std::filesystem::path& path);

struct FeatureRecord {
  std::string image_id;
  std::string category;
  Eigen::VectorXd vector;

  bool operator==(const FeatureRecord& o) const {
    return image_id == o.image_id && category == o.category && vector.size() == o.vector.size() &&
           vector == o.vector;
  }
};

/// Scheme header plus one record per indexed image, in manifest order.
struct FeatureDB {
  QuantizationScheme scheme;
  std::vector<FeatureRecord> records;

  std::size_t size() const noexcept { return records.size(); }
  bool empty() const noexcept { return records.empty(); }

  /// Record position for an id, or nullopt.
  std::optional<std::size_t> find(const std::string& image_id) const;

  /// Checks vector lengths, id uniqueness and normalization; throws on violation.
  void validate() const;

  bool operator==(const FeatureDB&) const = default;
};

/// Extracts one record per entry. Extraction runs on `threads` workers (0 = all cores)
/// but records keep manifest order. The first failing entry aborts the build with an
/// ExtractionFailed error naming its image_id.
FeatureDB build_index(const std::vector<ManifestEntry>& manifest,
                      const QuantizationScheme& scheme, unsigned threads = 0);

/// Index build that analyzes each image once and bins it under every scheme given.
std::vector<FeatureDB> build_indexes(const std::vector<ManifestEntry>& manifest,
                                     std::span<const QuantizationScheme> schemes,
                                     unsigned threads = 0);

/// Binary layout (little-endian): "MIXHDB01", u16 n_h n_s n_v n_q, u64 record count,
/// then per record u32-length-prefixed image_id and category followed by the vector
/// as f64, and a trailing CRC-32 over everything before it.
std::vector<std::uint8_t> encode_db(const FeatureDB& db);
FeatureDB decode_db(std::span<const std::uint8_t> bytes);

void save_db(const FeatureDB& db, const std::filesystem::path& path);
FeatureDB load_db(const std::filesystem::path& path);

}  // namespace mixhist
