#include "mixhist/index.hpp"

#include <atomic>
#include <bit>
#include <cmath>
#include <cstring>
#include <limits>
#include <mutex>
#include <sstream>
#include <unordered_set>

#include <zlib.h>

#include "mixhist/io.hpp"
#include "parallel.hpp"

namespace mixhist {

namespace {

constexpr char kMagic[8] = {'M', 'I', 'X', 'H', 'D', 'B', '0', '1'};
constexpr std::size_t kMagicFamily = 6;  // "MIXHDB"; the last two bytes are the version

std::string_view trim_line_end(std::string_view line) {
  while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) line.remove_suffix(1);
  return line;
}

class Writer {
 public:
  void bytes(const void* p, std::size_t n) {
    const auto* b = static_cast<const std::uint8_t*>(p);
    out_.insert(out_.end(), b, b + n);
  }
  template <typename T>
  void le(T value) {
    using U = std::make_unsigned_t<T>;
    auto u = static_cast<U>(value);
    for (std::size_t i = 0; i < sizeof(T); ++i) {
      out_.push_back(static_cast<std::uint8_t>(u & 0xffu));
      u = static_cast<U>(u >> 8);
    }
  }
  void f64(double v) { le(std::bit_cast<std::uint64_t>(v)); }
  void str(const std::string& s) {
    if (s.size() > std::numeric_limits<std::uint32_t>::max()) {
      throw Error(ErrorCode::InvalidArgument, "string too long for DB format");
    }
    le(static_cast<std::uint32_t>(s.size()));
    bytes(s.data(), s.size());
  }
  std::vector<std::uint8_t>& buffer() { return out_; }

 private:
  std::vector<std::uint8_t> out_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> in) : in_(in) {}

  template <typename T>
  T le() {
    need(sizeof(T));
    std::make_unsigned_t<T> u = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) {
      u |= static_cast<std::make_unsigned_t<T>>(static_cast<std::make_unsigned_t<T>>(in_[pos_ + i])
                                                << (8 * i));
    }
    pos_ += sizeof(T);
    return static_cast<T>(u);
  }
  double f64() { return std::bit_cast<double>(le<std::uint64_t>()); }
  std::string str() {
    const auto n = le<std::uint32_t>();
    need(n);
    std::string s(reinterpret_cast<const char*>(in_.data() + pos_), n);
    pos_ += n;
    return s;
  }
  std::size_t remaining() const { return in_.size() - pos_; }

 private:
  void need(std::size_t n) const {
    if (in_.size() - pos_ < n) throw Error(ErrorCode::ChecksumMismatch, "DB file truncated");
  }
  std::span<const std::uint8_t> in_;
  std::size_t pos_ = 0;
};

std::uint32_t crc32_of(std::span<const std::uint8_t> bytes) {
  uLong crc = crc32(0L, Z_NULL, 0);
  // zlib takes uInt lengths; feed in chunks.
  std::size_t off = 0;
  while (off < bytes.size()) {
    const auto chunk = static_cast<uInt>(std::min<std::size_t>(bytes.size() - off, 1u << 30));
    crc = crc32(crc, bytes.data() + off, chunk);
    off += chunk;
  }
  return static_cast<std::uint32_t>(crc);
}

}  // namespace

std::vector<ManifestEntry> parse_manifest(const std::string& text,
                                          const std::filesystem::path& base_dir) {
  std::vector<ManifestEntry> entries;
  std::unordered_set<std::string> seen;
  std::istringstream in(text);
  std::string raw;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = trim_line_end(raw);
    if (line_no == 1 && line.starts_with("\xEF\xBB\xBF")) line.remove_prefix(3);
    if (line.empty()) continue;
    auto fields = split_csv_line(line);
    if (!header_seen) {
      if (fields.size() != 3 || fields[0] != "image_id" || fields[1] != "path" ||
          fields[2] != "category") {
        throw Error(ErrorCode::MalformedRow, "manifest header must be image_id,path,category");
      }
      header_seen = true;
      continue;
    }
    if (fields.size() != 3) {
      throw Error(ErrorCode::MalformedRow, "manifest line " + std::to_string(line_no) +
                                               ": expected 3 columns, got " +
                                               std::to_string(fields.size()));
    }
    if (fields[0].empty() || fields[1].empty()) {
      throw Error(ErrorCode::MalformedRow,
                  "manifest line " + std::to_string(line_no) + ": empty image_id or path");
    }
    if (!seen.insert(fields[0]).second) {
      throw Error(ErrorCode::DuplicateId, "duplicate image_id '" + fields[0] + "' on line " +
                                              std::to_string(line_no));
    }
    std::filesystem::path p = fields[1];
    if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
    entries.push_back({std::move(fields[0]), std::move(p), std::move(fields[2])});
  }
  if (!header_seen) throw Error(ErrorCode::MalformedRow, "manifest is missing its header");
  return entries;
}

std::vector<ManifestEntry> read_manifest(const std::filesystem::path& path) {
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec)) {
    throw Error(ErrorCode::MissingFile, "manifest not found: " + path.string());
  }
  return parse_manifest(read_text_file(path), path.parent_path());
}

void write_manifest(const std::vector<ManifestEntry>& entries, const std::filesystem::path& path) {
  std::string out = "image_id,path,category\n";
  for (const auto& e : entries) {
    out += csv_field(e.image_id) + ',' + csv_field(e.path.generic_string()) + ',' +
           csv_field(e.category) + '\n';
  }
  write_file_atomic(path, out);
}

std::optional<std::size_t> FeatureDB::find(const std::string& image_id) const {
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (records[i].image_id == image_id) return i;
  }
  return std::nullopt;
}

void FeatureDB::validate() const {
  scheme.validate();
  std::unordered_set<std::string> ids;
  for (const auto& r : records) {
    if (r.vector.size() != scheme.feature_length()) {
      throw Error(ErrorCode::SchemeMismatch, "record '" + r.image_id + "' has length " +
                                                 std::to_string(r.vector.size()));
    }
    if (!ids.insert(r.image_id).second) {
      throw Error(ErrorCode::DuplicateId, "duplicate image_id '" + r.image_id + "' in DB");
    }
    if (std::abs(r.vector.sum() - 1.0) > 1e-9 || (r.vector.array() < 0.0).any()) {
      throw Error(ErrorCode::InvalidArgument, "record '" + r.image_id + "' is not normalized");
    }
  }
}

std::vector<FeatureDB> build_indexes(const std::vector<ManifestEntry>& manifest,
                                     std::span<const QuantizationScheme> schemes,
                                     unsigned threads) {
  for (const auto& s : schemes) s.validate();
  std::vector<FeatureDB> dbs(schemes.size());
  for (std::size_t k = 0; k < schemes.size(); ++k) {
    dbs[k].scheme = schemes[k];
    dbs[k].records.resize(manifest.size());
  }
  {
    std::unordered_set<std::string> ids;
    for (const auto& e : manifest) {
      if (!ids.insert(e.image_id).second) {
        throw Error(ErrorCode::DuplicateId, "duplicate image_id '" + e.image_id + "'");
      }
    }
  }

  std::atomic<bool> stop{false};
  std::mutex fail_mu;
  std::optional<std::size_t> fail_index;
  std::string fail_message;

  detail::parallel_for(
      manifest.size(), threads,
      [&](std::size_t i) {
        const auto& entry = manifest[i];
        try {
          const auto analysis = analyze(load_image(entry.path));
          for (std::size_t k = 0; k < schemes.size(); ++k) {
            dbs[k].records[i] = {entry.image_id, entry.category,
                                 extract(analysis, schemes[k]).values};
          }
        } catch (const std::exception& e) {
          std::lock_guard lock(fail_mu);
          if (!fail_index || i < *fail_index) {
            fail_index = i;
            fail_message = e.what();
          }
          stop = true;
        }
      },
      &stop);

  if (fail_index) {
    throw Error(ErrorCode::ExtractionFailed,
                "image '" + manifest[*fail_index].image_id + "': " + fail_message);
  }
  return dbs;
}

FeatureDB build_index(const std::vector<ManifestEntry>& manifest,
                      const QuantizationScheme& scheme, unsigned threads) {
  auto dbs = build_indexes(manifest, std::span(&scheme, 1), threads);
  return std::move(dbs.front());
}

std::vector<std::uint8_t> encode_db(const FeatureDB& db) {
  db.scheme.validate();
  Writer w;
  w.bytes(kMagic, sizeof(kMagic));
  w.le(static_cast<std::uint16_t>(db.scheme.n_h));
  w.le(static_cast<std::uint16_t>(db.scheme.n_s));
  w.le(static_cast<std::uint16_t>(db.scheme.n_v));
  w.le(static_cast<std::uint16_t>(db.scheme.n_q));
  w.le(static_cast<std::uint64_t>(db.records.size()));
  const auto length = db.scheme.feature_length();
  for (const auto& r : db.records) {
    if (r.vector.size() != length) {
      throw Error(ErrorCode::SchemeMismatch, "record '" + r.image_id + "' has wrong length");
    }
    w.str(r.image_id);
    w.str(r.category);
    for (Eigen::Index i = 0; i < length; ++i) w.f64(r.vector(i));
  }
  w.le(crc32_of(w.buffer()));
  return std::move(w.buffer());
}

FeatureDB decode_db(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < sizeof(kMagic) ||
      std::memcmp(bytes.data(), kMagic, kMagicFamily) != 0) {
    throw Error(ErrorCode::BadMagic, "not a mix-histogram feature DB");
  }
  if (std::memcmp(bytes.data() + kMagicFamily, kMagic + kMagicFamily,
                  sizeof(kMagic) - kMagicFamily) != 0) {
    throw Error(ErrorCode::VersionMismatch,
                "unsupported DB version '" +
                    std::string(reinterpret_cast<const char*>(bytes.data()) + kMagicFamily, 2) +
                    "'");
  }
  if (bytes.size() < sizeof(kMagic) + 8 + 8 + 4) {
    throw Error(ErrorCode::ChecksumMismatch, "DB file truncated");
  }
  const auto body = bytes.first(bytes.size() - 4);
  Reader tail(bytes.last(4));
  if (tail.le<std::uint32_t>() != crc32_of(body)) {
    throw Error(ErrorCode::ChecksumMismatch, "DB checksum mismatch");
  }

  Reader r(body.subspan(sizeof(kMagic)));
  FeatureDB db;
  db.scheme.n_h = r.le<std::uint16_t>();
  db.scheme.n_s = r.le<std::uint16_t>();
  db.scheme.n_v = r.le<std::uint16_t>();
  db.scheme.n_q = r.le<std::uint16_t>();
  db.scheme.validate();
  const auto count = r.le<std::uint64_t>();
  const auto length = db.scheme.feature_length();
  // Each record needs at least its two length prefixes and the vector.
  const std::uint64_t min_record = 8 + 8 * static_cast<std::uint64_t>(length);
  if (count > r.remaining() / min_record) {
    throw Error(ErrorCode::ChecksumMismatch, "DB record count exceeds payload");
  }
  db.records.reserve(count);
  for (std::uint64_t k = 0; k < count; ++k) {
    FeatureRecord rec;
    rec.image_id = r.str();
    rec.category = r.str();
    rec.vector.resize(length);
    for (Eigen::Index i = 0; i < length; ++i) rec.vector(i) = r.f64();
    db.records.push_back(std::move(rec));
  }
  if (r.remaining() != 0) throw Error(ErrorCode::ChecksumMismatch, "trailing bytes in DB");
  return db;
}

void save_db(const FeatureDB& db, const std::filesystem::path& path) {
  const auto bytes = encode_db(db);
  write_file_atomic(path, std::string_view(reinterpret_cast<const char*>(bytes.data()),
                                           bytes.size()));
}

FeatureDB load_db(const std::filesystem::path& path) {
  std::vector<std::uint8_t> bytes;
  try {
    bytes = read_file(path);
  } catch (const Error& e) {
    throw Error(ErrorCode::IOError, e.what());
  }
  return decode_db(bytes);
}

}  // namespace mixhist
