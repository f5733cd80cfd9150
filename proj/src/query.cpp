#include "mixhist/query.hpp"

#include <algorithm>
#include <numeric>

#include "parallel.hpp"

namespace mixhist {

std::string_view to_string(MetricMode mode) noexcept {
  return mode == MetricMode::Canonical ? "canonical" : "literal";
}

MetricMode parse_metric_mode(std::string_view text) {
  if (text == "canonical") return MetricMode::Canonical;
  if (text == "literal") return MetricMode::Literal;
  throw Error(ErrorCode::InvalidArgument,
              "unknown metric '" + std::string(text) + "' (expected canonical|literal)");
}

RankedResult rank(const FeatureDB& db, const Eigen::VectorXd& query, std::size_t n,
                  MetricMode mode, unsigned threads) {
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "rank: n must be positive");
  if (query.size() != db.scheme.feature_length()) {
    throw Error(ErrorCode::SchemeMismatch, "rank: query length " + std::to_string(query.size()) +
                                               " does not match DB feature length " +
                                               std::to_string(db.scheme.feature_length()));
  }
  const std::size_t total = db.records.size();
  std::vector<double> dist(total);
  constexpr std::size_t kShard = 256;
  const std::size_t shards = (total + kShard - 1) / kShard;
  detail::parallel_for(shards, threads, [&](std::size_t s) {
    const std::size_t end = std::min(total, (s + 1) * kShard);
    for (std::size_t i = s * kShard; i < end; ++i) {
      dist[i] = distance(db.records[i].vector, query, mode);
    }
  });

  std::vector<std::size_t> order(total);
  std::iota(order.begin(), order.end(), std::size_t{0});
  const auto before = [&](std::size_t a, std::size_t b) {
    if (dist[a] != dist[b]) return dist[a] < dist[b];
    return db.records[a].image_id < db.records[b].image_id;
  };
  const std::size_t keep = std::min(n, total);
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(keep), order.end(),
                    before);

  RankedResult result;
  result.mode = mode;
  result.entries.reserve(keep);
  for (std::size_t k = 0; k < keep; ++k) {
    const auto i = order[k];
    result.entries.push_back({db.records[i].image_id, dist[i], i});
  }
  return result;
}

RankedResult rank(const FeatureDB& db, const FeatureVector& query, std::size_t n,
                  MetricMode mode, unsigned threads) {
  if (!(query.scheme == db.scheme)) {
    throw Error(ErrorCode::SchemeMismatch, "rank: query extracted with a different scheme");
  }
  return rank(db, query.values, n, mode, threads);
}

}  // namespace mixhist
