#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "mixhist/descriptor.hpp"
#include "mixhist/index.hpp"

namespace mixhist {

/// Denominator variant of the mean-offset distance.
///   canonical: |t_i + mean(t)| + |q_i + mean(q)|   (symmetric)
///   literal:   |t_i + mean(t)| + |q_i - mean(q)|
enum class MetricMode { Canonical, Literal };

std::string_view to_string(MetricMode mode) noexcept;
/// Accepts "canonical" or "literal"; throws InvalidArgument otherwise.
MetricMode parse_metric_mode(std::string_view text);

/// Sum over i of |t_i - q_i| / denominator_i. Terms with a zero denominator contribute 0.
template <typename DerivedT, typename DerivedQ>
double distance(const Eigen::DenseBase<DerivedT>& t, const Eigen::DenseBase<DerivedQ>& q,
                MetricMode mode = MetricMode::Canonical) {
  if (t.size() != q.size()) {
    throw Error(ErrorCode::DimensionMismatch, "distance: vectors differ in length");
  }
  if (t.size() == 0) throw Error(ErrorCode::InvalidArgument, "distance: empty vectors");
  const auto ta = t.derived().array().template cast<double>();
  const auto qa = q.derived().array().template cast<double>();
  const double mean_t = ta.mean();
  const double mean_q = qa.mean();
  const double sign = mode == MetricMode::Canonical ? 1.0 : -1.0;
  const Eigen::ArrayXd numer = (ta - qa).abs();
  const Eigen::ArrayXd denom = (ta + mean_t).abs() + (qa + sign * mean_q).abs();
  return (denom > 0.0).select(numer / denom, 0.0).sum();
}

inline double distance(const FeatureVector& t, const FeatureVector& q,
                       MetricMode mode = MetricMode::Canonical) {
  return distance(t.values, q.values, mode);
}

struct RankedEntry {
  std::string image_id;
  double distance = 0.0;
  /// Position of the record in the DB it was ranked against.
  std::size_t record = 0;

  bool operator==(const RankedEntry&) const = default;
};

/// Ascending distance, ties by ascending image_id.
struct RankedResult {
  std::vector<RankedEntry> entries;
  MetricMode mode = MetricMode::Canonical;

  std::size_t size() const noexcept { return entries.size(); }
};

/// Full scan of the DB, top-n by (distance, image_id). The query's own record, if
/// present, is kept. The scan may be sharded over `threads` workers; the result is
/// identical to the single-threaded one.
RankedResult rank(const FeatureDB& db, const Eigen::VectorXd& query, std::size_t n,
                  MetricMode mode = MetricMode::Canonical, unsigned threads = 1);
RankedResult rank(const FeatureDB& db, const FeatureVector& query, std::size_t n,
                  MetricMode mode = MetricMode::Canonical, unsigned threads = 1);

}  // namespace mixhist
