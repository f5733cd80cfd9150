#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "mixhist/index.hpp"
#include "mixhist/query.hpp"

namespace mixhist {

struct EvalConfig {
  std::size_t n_retrieved = 12;
  std::size_t queries_per_category = 20;
  std::uint64_t rng_seed = 42;
  MetricMode metric_mode = MetricMode::Canonical;

  void validate() const;
};

struct PrecisionRecall {
  double precision = 0.0;
  double recall = 0.0;
  std::size_t relevant = 0;     // I_N
  std::size_t category_size = 0;  // M
};

struct QueryScore {
  std::string image_id;
  std::string category;
  double precision = 0.0;
  double recall = 0.0;
};

struct EvalReport {
  double mean_precision = 0.0;
  double mean_recall = 0.0;
  std::vector<QueryScore> per_query;
  EvalConfig config;
};

/// Draws per_category ids uniformly without replacement from every category, categories
/// taken in order of first appearance. The generator is std::mt19937_64 seeded with
/// `seed`; each category's ids (manifest order) get a Fisher-Yates shuffle driven by
/// rejection-sampled bounded draws, and the first per_category are kept.
std::vector<std::string> sample_queries(const std::vector<ManifestEntry>& manifest,
                                        std::size_t per_category, std::uint64_t seed);

/// I_N counts the first n results sharing query_category (the query itself included);
/// M is the number of DB records in that category.
PrecisionRecall precision_recall_at(const RankedResult& result, const std::string& query_category,
                                    const FeatureDB& db, std::size_t n);

EvalReport run_benchmark(const FeatureDB& db, const EvalConfig& config,
                         const std::vector<ManifestEntry>& manifest, unsigned threads = 0);

struct CurvePoint {
  std::size_t n = 0;
  double mean_recall = 0.0;
  double mean_precision = 0.0;
};

/// One benchmark per retrieval depth, all sharing the same query sample.
std::vector<CurvePoint> pr_curve(const FeatureDB& db, const EvalConfig& config,
                                 const std::vector<ManifestEntry>& manifest,
                                 const std::vector<std::size_t>& n_values, unsigned threads = 0);

/// Color factorization for one sweep column.
struct ColorPreset {
  int n_h = 10;
  int n_s = 4;
  int n_v = 4;

  int n_c() const noexcept { return n_h * n_s * n_v; }
  QuantizationScheme with_orientations(int n_q) const { return {n_h, n_s, n_v, n_q}; }
  /// "160" for named presets, "HxSxV" otherwise.
  std::string label() const;
  /// Accepts a named Nc (72, 90, 160, 240) or an explicit "HxSxV".
  static ColorPreset parse(const std::string& text);
};

struct SweepGrid {
  std::vector<int> n_q_values;
  std::vector<ColorPreset> presets;
  Eigen::MatrixXd mean_precision;  // rows: n_q values, cols: presets
  MetricMode mode = MetricMode::Canonical;
};

/// Indexes the manifest under every (n_q, preset) pair and benchmarks each cell against
/// one shared query sample.
SweepGrid sweep(const std::vector<ManifestEntry>& manifest, const std::vector<int>& n_q_values,
                const std::vector<ColorPreset>& presets, const EvalConfig& config,
                unsigned threads = 0);

/// `image_id,precision,recall` rows in query order, then a summary row whose id is
/// `mean[<metric>]`.
std::string report_csv(const EvalReport& report);
std::string report_text(const EvalReport& report);
/// `n,recall,precision`
std::string pr_curve_csv(const std::vector<CurvePoint>& curve);
/// Header `n_q,<preset labels...>`, then one row per n_q.
std::string sweep_csv(const SweepGrid& grid);

}  // namespace mixhist
