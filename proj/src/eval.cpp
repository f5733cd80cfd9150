#include "mixhist/eval.hpp"

#include <algorithm>
#include <exception>
#include <map>
#include <mutex>
#include <random>
#include <sstream>
#include <unordered_map>

#include "mixhist/io.hpp"
#include "parallel.hpp"

namespace mixhist {

namespace {

std::uint64_t uniform_below(std::mt19937_64& gen, std::uint64_t bound) {
  // Rejects the low residue so every value in [0, bound) is equally likely.
  const std::uint64_t threshold = (0 - bound) % bound;
  for (;;) {
    const std::uint64_t r = gen();
    if (r >= threshold) return r % bound;
  }
}

struct Query {
  std::string image_id;
  std::string category;
  std::size_t record = 0;
};

std::vector<Query> resolve_queries(const FeatureDB& db, const EvalConfig& config,
                                   const std::vector<ManifestEntry>& manifest) {
  const auto ids = sample_queries(manifest, config.queries_per_category, config.rng_seed);
  std::unordered_map<std::string, std::size_t> position;
  position.reserve(db.records.size());
  for (std::size_t i = 0; i < db.records.size(); ++i) position.emplace(db.records[i].image_id, i);
  std::unordered_map<std::string, const ManifestEntry*> by_id;
  for (const auto& e : manifest) by_id.emplace(e.image_id, &e);

  std::vector<Query> queries;
  queries.reserve(ids.size());
  for (const auto& id : ids) {
    const auto it = position.find(id);
    if (it == position.end()) {
      throw Error(ErrorCode::InvalidArgument, "query '" + id + "' is not in the feature DB");
    }
    queries.push_back({id, by_id.at(id)->category, it->second});
  }
  return queries;
}

std::unordered_map<std::string, std::size_t> category_sizes(const FeatureDB& db) {
  std::unordered_map<std::string, std::size_t> sizes;
  for (const auto& r : db.records) ++sizes[r.category];
  return sizes;
}

// Per-query (precision, recall) at each depth, queries in sample order.
std::vector<std::vector<PrecisionRecall>> score_queries(const FeatureDB& db,
                                                        const std::vector<Query>& queries,
                                                        const std::vector<std::size_t>& depths,
                                                        MetricMode mode, unsigned threads) {
  const auto sizes = category_sizes(db);
  const std::size_t deepest = *std::max_element(depths.begin(), depths.end());
  std::vector<std::vector<PrecisionRecall>> out(queries.size());
  std::exception_ptr failure;
  std::mutex mu;
  detail::parallel_for(queries.size(), threads, [&](std::size_t k) {
    try {
      const auto& q = queries[k];
      const auto it = sizes.find(q.category);
      if (it == sizes.end()) {
        throw Error(ErrorCode::UnknownCategory, "category '" + q.category + "' not in DB");
      }
      const auto ranked = rank(db, db.records[q.record].vector, deepest, mode);
      std::vector<PrecisionRecall> row;
      row.reserve(depths.size());
      std::size_t relevant = 0;
      std::size_t seen = 0;
      for (const auto n : depths) {
        for (; seen < std::min(n, ranked.size()); ++seen) {
          if (db.records[ranked.entries[seen].record].category == q.category) ++relevant;
        }
        row.push_back({static_cast<double>(relevant) / static_cast<double>(n),
                       static_cast<double>(relevant) / static_cast<double>(it->second), relevant,
                       it->second});
      }
      out[k] = std::move(row);
    } catch (...) {
      std::lock_guard lock(mu);
      if (!failure) failure = std::current_exception();
    }
  });
  if (failure) std::rethrow_exception(failure);
  return out;
}

void validate_depths(const std::vector<std::size_t>& depths) {
  if (depths.empty()) throw Error(ErrorCode::InvalidArgument, "need at least one depth");
  for (std::size_t i = 0; i < depths.size(); ++i) {
    if (depths[i] == 0) throw Error(ErrorCode::InvalidArgument, "depths must be positive");
    if (i > 0 && depths[i] <= depths[i - 1]) {
      throw Error(ErrorCode::InvalidArgument, "depths must be strictly ascending");
    }
  }
}

}  // namespace

void EvalConfig::validate() const {
  if (n_retrieved < 1) throw Error(ErrorCode::InvalidArgument, "n_retrieved must be >= 1");
  if (queries_per_category < 1) {
    throw Error(ErrorCode::InvalidArgument, "queries_per_category must be >= 1");
  }
}

std::vector<std::string> sample_queries(const std::vector<ManifestEntry>& manifest,
                                        std::size_t per_category, std::uint64_t seed) {
  if (per_category < 1) throw Error(ErrorCode::InvalidArgument, "per_category must be >= 1");
  std::vector<std::string> order;
  std::unordered_map<std::string, std::vector<std::string>> members;
  for (const auto& e : manifest) {
    auto [it, inserted] = members.try_emplace(e.category);
    if (inserted) order.push_back(e.category);
    it->second.push_back(e.image_id);
  }
  std::mt19937_64 gen(seed);
  std::vector<std::string> picked;
  picked.reserve(order.size() * per_category);
  for (const auto& category : order) {
    auto& ids = members[category];
    if (ids.size() < per_category) {
      throw Error(ErrorCode::CategoryTooSmall,
                  "category '" + category + "' has " + std::to_string(ids.size()) +
                      " images, fewer than " + std::to_string(per_category));
    }
    for (std::size_t i = ids.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(uniform_below(gen, i));
      std::swap(ids[i - 1], ids[j]);
    }
    picked.insert(picked.end(), ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(per_category));
  }
  return picked;
}

PrecisionRecall precision_recall_at(const RankedResult& result, const std::string& query_category,
                                    const FeatureDB& db, std::size_t n) {
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "precision_recall_at: n must be positive");
  std::size_t category_size = 0;
  for (const auto& r : db.records) category_size += r.category == query_category ? 1 : 0;
  if (category_size == 0) {
    throw Error(ErrorCode::UnknownCategory, "category '" + query_category + "' not in DB");
  }
  const std::size_t depth = std::min(n, db.records.size());
  if (result.entries.size() < depth) {
    throw Error(ErrorCode::InvalidArgument, "precision_recall_at: ranking shorter than n");
  }
  std::size_t relevant = 0;
  for (std::size_t k = 0; k < depth; ++k) {
    const auto& e = result.entries[k];
    std::size_t rec = e.record;
    if (rec >= db.records.size() || db.records[rec].image_id != e.image_id) {
      const auto found = db.find(e.image_id);
      if (!found) {
        throw Error(ErrorCode::InvalidArgument, "ranked id '" + e.image_id + "' not in DB");
      }
      rec = *found;
    }
    if (db.records[rec].category == query_category) ++relevant;
  }
  return {static_cast<double>(relevant) / static_cast<double>(n),
          static_cast<double>(relevant) / static_cast<double>(category_size), relevant,
          category_size};
}

EvalReport run_benchmark(const FeatureDB& db, const EvalConfig& config,
                         const std::vector<ManifestEntry>& manifest, unsigned threads) {
  config.validate();
  const auto queries = resolve_queries(db, config, manifest);
  const auto scores = score_queries(db, queries, {config.n_retrieved}, config.metric_mode, threads);
  EvalReport report;
  report.config = config;
  report.per_query.reserve(queries.size());
  double sum_p = 0.0;
  double sum_r = 0.0;
  for (std::size_t k = 0; k < queries.size(); ++k) {
    const auto& pr = scores[k].front();
    report.per_query.push_back({queries[k].image_id, queries[k].category, pr.precision, pr.recall});
    sum_p += pr.precision;
    sum_r += pr.recall;
  }
  if (!queries.empty()) {
    report.mean_precision = sum_p / static_cast<double>(queries.size());
    report.mean_recall = sum_r / static_cast<double>(queries.size());
  }
  return report;
}

std::vector<CurvePoint> pr_curve(const FeatureDB& db, const EvalConfig& config,
                                 const std::vector<ManifestEntry>& manifest,
                                 const std::vector<std::size_t>& n_values, unsigned threads) {
  config.validate();
  validate_depths(n_values);
  const auto queries = resolve_queries(db, config, manifest);
  const auto scores = score_queries(db, queries, n_values, config.metric_mode, threads);
  std::vector<CurvePoint> curve;
  curve.reserve(n_values.size());
  for (std::size_t d = 0; d < n_values.size(); ++d) {
    double sum_p = 0.0;
    double sum_r = 0.0;
    for (const auto& row : scores) {
      sum_p += row[d].precision;
      sum_r += row[d].recall;
    }
    const double count = static_cast<double>(std::max<std::size_t>(scores.size(), 1));
    curve.push_back({n_values[d], sum_r / count, sum_p / count});
  }
  return curve;
}

std::string ColorPreset::label() const {
  for (int nc : {72, 90, 160, 240}) {
    const auto s = QuantizationScheme::from_color_preset(nc, 1);
    if (s.n_h == n_h && s.n_s == n_s && s.n_v == n_v) return std::to_string(nc);
  }
  return std::to_string(n_h) + "x" + std::to_string(n_s) + "x" + std::to_string(n_v);
}

ColorPreset ColorPreset::parse(const std::string& text) {
  const auto bad = [&] {
    return Error(ErrorCode::InvalidArgument, "bad color preset '" + text + "'");
  };
  if (text.find('x') != std::string::npos) {
    int h = 0, s = 0, v = 0;
    char x1 = 0, x2 = 0;
    std::istringstream in(text);
    if (!(in >> h >> x1 >> s >> x2 >> v) || x1 != 'x' || x2 != 'x' || !in.eof()) throw bad();
    const ColorPreset p{h, s, v};
    p.with_orientations(1).validate();
    return p;
  }
  std::size_t used = 0;
  int nc = 0;
  try {
    nc = std::stoi(text, &used);
  } catch (const std::exception&) {
    throw bad();
  }
  if (used != text.size()) throw bad();
  const auto s = QuantizationScheme::from_color_preset(nc, 1);
  return {s.n_h, s.n_s, s.n_v};
}

SweepGrid sweep(const std::vector<ManifestEntry>& manifest, const std::vector<int>& n_q_values,
                const std::vector<ColorPreset>& presets, const EvalConfig& config,
                unsigned threads) {
  config.validate();
  if (n_q_values.empty() || presets.empty()) {
    throw Error(ErrorCode::InvalidArgument, "sweep needs at least one n_q and one preset");
  }
  std::vector<QuantizationScheme> schemes;
  for (const int nq : n_q_values) {
    for (const auto& p : presets) {
      schemes.push_back(p.with_orientations(nq));
      schemes.back().validate();
    }
  }
  // Fail on an undersized category before the expensive indexing pass.
  (void)sample_queries(manifest, config.queries_per_category, config.rng_seed);
  const auto dbs = build_indexes(manifest, schemes, threads);

  SweepGrid grid{n_q_values, presets,
                 Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n_q_values.size()),
                                       static_cast<Eigen::Index>(presets.size())),
                 config.metric_mode};
  for (std::size_t r = 0; r < n_q_values.size(); ++r) {
    for (std::size_t c = 0; c < presets.size(); ++c) {
      const auto& db = dbs[r * presets.size() + c];
      grid.mean_precision(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          run_benchmark(db, config, manifest, threads).mean_precision;
    }
  }
  return grid;
}

std::string report_csv(const EvalReport& report) {
  std::string out = "image_id,precision,recall\n";
  for (const auto& q : report.per_query) {
    out += csv_field(q.image_id) + ',' + format_double(q.precision) + ',' +
           format_double(q.recall) + '\n';
  }
  out += "mean[" + std::string(to_string(report.config.metric_mode)) + "]," +
         format_double(report.mean_precision) + ',' + format_double(report.mean_recall) + '\n';
  return out;
}

std::string report_text(const EvalReport& report) {
  std::ostringstream out;
  out.setf(std::ios::fixed);
  out.precision(2);
  out << "queries:   " << report.per_query.size() << " (" << report.config.queries_per_category
      << " per category, seed " << report.config.rng_seed << ")\n"
      << "retrieved: N = " << report.config.n_retrieved << "\n"
      << "metric:    " << to_string(report.config.metric_mode) << "\n"
      << "precision: " << 100.0 * report.mean_precision << " %\n"
      << "recall:    " << 100.0 * report.mean_recall << " %\n";
  return out.str();
}

std::string pr_curve_csv(const std::vector<CurvePoint>& curve) {
  std::string out = "n,recall,precision\n";
  for (const auto& p : curve) {
    out += std::to_string(p.n) + ',' + format_double(p.mean_recall) + ',' +
           format_double(p.mean_precision) + '\n';
  }
  return out;
}

std::string sweep_csv(const SweepGrid& grid) {
  std::string out = "n_q";
  for (const auto& p : grid.presets) out += ',' + p.label();
  out += '\n';
  for (std::size_t r = 0; r < grid.n_q_values.size(); ++r) {
    out += std::to_string(grid.n_q_values[r]);
    for (std::size_t c = 0; c < grid.presets.size(); ++c) {
      out += ',' + format_double(grid.mean_precision(static_cast<Eigen::Index>(r),
                                                     static_cast<Eigen::Index>(c)));
    }
    out += '\n';
  }
  return out;
}

}  // namespace mixhist
