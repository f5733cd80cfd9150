#include "mixhist/cli.hpp"

#include <chrono>
#include <cstdio>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mixhist/descriptor.hpp"
#include "mixhist/error.hpp"
#include "mixhist/eval.hpp"
#include "mixhist/index.hpp"
#include "mixhist/io.hpp"
#include "mixhist/query.hpp"
#include "mixhist/synth.hpp"

namespace mixhist {

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::FileNotFound:
    case ErrorCode::MissingFile:
    case ErrorCode::IOError:
      return kExitIO;
    default:
      return kExitData;
  }
}

struct SchemeFlags {
  int n_h = 10;
  int n_s = 4;
  int n_v = 4;
  int n_q = 4;

  void add_to(CLI::App* app) {
    app->add_option("--nh", n_h, "hue bins")->capture_default_str();
    app->add_option("--ns", n_s, "saturation bins")->capture_default_str();
    app->add_option("--nv", n_v, "value bins")->capture_default_str();
    app->add_option("--nq", n_q, "edge-orientation bins")->capture_default_str();
  }

  QuantizationScheme scheme() const {
    const QuantizationScheme s{n_h, n_s, n_v, n_q};
    try {
      s.validate();
    } catch (const Error& e) {
      throw UsageError(e.what());
    }
    return s;
  }
};

struct EvalFlags {
  std::size_t n = 12;
  std::size_t per_category = 20;
  std::uint64_t seed = 42;
  std::string metric = "canonical";

  void add_to(CLI::App* app) {
    app->add_option("--n", n, "images retrieved per query")->capture_default_str();
    app->add_option("--per-category", per_category, "queries drawn per category")
        ->capture_default_str();
    app->add_option("--seed", seed, "query sampling seed")->capture_default_str();
    app->add_option("--metric", metric, "distance denominator: canonical|literal")
        ->capture_default_str();
  }

  EvalConfig config() const {
    EvalConfig c;
    c.n_retrieved = n;
    c.queries_per_category = per_category;
    c.rng_seed = seed;
    try {
      c.metric_mode = parse_metric_mode(metric);
      c.validate();
    } catch (const Error& e) {
      throw UsageError(e.what());
    }
    return c;
  }
};

template <typename T>
std::vector<T> parse_list(const std::string& text, const char* what) {
  std::vector<T> values;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (item.empty()) throw UsageError(std::string("empty entry in ") + what);
    if constexpr (std::is_same_v<T, std::string>) {
      values.push_back(item);
    } else {
      std::size_t used = 0;
      long long v = 0;
      try {
        v = std::stoll(item, &used);
      } catch (const std::exception&) {
        throw UsageError(std::string("bad number '") + item + "' in " + what);
      }
      if (used != item.size() || v < 1) {
        throw UsageError(std::string("bad number '") + item + "' in " + what);
      }
      values.push_back(static_cast<T>(v));
    }
  }
  if (values.empty()) throw UsageError(std::string(what) + " is empty");
  return values;
}

void write_output(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty()) {
    out << text;
  } else {
    write_file_atomic(path, text);
  }
}

int cmd_index(const std::string& manifest_path, const std::string& db_path,
              const SchemeFlags& flags, unsigned threads, std::ostream& out) {
  const auto scheme = flags.scheme();
  const auto start = std::chrono::steady_clock::now();
  const auto manifest = read_manifest(manifest_path);
  const auto db = build_index(manifest, scheme, threads);
  save_db(db, db_path);
  const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
  out << "indexed " << db.size() << " images in " << std::fixed << std::setprecision(2)
      << elapsed.count() << " s -> " << db_path << "\n";
  return kExitOk;
}

int cmd_query(const std::string& db_path, const std::string& image, std::size_t n,
              const std::string& metric, std::ostream& out) {
  if (n < 1) throw UsageError("--n must be >= 1");
  MetricMode mode{};
  try {
    mode = parse_metric_mode(metric);
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  const auto db = load_db(db_path);
  const auto query = extract(load_image(image), db.scheme);
  const auto result = rank(db, query, n, mode, 0);
  std::string text = "rank,image_id,category,distance\n";
  for (std::size_t k = 0; k < result.size(); ++k) {
    const auto& e = result.entries[k];
    text += std::to_string(k + 1) + ',' + csv_field(e.image_id) + ',' +
            csv_field(db.records[e.record].category) + ',' + format_double(e.distance) + '\n';
  }
  out << text;
  return kExitOk;
}

int cmd_eval(const std::string& db_path, const std::string& manifest_path, const EvalFlags& flags,
             const std::string& out_path, const std::string& curve_list,
             const std::string& curve_out, std::ostream& out) {
  const auto config = flags.config();
  std::vector<std::size_t> depths;
  if (!curve_list.empty()) depths = parse_list<std::size_t>(curve_list, "--pr-curve");
  for (std::size_t i = 1; i < depths.size(); ++i) {
    if (depths[i] <= depths[i - 1]) throw UsageError("--pr-curve must be strictly ascending");
  }
  const auto db = load_db(db_path);
  const auto manifest = read_manifest(manifest_path);
  const auto report = run_benchmark(db, config, manifest);
  std::string curve_text;
  if (!depths.empty()) curve_text = pr_curve_csv(pr_curve(db, config, manifest, depths));

  if (!out_path.empty()) write_file_atomic(out_path, report_csv(report));
  if (!curve_text.empty()) write_output(curve_out, curve_text, out);
  out << report_text(report);
  out << std::fixed << std::setprecision(6) << "precision=" << report.mean_precision
      << " recall=" << report.mean_recall << " metric=" << to_string(config.metric_mode) << "\n";
  return kExitOk;
}

int cmd_sweep(const std::string& manifest_path, const std::string& nq_list,
              const std::string& preset_list, const EvalFlags& flags, const std::string& out_path,
              unsigned threads, std::ostream& out) {
  const auto config = flags.config();
  const auto nq_values = parse_list<int>(nq_list, "--nq-list");
  std::vector<ColorPreset> presets;
  for (const auto& p : parse_list<std::string>(preset_list, "--nc-presets")) {
    try {
      presets.push_back(ColorPreset::parse(p));
    } catch (const Error& e) {
      throw UsageError(e.what());
    }
  }
  for (const int nq : nq_values) {
    if (nq > 65535) throw UsageError("--nq-list values must be <= 65535");
  }
  const auto manifest = read_manifest(manifest_path);
  const auto grid = sweep(manifest, nq_values, presets, config, threads);
  write_output(out_path, sweep_csv(grid), out);
  if (!out_path.empty()) {
    out << "swept " << nq_values.size() << "x" << presets.size() << " grid ("
        << to_string(config.metric_mode) << ") -> " << out_path << "\n";
  }
  return kExitOk;
}

int cmd_synth(const std::string& out_dir, const SynthConfig& config, std::ostream& out) {
  try {
    config.validate();
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  const auto manifest = generate_corpus(config, out_dir);
  out << "wrote " << manifest.size() << " images in " << config.categories
      << " categories -> " << (std::filesystem::path(out_dir) / "manifest.csv").string() << "\n";
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Mix-histogram content-based image retrieval"};
  app.require_subcommand(1);

  unsigned threads = 0;
  app.add_option("--threads", threads, "worker threads (0 = all cores)");

  auto* index = app.add_subcommand("index", "extract features for a manifest and save a DB");
  std::string manifest_path, db_path;
  SchemeFlags scheme_flags;
  index->add_option("--manifest", manifest_path, "CSV image_id,path,category")->required();
  index->add_option("--out", db_path, "feature DB to write")->required();
  scheme_flags.add_to(index);

  auto* query = app.add_subcommand("query", "rank DB images against a query image");
  std::string query_db, query_image, query_metric = "canonical";
  std::size_t query_n = 12;
  query->add_option("--db", query_db, "feature DB")->required();
  query->add_option("--image", query_image, "query image (JPEG or PNG)")->required();
  query->add_option("--n", query_n, "results to print")->capture_default_str();
  query->add_option("--metric", query_metric, "canonical|literal")->capture_default_str();

  auto* eval = app.add_subcommand("eval", "precision/recall benchmark over sampled queries");
  std::string eval_db, eval_manifest, eval_out, curve_list, curve_out;
  EvalFlags eval_flags;
  eval->add_option("--db", eval_db, "feature DB")->required();
  eval->add_option("--manifest", eval_manifest, "manifest the DB was built from")->required();
  eval->add_option("--out", eval_out, "per-query report CSV");
  eval->add_option("--pr-curve", curve_list, "comma-separated retrieval depths for a P-R curve");
  eval->add_option("--pr-out", curve_out, "P-R curve CSV (stdout when omitted)");
  eval_flags.add_to(eval);

  auto* sweep_cmd = app.add_subcommand("sweep", "precision grid over orientation x color bins");
  std::string sweep_manifest, sweep_out, nq_list = "3,4,5", preset_list = "72,90,160,240";
  EvalFlags sweep_flags;
  sweep_cmd->add_option("--manifest", sweep_manifest, "image manifest")->required();
  sweep_cmd->add_option("--nq-list", nq_list, "orientation bin counts")->capture_default_str();
  sweep_cmd->add_option("--nc-presets", preset_list, "color presets (Nc or HxSxV)")
      ->capture_default_str();
  sweep_cmd->add_option("--out", sweep_out, "grid CSV (stdout when omitted)");
  sweep_flags.add_to(sweep_cmd);

  auto* synth = app.add_subcommand("synth", "write a synthetic striped-image corpus");
  std::string synth_out;
  SynthConfig synth_config;
  synth->add_option("--out", synth_out, "output directory")->required();
  synth->add_option("--categories", synth_config.categories, "category count")
      ->capture_default_str();
  synth->add_option("--per-category", synth_config.per_category, "images per category")
      ->capture_default_str();
  synth->add_option("--seed", synth_config.seed, "jitter seed")->capture_default_str();
  synth->add_option("--width", synth_config.width, "image width")->capture_default_str();
  synth->add_option("--height", synth_config.height, "image height")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return kExitUsage;
  }

  try {
    if (index->parsed()) return cmd_index(manifest_path, db_path, scheme_flags, threads, out);
    if (query->parsed()) return cmd_query(query_db, query_image, query_n, query_metric, out);
    if (eval->parsed()) {
      return cmd_eval(eval_db, eval_manifest, eval_flags, eval_out, curve_list, curve_out, out);
    }
    if (sweep_cmd->parsed()) {
      return cmd_sweep(sweep_manifest, nq_list, preset_list, sweep_flags, sweep_out, threads, out);
    }
    if (synth->parsed()) return cmd_synth(synth_out, synth_config, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "error [" << to_string(e.code()) << "]: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}

}  // namespace mixhist
