#include "wide/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "wide/error.hpp"

namespace wide {

namespace fs = std::filesystem;

RunConfig resolve_config(const std::optional<fs::path>& config_path, const CliOverrides& o) {
  RunConfig rc = config_path ? load_run_config(*config_path) : RunConfig{};
  auto& c = rc.recommend;
  if (o.tau) c.tau = *o.tau;
  if (o.folds) c.p = *o.folds;
  if (o.seed) {
    c.seed = *o.seed;
    rc.seed_given = true;
  }
  if (o.k) c.k_schedule = *o.k;
  if (o.metric) c.metric = parse_metric(*o.metric);
  if (o.max_level) c.max_level_cap = *o.max_level;
  c.validate();
  return rc;
}

fs::path default_out_dir() {
  if (const char* env = std::getenv("WIDE_OUT_DIR"); env && *env) return env;
  return "wide_runs";
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const LoadError*>(&e) || dynamic_cast<const ValidationError*>(&e) ||
      dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const ArgumentError*>(&e)) {
    return 2;
  }
  return 3;
}

namespace {

std::vector<SignalRecord> load_records(const fs::path& manifest) { return load_dataset(read_manifest(manifest)); }

RunArtifacts make_run_dir(const fs::path& out_dir, std::uint64_t seed) {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream id;
  id << std::put_time(&tm, "%Y%m%dT%H%M%SZ") << "-s" << seed;
  RunArtifacts a;
  a.run_id = id.str();
  fs::create_directories(out_dir);
  for (int n = 2; fs::exists(out_dir / a.run_id); ++n) a.run_id = id.str() + "-" + std::to_string(n);
  a.dir = out_dir / a.run_id;
  fs::create_directories(a.dir);
  a.log = a.dir / "log.txt";
  return a;
}

std::string level_counts(const FeatureMatrix& m) {
  std::ostringstream os;
  os << "N = " << m.cols << " features (level 0: " << m.count_at_level(0) << ", level 1: " << m.count_at_level(1)
     << ", level 2: " << m.count_at_level(2) << ")";
  return os.str();
}

json transforms_json(const ResolvedTransforms& t) {
  json votes = json::object();
  for (const auto& [name, count] : t.wavelet_votes) votes[name] = count;
  return {{"wavelet", t.wavelet}, {"depth", t.depth}, {"stft_window", t.window}, {"stft_hop", t.hop},
          {"wavelet_votes", votes}};
}

void write_matrix(RunArtifacts& a, const FeatureMatrix& m, std::span<const int> labels, const ResolvedTransforms& t) {
  a.matrix_csv = a.dir / "matrix.csv";
  a.descriptors_json = a.dir / "descriptors.json";
  write_matrix_csv(m, labels, a.matrix_csv);
  auto desc = descriptors_json(m.descriptors);
  desc["transforms"] = transforms_json(t);
  write_json(a.descriptors_json, desc);
}

json metric_block(const std::string& name, const std::string& method, std::size_t feature_count,
                  const json& components, const json& level_reached, std::span<const FoldOutcome> outcomes) {
  return {{"name", name},
          {"method", method},
          {"feature_count", feature_count},
          {"components", components},
          {"level_reached", level_reached},
          {"eval", to_json(mean_report(outcomes, false))},
          {"test", to_json(mean_report(outcomes, true))},
          {"folds", to_json(outcomes)}};
}

json metrics_doc(const std::string& method, const RecommendConfig& c, const json& target_met, json blocks,
                 std::size_t headline) {
  return {{"schema_version", kSchemaVersion},
          {"method", method},
          {"metric", to_string(c.metric)},
          {"seed", c.seed},
          {"target_met", target_met},
          {"headline", blocks.at(headline)},
          {"blocks", std::move(blocks)}};
}

std::string metrics_row(const std::string& label, const MetricReport& m) {
  std::ostringstream os;
  os << std::left << std::setw(14) << label << std::right;
  for (double v : {m.accuracy, m.sensitivity, m.specificity, m.precision, m.f_score}) {
    os << std::setw(13) << format_sig(v);
  }
  return os.str();
}

std::string metrics_header() {
  std::ostringstream os;
  os << std::left << std::setw(14) << "" << std::right;
  for (const char* h : {"accuracy", "sensitivity", "specificity", "precision", "f_score"}) os << std::setw(13) << h;
  return os.str();
}

void fold_lines(std::ostream& os, const std::vector<FoldOutcome>& outcomes) {
  for (const auto& o : outcomes) {
    if (o.failed) {
      os << "  split " << o.fold << ": failed (" << o.failure << ")\n";
      continue;
    }
    os << metrics_row("  split " + std::to_string(o.fold) + " eval", o.eval) << "   " << to_string(o.kernel.kind)
       << " C=" << format_sig(o.C) << "\n";
    if (o.test) os << metrics_row("  split " + std::to_string(o.fold) + " test", *o.test) << "\n";
  }
}

}  // namespace

RunArtifacts cmd_extract(const fs::path& manifest, const std::optional<fs::path>& config, const fs::path& out_dir,
                         const CliOverrides& overrides, std::ostream& out) {
  const auto rc = resolve_config(config, overrides);
  const auto records = load_records(manifest);
  const auto labels = labels_of(records);
  const auto transforms = resolve_transforms(records, rc.recommend.extraction);
  const auto m = build_feature_matrix(records, rc.recommend.extraction, rc.recommend.max_level_cap, transforms);

  auto a = make_run_dir(out_dir, rc.recommend.seed);
  write_matrix(a, m, labels, transforms);
  std::ostringstream os;
  os << "extract: " << records.size() << " records, max level " << rc.recommend.max_level_cap << "\n"
     << level_counts(m) << "\n"
     << "wavelet " << transforms.wavelet << " (depth " << transforms.depth << "), STFT window " << transforms.window
     << " hop " << transforms.hop << "\n"
     << "matrix: " << a.matrix_csv.string() << "\n";
  write_text_file(a.log, os.str());
  out << os.str();
  return a;
}

RunArtifacts cmd_recommend(const fs::path& manifest, const std::optional<fs::path>& config, const fs::path& out_dir,
                           const CliOverrides& overrides, std::ostream& out) {
  const auto rc = resolve_config(config, overrides);
  if (!rc.seed_given) throw ConfigError("recommend needs a seed: pass --seed or set \"seed\" in the config");
  const auto& c = rc.recommend;
  const auto records = load_records(manifest);
  const auto labels = labels_of(records);

  auto a = make_run_dir(out_dir, c.seed);
  Recommendation rec;
  try {
    rec = recommend(records, c);
  } catch (const RecommendError& e) {
    write_json(a.dir / "trace.json",
               {{"schema_version", kSchemaVersion}, {"error", e.what()}, {"trace", to_json(e.trace())}});
    out << "run error: " << e.what() << "\ntrace written to " << (a.dir / "trace.json").string() << "\n";
    throw;
  }

  const auto m = build_feature_matrix(records, c.extraction, rec.level_reached, rec.transforms);
  write_matrix(a, m, labels, rec.transforms);
  a.recommendation_json = a.dir / "recommendation.json";
  write_json(a.recommendation_json, to_json(rec, c));

  json blocks = json::array();
  blocks.push_back(metric_block("fe1", "wide", rec.fe1.ids.size(), nullptr, rec.level_reached, rec.fe1.outcomes));
  blocks.push_back(metric_block("fe2", "wide", rec.fe2.ids.size(), nullptr, rec.level_reached, rec.fe2.outcomes));
  if (rec.refined && rec.refined->performed) {
    blocks.push_back(
        metric_block("fe2_refined", "wide", rec.refined->best.size(), nullptr, rec.level_reached, rec.refined->outcomes));
  }
  a.metrics_json = a.dir / "metrics.json";
  write_json(a.metrics_json, metrics_doc("wide", c, rec.target_met, std::move(blocks), 1));

  std::ostringstream os;
  os << "recommend: " << records.size() << " records, " << c.p << " folds (fold " << rec.hidden_fold
     << " hidden), tau = " << format_sig(c.tau) << " on " << to_string(c.metric) << "\n"
     << "level reached: " << rec.level_reached << ", "
     << (rec.target_met ? "target met" : "target not met; best-so-far reported") << "\n\n"
     << "set    level   k  features   eval min     eval mean   test " << to_string(c.metric) << "\n";
  for (const auto* fe : {&rec.fe1, &rec.fe2}) {
    os << std::left << std::setw(7) << (fe == &rec.fe1 ? "Fe1" : "Fe2") << std::right << std::setw(5) << fe->level
       << std::setw(4) << fe->k << std::setw(10) << fe->ids.size() << std::setw(11) << format_sig(fe->min_metric)
       << std::setw(14) << format_sig(fe->mean_metric) << std::setw(12)
       << format_sig(mean_metric(fe->outcomes, c.metric, true)) << "\n";
  }
  os << "\n" << metrics_header() << "\n";
  os << "Fe1 (best eval split " << rec.fe1.best_fold << ", " << format_sig(rec.fe1.best_value) << ")\n";
  fold_lines(os, rec.fe1.outcomes);
  os << metrics_row("Fe1 test mean", mean_report(rec.fe1.outcomes, true)) << "\n";
  os << "Fe2\n";
  fold_lines(os, rec.fe2.outcomes);
  os << metrics_row("Fe2 test mean", mean_report(rec.fe2.outcomes, true)) << "\n";
  if (rec.refined) {
    os << "refinement: " << rec.refined->note << "\n";
    if (rec.refined->performed) os << metrics_row("refined test", mean_report(rec.refined->outcomes, true)) << "\n";
  }
  const std::string report = os.str() + "\n" + interpret(rec, rec.descriptors);
  a.report_txt = a.dir / "report.txt";
  write_text_file(a.report_txt, report);
  write_text_file(a.log, os.str());
  out << report;
  return a;
}

RunArtifacts cmd_baseline_pca(const fs::path& manifest, const std::optional<fs::path>& config, const fs::path& out_dir,
                              const CliOverrides& overrides, std::ostream& out) {
  const auto rc = resolve_config(config, overrides);
  const auto& c = rc.recommend;
  for (auto n : rc.pca_components) {
    if (n < 1) throw ConfigError("pca.n_components entries must be >= 1");
  }
  const auto records = load_records(manifest);
  const auto labels = labels_of(records);
  const auto plan = make_folds(labels, c.p, c.seed);
  const auto splits = hidden_test_roles(plan, c.hidden_fold);
  const auto transforms = resolve_dev_transforms(records, plan, c.hidden_fold, c.extraction);
  const auto m = build_feature_matrix(records, c.extraction, c.max_level_cap, transforms);

  std::size_t limit = m.cols;
  for (const auto& s : splits) limit = std::min(limit, s.train.size());
  std::vector<std::size_t> grid;
  for (auto n : rc.pca_components) {
    const auto v = std::min(n, limit);
    if (std::find(grid.begin(), grid.end(), v) == grid.end()) grid.push_back(v);
  }

  auto a = make_run_dir(out_dir, c.seed);
  write_matrix(a, m, labels, transforms);
  json blocks = json::array();
  std::ostringstream os;
  os << "baseline-pca: " << records.size() << " records, " << level_counts(m) << ", fold " << c.hidden_fold
     << " hidden\n"
     << metrics_header() << "\n";
  std::size_t headline = 0;
  double best = -1.0;
  for (std::size_t g = 0; g < grid.size(); ++g) {
    const auto outcomes = pca_baseline(m, labels, splits, grid[g], c.eval);
    const double score = mean_metric(outcomes, c.metric, false);
    if (score > best) {
      best = score;
      headline = g;
    }
    blocks.push_back(metric_block("pca_" + std::to_string(grid[g]), "pca+svm", m.cols, grid[g], nullptr, outcomes));
    os << metrics_row(std::to_string(grid[g]) + " comps test", mean_report(outcomes, true)) << "   eval "
       << to_string(c.metric) << " " << format_sig(score) << "\n";
  }
  os << "headline (best eval " << to_string(c.metric) << "): " << grid[headline] << " components\n";
  a.metrics_json = a.dir / "metrics.json";
  write_json(a.metrics_json, metrics_doc("pca+svm", c, nullptr, std::move(blocks), headline));
  write_text_file(a.log, os.str());
  out << os.str();
  return a;
}

std::string cmd_report(const fs::path& dir, std::ostream& out) {
  if (!fs::is_directory(dir)) throw LoadError(dir.string(), "not a directory");
  std::vector<fs::path> runs;
  if (fs::exists(dir / "metrics.json")) {
    runs.push_back(dir);
  } else {
    for (const auto& entry : fs::directory_iterator(dir)) {
      if (entry.is_directory() && fs::exists(entry.path() / "metrics.json")) runs.push_back(entry.path());
    }
    std::sort(runs.begin(), runs.end());
  }
  if (runs.empty()) throw ValidationError("no runs with metrics.json found under '" + dir.string() + "'");

  const std::vector<std::string> header{"run",       "method",  "accuracy",      "sensitivity",  "specificity",
                                        "precision", "f_score", "feature_count", "level_reached"};
  std::vector<std::vector<std::string>> rows;
  for (const auto& run : runs) {
    const auto doc = read_json(run / "metrics.json");
    try {
      const auto& h = doc.at("headline");
      const auto& t = h.at("test");
      std::string method = h.at("method").get<std::string>() == "wide" ? "WIDE (" + h.at("name").get<std::string>() + ")"
                                                                       : "PCA+SVM (" + h.at("components").dump() +
                                                                             " components)";
      std::vector<std::string> row{run.filename().string(), method};
      for (const char* k : {"accuracy", "sensitivity", "specificity", "precision", "f_score"}) {
        row.push_back(format_sig(t.at(k).get<double>()));
      }
      row.push_back(std::to_string(h.at("feature_count").get<std::size_t>()));
      row.push_back(h.at("level_reached").is_null() ? "-" : h.at("level_reached").dump());
      rows.push_back(std::move(row));
    } catch (const json::exception& e) {
      throw ValidationError("'" + (run / "metrics.json").string() + "' is missing fields: " + e.what());
    }
  }

  std::vector<std::size_t> width(header.size());
  for (std::size_t c = 0; c < header.size(); ++c) {
    width[c] = header[c].size();
    for (const auto& r : rows) width[c] = std::max(width[c], r[c].size());
  }
  std::ostringstream text, csv;
  auto emit = [&](const std::vector<std::string>& r) {
    for (std::size_t c = 0; c < r.size(); ++c) {
      text << (c ? "  " : "") << (c < 2 ? std::left : std::right) << std::setw(static_cast<int>(width[c])) << r[c];
      csv << (c ? "," : "") << r[c];
    }
    text << "\n";
    csv << "\n";
  };
  emit(header);
  for (const auto& r : rows) emit(r);
  write_text_file(dir / "report.csv", csv.str());
  out << text.str();
  return text.str();
}

}  // namespace wide
