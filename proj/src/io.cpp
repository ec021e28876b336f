#include "wide/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <set>

#include "wide/error.hpp"

namespace wide {

namespace {

void allow_keys(const json& obj, const std::string& where, std::initializer_list<const char*> keys) {
  if (!obj.is_object()) throw ConfigError(where + " must be a JSON object");
  const std::set<std::string> allowed(keys.begin(), keys.end());
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.count(key)) throw ConfigError("unknown key '" + key + "' in " + where);
  }
}

KernelSpec kernel_from_json(const json& j) {
  if (j.is_string()) return KernelSpec{parse_kernel(j.get<std::string>())};
  allow_keys(j, "kernel", {"kind", "gamma", "degree", "coef0"});
  KernelSpec k{parse_kernel(j.at("kind").get<std::string>())};
  k.gamma = j.value("gamma", k.gamma);
  k.degree = j.value("degree", k.degree);
  k.coef0 = j.value("coef0", k.coef0);
  if (k.degree < 1) throw ConfigError("poly degree must be >= 1");
  return k;
}

json to_json(const StepScore& s) {
  return {{"relevance", s.relevance}, {"redundancy", s.redundancy}, {"significance", s.significance},
          {"score", s.score}};
}

json to_json(const SelectionResult& r) {
  json scores = json::array();
  for (const auto& s : r.step_scores) scores.push_back(to_json(s));
  return {{"method", to_string(r.method)}, {"k", r.k}, {"ranked_ids", r.ranked_ids}, {"step_scores", scores}};
}

json feature_list(std::span<const std::size_t> ids, std::span<const FeatureDescriptor> descriptors) {
  json out = json::array();
  for (const auto& e : interpret(ids, descriptors)) {
    out.push_back({{"id", e.id},
                   {"level", e.level},
                   {"lineage", e.path},
                   {"stages", descriptors[e.id].lineage.stages()},
                   {"description", e.text}});
  }
  return out;
}

json to_json(const FeatureSetReport& r, std::span<const FeatureDescriptor> descriptors) {
  return {{"level", r.level},
          {"k", r.k},
          {"ids", r.ids},
          {"features", feature_list(r.ids, descriptors)},
          {"eval_fold_metrics", r.fold_metrics},
          {"best_fold", r.best_fold},
          {"best_value", r.best_value},
          {"min_metric", r.min_metric},
          {"mean_metric", r.mean_metric},
          {"folds", to_json(std::span<const FoldOutcome>(r.outcomes))}};
}

json to_json(const CandidateResult& c) {
  return {{"level", c.level},
          {"k", c.k},
          {"ids", c.ids},
          {"source_splits", c.source_splits},
          {"eval_fold_metrics", c.fold_metrics},
          {"min_metric", c.min_metric},
          {"mean_metric", c.mean_metric},
          {"all_folds_ok", c.all_folds_ok},
          {"folds", to_json(std::span<const FoldOutcome>(c.outcomes))}};
}

json to_json(const TraceStep& s) {
  json selections = json::array();
  for (const auto& sel : s.selections) {
    selections.push_back(
        {{"split", sel.split}, {"mrmr", to_json(sel.mrmr)}, {"mrms", to_json(sel.mrms)}, {"union", sel.union_ids}});
  }
  json candidates = json::array();
  for (const auto& c : s.candidates) candidates.push_back(to_json(c));
  return {{"level", s.level},     {"k", s.k},
          {"columns", s.columns}, {"selections", selections},
          {"candidates", candidates}, {"decision", s.decision}};
}

}  // namespace

json to_json(std::span<const TraceStep> trace) {
  json out = json::array();
  for (const auto& s : trace) out.push_back(to_json(s));
  return out;
}

RunConfig run_config_from_json(const json& doc) {
  RunConfig rc;
  auto& c = rc.recommend;
  try {
    allow_keys(doc, "config",
               {"schema_version", "seed", "tau", "metric", "k_schedule", "c", "p", "hidden_fold", "max_level",
                "selector", "evaluation", "extraction", "pca"});
    if (doc.contains("schema_version") && doc["schema_version"].get<int>() != kSchemaVersion) {
      throw ConfigError("unsupported schema_version " + doc["schema_version"].dump());
    }
    if (doc.contains("seed")) {
      c.seed = doc["seed"].get<std::uint64_t>();
      rc.seed_given = true;
    }
    c.tau = doc.value("tau", c.tau);
    if (doc.contains("metric")) c.metric = parse_metric(doc["metric"].get<std::string>());
    c.k_schedule = doc.value("k_schedule", c.k_schedule);
    c.c = doc.value("c", c.c);
    c.p = doc.value("p", c.p);
    c.hidden_fold = doc.value("hidden_fold", c.hidden_fold);
    c.max_level_cap = doc.value("max_level", c.max_level_cap);
    if (doc.contains("selector")) {
      const auto& s = doc["selector"];
      allow_keys(s, "selector", {"objective", "beta"});
      if (s.contains("objective")) {
        const auto o = s["objective"].get<std::string>();
        if (o == "MID") c.selector.objective = MrmrObjective::MID;
        else if (o == "MIQ") c.selector.objective = MrmrObjective::MIQ;
        else throw ConfigError("selector.objective must be MID or MIQ");
      }
      c.selector.beta = s.value("beta", c.selector.beta);
    }
    if (doc.contains("evaluation")) {
      const auto& e = doc["evaluation"];
      allow_keys(e, "evaluation", {"kernels", "c_grid", "class_weights", "positive_class", "tolerance", "max_iterations"});
      if (e.contains("kernels")) {
        c.eval.kernels.clear();
        for (const auto& k : e["kernels"]) c.eval.kernels.push_back(kernel_from_json(k));
      }
      c.eval.c_grid = e.value("c_grid", c.eval.c_grid);
      if (e.contains("class_weights")) {
        const auto w = e["class_weights"].get<std::string>();
        if (w == "balanced") c.eval.weights = ClassWeightMode::balanced;
        else if (w == "uniform") c.eval.weights = ClassWeightMode::uniform;
        else throw ConfigError("evaluation.class_weights must be balanced or uniform");
      }
      c.eval.positive_class = e.value("positive_class", c.eval.positive_class);
      c.eval.tolerance = e.value("tolerance", c.eval.tolerance);
      c.eval.max_iterations = e.value("max_iterations", c.eval.max_iterations);
    }
    if (doc.contains("extraction")) {
      const auto& x = doc["extraction"];
      allow_keys(x, "extraction", {"stft", "dwt", "peaks"});
      if (x.contains("stft")) {
        allow_keys(x["stft"], "extraction.stft", {"window", "hop"});
        c.extraction.stft.window = x["stft"].value("window", c.extraction.stft.window);
        c.extraction.stft.hop = x["stft"].value("hop", c.extraction.stft.hop);
      }
      if (x.contains("dwt")) {
        allow_keys(x["dwt"], "extraction.dwt", {"bank", "depth", "extension"});
        c.extraction.dwt.bank = x["dwt"].value("bank", c.extraction.dwt.bank);
        c.extraction.dwt.depth = x["dwt"].value("depth", c.extraction.dwt.depth);
        if (x["dwt"].contains("extension")) {
          const auto ext = x["dwt"]["extension"].get<std::string>();
          if (ext == "symmetric") c.extraction.dwt.extension = Extension::symmetric;
          else if (ext == "periodization") c.extraction.dwt.extension = Extension::periodization;
          else throw ConfigError("extraction.dwt.extension must be symmetric or periodization");
        }
      }
      if (x.contains("peaks")) {
        allow_keys(x["peaks"], "extraction.peaks", {"prominence_frac", "min_separation_frac"});
        c.extraction.peaks.prominence_frac = x["peaks"].value("prominence_frac", c.extraction.peaks.prominence_frac);
        c.extraction.peaks.min_separation_frac =
            x["peaks"].value("min_separation_frac", c.extraction.peaks.min_separation_frac);
      }
    }
    if (doc.contains("pca")) {
      allow_keys(doc["pca"], "pca", {"n_components"});
      rc.pca_components = doc["pca"].value("n_components", rc.pca_components);
      if (rc.pca_components.empty()) throw ConfigError("pca.n_components is empty");
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  for (const auto& name : c.extraction.dwt.bank) {
    try {
      wavelet(name);
    } catch (const Error&) {
      throw ConfigError("unknown wavelet '" + name + "' in extraction.dwt.bank");
    }
  }
  return rc;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw LoadError(path.string(), "config file not readable");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("config '" + path.string() + "' is not valid JSON: " + e.what());
  }
  return run_config_from_json(doc);
}

json to_json(const KernelSpec& k) {
  return {{"kind", to_string(k.kind)}, {"gamma", k.gamma}, {"degree", k.degree}, {"coef0", k.coef0}};
}

json to_json(const RunConfig& rc) {
  const auto& c = rc.recommend;
  json kernels = json::array();
  for (const auto& k : c.eval.kernels) kernels.push_back(to_json(k));
  json doc = {{"schema_version", kSchemaVersion},
              {"tau", c.tau},
              {"metric", to_string(c.metric)},
              {"k_schedule", c.k_schedule},
              {"c", c.c},
              {"p", c.p},
              {"hidden_fold", c.hidden_fold},
              {"max_level", c.max_level_cap},
              {"selector", {{"objective", to_string(c.selector.objective)}, {"beta", c.selector.beta}}},
              {"evaluation",
               {{"kernels", kernels},
                {"c_grid", c.eval.c_grid},
                {"class_weights", c.eval.weights == ClassWeightMode::balanced ? "balanced" : "uniform"},
                {"positive_class", c.eval.positive_class},
                {"tolerance", c.eval.tolerance},
                {"max_iterations", c.eval.max_iterations}}},
              {"extraction",
               {{"stft", {{"window", c.extraction.stft.window}, {"hop", c.extraction.stft.hop}}},
                {"dwt",
                 {{"bank", c.extraction.dwt.bank},
                  {"depth", c.extraction.dwt.depth},
                  {"extension",
                   c.extraction.dwt.extension == Extension::symmetric ? "symmetric" : "periodization"}}},
                {"peaks",
                 {{"prominence_frac", c.extraction.peaks.prominence_frac},
                  {"min_separation_frac", c.extraction.peaks.min_separation_frac}}}}},
              {"pca", {{"n_components", rc.pca_components}}}};
  if (rc.seed_given) doc["seed"] = c.seed;
  return doc;
}

json to_json(const MetricReport& m) {
  return {{"accuracy", m.accuracy}, {"sensitivity", m.sensitivity}, {"specificity", m.specificity},
          {"precision", m.precision}, {"f_score", m.f_score},       {"tp", m.tp},
          {"tn", m.tn},             {"fp", m.fp},                   {"fn", m.fn}};
}

json to_json(const FoldOutcome& o) {
  json j = {{"fold", o.fold},
            {"failed", o.failed},
            {"feature_ids", o.feature_ids},
            {"kernel", to_json(o.kernel)},
            {"C", o.C},
            {"eval", o.failed ? json(nullptr) : to_json(o.eval)},
            {"test", o.test ? to_json(*o.test) : json(nullptr)}};
  if (o.failed) j["failure"] = o.failure;
  if (o.components) j["components"] = o.components;
  return j;
}

json to_json(std::span<const FoldOutcome> outcomes) {
  json out = json::array();
  for (const auto& o : outcomes) out.push_back(to_json(o));
  return out;
}

json descriptors_json(std::span<const FeatureDescriptor> descriptors) {
  json cols = json::array();
  for (const auto& d : descriptors) {
    cols.push_back({{"id", d.id},
                    {"level", d.level},
                    {"name", d.name},
                    {"stages", d.lineage.stages()},
                    {"description", describe(d.lineage)},
                    {"guarded_division", d.guarded_division}});
  }
  return {{"schema_version", kSchemaVersion}, {"columns", cols}};
}

json to_json(const Recommendation& rec, const RecommendConfig& config) {
  json trace = json::array();
  for (const auto& s : rec.trace) trace.push_back(to_json(s));
  json refinement = nullptr;
  if (rec.refined) {
    const auto& r = *rec.refined;
    json evals = json::array();
    for (const auto& e : r.evaluations) {
      evals.push_back({{"ids", e.ids}, {"min_metric", e.min_metric}, {"mean_metric", e.mean_metric}});
    }
    refinement = {{"performed", r.performed}, {"note", r.note},        {"base", r.base},
                  {"evaluation_count", r.evaluations.size()}, {"evaluations", evals}};
    if (r.performed) {
      refinement["best"] = r.best;
      refinement["features"] = feature_list(r.best, rec.descriptors);
      refinement["min_metric"] = r.best_min;
      refinement["mean_metric"] = r.best_mean;
      refinement["folds"] = to_json(std::span<const FoldOutcome>(r.outcomes));
    }
  }
  json votes = json::object();
  for (const auto& [name, count] : rec.transforms.wavelet_votes) votes[name] = count;
  return {{"schema_version", kSchemaVersion},
          {"reading", rec.reading},
          {"seed", config.seed},
          {"tau", config.tau},
          {"metric", to_string(config.metric)},
          {"p", config.p},
          {"hidden_fold", rec.hidden_fold},
          {"fold_assignments", rec.plan.assignments},
          {"transforms",
           {{"wavelet", rec.transforms.wavelet},
            {"depth", rec.transforms.depth},
            {"stft_window", rec.transforms.window},
            {"stft_hop", rec.transforms.hop},
            {"wavelet_votes", votes}}},
          {"level_reached", rec.level_reached},
          {"target_met", rec.target_met},
          {"fe1", to_json(rec.fe1, rec.descriptors)},
          {"fe2", to_json(rec.fe2, rec.descriptors)},
          {"refinement", refinement},
          {"trace", trace}};
}

std::string format_exact(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string format_sig(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

namespace {
std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) out += ch == '"' ? std::string("\"\"") : std::string(1, ch);
  return out + "\"";
}
}  // namespace

void write_matrix_csv(const FeatureMatrix& matrix, std::span<const int> labels, const std::filesystem::path& path) {
  if (labels.size() != matrix.rows) throw ArgumentError("labels do not cover the matrix rows");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw LoadError(path.string(), "cannot write");
  out << "record_id,label";
  for (const auto& d : matrix.descriptors) out << ',' << d.name;
  out << '\n';
  for (std::size_t r = 0; r < matrix.rows; ++r) {
    out << csv_field(matrix.record_ids[r]) << ',' << labels[r];
    for (std::size_t c = 0; c < matrix.cols; ++c) out << ',' << format_exact(matrix.at(r, c));
    out << '\n';
  }
}

void write_json(const std::filesystem::path& path, const json& doc) { write_text_file(path, doc.dump(2) + "\n"); }

json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw LoadError(path.string(), "file not readable");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ValidationError("'" + path.string() + "' is not valid JSON: " + e.what());
  }
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw LoadError(path.string(), "cannot write");
  out << text;
}

}  // namespace wide
