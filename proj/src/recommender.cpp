#include "wide/recommender.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include "wide/error.hpp"

namespace wide {

void RecommendConfig::validate() const {
  if (!(tau > 0.0) || !std::isfinite(tau)) throw ConfigError("tau must be a positive finite number");
  if (k_schedule.empty()) throw ConfigError("k_schedule is empty");
  for (auto k : k_schedule) {
    if (k < 1) throw ConfigError("every k in k_schedule must be >= 1");
  }
  if (c > 20) throw ConfigError("c must be <= 20");
  if (p < 5 || p > 10) throw ConfigError("p must be in [5, 10]");
  if (hidden_fold < 0 || hidden_fold >= p) throw ConfigError("hidden_fold must be in [0, p)");
  if (max_level_cap < 0 || max_level_cap > 2) throw ConfigError("max_level_cap must be 0, 1 or 2");
  if (!(selector.beta >= 0.0)) throw ConfigError("beta must be >= 0");
  if (eval.kernels.empty()) throw ConfigError("kernel list is empty");
  if (eval.c_grid.empty()) throw ConfigError("C grid is empty");
  for (double C : eval.c_grid) {
    if (!(C > 0.0)) throw ConfigError("every C must be > 0");
  }
}

ResolvedTransforms resolve_dev_transforms(std::span<const SignalRecord> records, const FoldPlan& plan, int hidden_fold,
                                          const ExtractionConfig& config) {
  if (plan.assignments.size() != records.size()) throw ArgumentError("fold plan does not cover the records");
  std::vector<SignalRecord> dev;
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (plan.assignments[i] != hidden_fold) dev.push_back(records[i]);
  }
  const auto voted = resolve_transforms(dev, config);
  ExtractionConfig fixed = config;
  fixed.dwt.bank = {voted.wavelet};
  auto out = resolve_transforms(records, fixed);
  out.wavelet_votes = voted.wavelet_votes;
  return out;
}

namespace {

CandidateResult score_candidate(const FeatureMatrix& matrix, std::span<const int> labels,
                                std::span<const FoldRoles> splits, std::vector<std::size_t> ids,
                                const RecommendConfig& config) {
  CandidateResult c;
  c.ids = std::move(ids);
  c.outcomes = evaluate_feature_set(matrix, labels, c.ids, splits, config.eval, false);
  c.all_folds_ok = true;
  double sum = 0.0;
  c.min_metric = 1e300;
  for (const auto& o : c.outcomes) {
    const double v = o.failed ? 0.0 : o.eval.value(config.metric);
    if (o.failed) c.all_folds_ok = false;
    c.fold_metrics.push_back(v);
    sum += v;
    c.min_metric = std::min(c.min_metric, v);
  }
  c.mean_metric = sum / static_cast<double>(c.outcomes.size());
  return c;
}

std::vector<std::size_t> clamp_schedule(std::span<const std::size_t> schedule, std::size_t cols) {
  std::vector<std::size_t> out;
  for (auto k : schedule) {
    const auto v = std::min(k, cols);
    if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
  }
  return out;
}

std::vector<std::size_t> merged_rows(const FoldRoles& s) {
  std::vector<std::size_t> rows = s.train;
  rows.insert(rows.end(), s.eval.begin(), s.eval.end());
  std::sort(rows.begin(), rows.end());
  return rows;
}

FeatureSetReport report_of(const CandidateResult& c, Metric metric) {
  FeatureSetReport r;
  r.level = c.level;
  r.k = c.k;
  r.ids = c.ids;
  r.fold_metrics = c.fold_metrics;
  r.min_metric = c.min_metric;
  r.mean_metric = c.mean_metric;
  r.best_value = -1.0;
  for (const auto& o : c.outcomes) {
    if (o.failed) continue;
    const double v = o.eval.value(metric);
    if (v > r.best_value) {
      r.best_value = v;
      r.best_fold = o.fold;
    }
  }
  return r;
}

// Fe2 order: min, then mean, then smaller k, then lower level.
bool more_consistent(const CandidateResult& a, const CandidateResult& b) {
  if (a.min_metric != b.min_metric) return a.min_metric > b.min_metric;
  if (a.mean_metric != b.mean_metric) return a.mean_metric > b.mean_metric;
  if (a.k != b.k) return a.k < b.k;
  return a.level < b.level;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

}  // namespace

Recommendation recommend(std::span<const SignalRecord> records, const RecommendConfig& config) {
  config.validate();
  if (records.empty()) throw ArgumentError("no records");
  const auto labels = labels_of(records);

  Recommendation rec;
  rec.plan = make_folds(labels, config.p, config.seed);
  rec.hidden_fold = config.hidden_fold;
  const auto splits = hidden_test_roles(rec.plan, config.hidden_fold);
  rec.transforms = resolve_dev_transforms(records, rec.plan, config.hidden_fold, config.extraction);
  rec.reading = "fold " + std::to_string(config.hidden_fold) +
                " is the hidden test set; each other fold serves once as eval with the remaining folds as train. "
                "Iterations advance k and then the level instead of drawing disjoint feature batches.";

  FeatureMatrix matrix;
  bool stop = false;
  for (int level = 0; level <= config.max_level_cap && !stop; ++level) {
    matrix = build_feature_matrix(records, config.extraction, level, rec.transforms);
    rec.level_reached = level;
    const auto ks = clamp_schedule(config.k_schedule, matrix.cols);
    const auto k_max = *std::max_element(ks.begin(), ks.end());

    // Greedy rankings are prefix-stable, so one run to k_max serves every k.
    // Splits that share their train+eval rows share the rankings.
    std::vector<SelectionResult> mrmr_full, mrms_full;
    std::map<std::vector<std::size_t>, std::size_t> ranked_rows;
    for (const auto& s : splits) {
      const auto rows = merged_rows(s);
      if (auto it = ranked_rows.find(rows); it != ranked_rows.end()) {
        mrmr_full.push_back(mrmr_full[it->second]);
        mrms_full.push_back(mrms_full[it->second]);
        continue;
      }
      ranked_rows.emplace(rows, mrmr_full.size());
      SelectionView view(matrix, labels, rows);
      mrmr_full.push_back(mrmr_select(view, k_max, config.selector.objective));
      mrms_full.push_back(mrms_select(view, k_max, config.selector.beta));
    }

    for (auto k : ks) {
      TraceStep step;
      step.level = level;
      step.k = k;
      step.columns = matrix.cols;
      std::map<std::set<std::size_t>, std::size_t> seen;
      for (std::size_t s = 0; s < splits.size(); ++s) {
        SplitSelection sel;
        sel.split = static_cast<int>(s);
        sel.mrmr = mrmr_full[s].prefix(k);
        sel.mrms = mrms_full[s].prefix(k);
        sel.union_ids = union_recommend(sel.mrmr, sel.mrms, k);
        const std::set<std::size_t> key(sel.union_ids.begin(), sel.union_ids.end());
        if (auto it = seen.find(key); it != seen.end()) {
          step.candidates[it->second].source_splits.push_back(sel.split);
        } else {
          auto cand = score_candidate(matrix, labels, splits, sel.union_ids, config);
          cand.level = level;
          cand.k = k;
          cand.source_splits.push_back(sel.split);
          seen.emplace(key, step.candidates.size());
          step.candidates.push_back(std::move(cand));
        }
        step.selections.push_back(std::move(sel));
      }
      double best_min = 0.0;
      for (const auto& c : step.candidates) {
        if (c.all_folds_ok) best_min = std::max(best_min, c.min_metric);
        if (c.all_folds_ok && c.min_metric >= config.tau) stop = true;
      }
      step.decision = stop ? "stop: a candidate reaches tau = " + fmt(config.tau) + " on every split"
                           : "continue: best min-split " + to_string(config.metric) + " " + fmt(best_min) +
                                 " < tau = " + fmt(config.tau);
      rec.trace.push_back(std::move(step));
      if (stop) break;
    }
  }
  rec.target_met = stop;
  rec.descriptors = matrix.descriptors;

  const CandidateResult* fe1 = nullptr;
  const CandidateResult* fe2 = nullptr;
  double fe1_value = -1.0;
  for (const auto& step : rec.trace) {
    for (const auto& c : step.candidates) {
      bool any_ok = false;
      for (const auto& o : c.outcomes) {
        if (o.failed) continue;
        any_ok = true;
        const double v = o.eval.value(config.metric);
        if (v > fe1_value) {
          fe1_value = v;
          fe1 = &c;
        }
      }
      if (any_ok && (!fe2 || more_consistent(c, *fe2))) fe2 = &c;
    }
  }
  if (!fe1) throw RecommendError("every split of every candidate failed to train", rec.trace);

  // Decisions are frozen; only now are the hidden rows scored.
  rec.fe1 = report_of(*fe1, config.metric);
  rec.fe1.outcomes = evaluate_feature_set(matrix, labels, rec.fe1.ids, splits, config.eval, true);
  rec.fe2 = report_of(*fe2, config.metric);
  rec.fe2.outcomes = evaluate_feature_set(matrix, labels, rec.fe2.ids, splits, config.eval, true);

  RefinementLog log;
  if (config.c == 0) {
    log.note = "refinement disabled (c = 0)";
  } else if (rec.fe2.ids.size() > config.c) {
    log.base = rec.fe2.ids;
    log.note = "skipped: |Fe2| = " + std::to_string(rec.fe2.ids.size()) + " exceeds c = " + std::to_string(config.c);
  } else {
    log = exhaustive_refine(matrix, labels, splits, rec.fe2.ids, config.c, config.eval);
    log.outcomes = evaluate_feature_set(matrix, labels, log.best, splits, config.eval, true);
  }
  rec.refined = std::move(log);
  return rec;
}

RefinementLog exhaustive_refine(const FeatureMatrix& matrix, std::span<const int> labels,
                                std::span<const FoldRoles> splits, std::span<const std::size_t> base, std::size_t c,
                                const EvalConfig& eval) {
  if (base.empty()) throw ArgumentError("refinement base set is empty");
  if (c > 20) throw ConfigError("c must be <= 20");
  RefinementLog log;
  log.base.assign(base.begin(), base.end());
  if (base.size() > c) {
    log.note = "skipped: |base| = " + std::to_string(base.size()) + " exceeds c = " + std::to_string(c);
    return log;
  }
  log.performed = true;
  const std::size_t n = base.size();
  const SubsetScore* best = nullptr;
  log.evaluations.reserve((std::size_t{1} << n) - 1);
  for (std::size_t mask = 1; mask < (std::size_t{1} << n); ++mask) {
    SubsetScore s;
    for (std::size_t b = 0; b < n; ++b) {
      if (mask & (std::size_t{1} << b)) s.ids.push_back(base[b]);
    }
    const auto outcomes = evaluate_feature_set(matrix, labels, s.ids, splits, eval, false);
    double sum = 0.0;
    s.min_metric = 1e300;
    for (const auto& o : outcomes) {
      const double v = o.failed ? 0.0 : o.eval.value(eval.metric);
      sum += v;
      s.min_metric = std::min(s.min_metric, v);
    }
    s.mean_metric = sum / static_cast<double>(outcomes.size());
    log.evaluations.push_back(std::move(s));
  }
  for (const auto& s : log.evaluations) {
    if (!best) {
      best = &s;
      continue;
    }
    if (s.min_metric != best->min_metric) {
      if (s.min_metric > best->min_metric) best = &s;
      continue;
    }
    if (s.mean_metric != best->mean_metric) {
      if (s.mean_metric > best->mean_metric) best = &s;
      continue;
    }
    if (s.ids.size() != best->ids.size()) {
      if (s.ids.size() < best->ids.size()) best = &s;
      continue;
    }
    auto a = s.ids, b = best->ids;
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    if (a < b) best = &s;
  }
  log.best = best->ids;
  log.best_min = best->min_metric;
  log.best_mean = best->mean_metric;
  log.note = std::to_string(log.evaluations.size()) + " subsets evaluated";
  return log;
}

RefinementLog exhaustive_refine(const FeatureMatrix& matrix, std::span<const int> labels, const FoldPlan& plan,
                                std::span<const std::size_t> base, std::size_t c, const EvalConfig& eval) {
  const auto splits = rotating_roles(plan);
  return exhaustive_refine(matrix, labels, splits, base, c, eval);
}

// ---------------------------------------------------------------------------
// Interpretation

namespace {

const std::map<std::string, std::string>& statistic_phrases() {
  static const std::map<std::string, std::string> m{
      {"energy", "energy"},
      {"relative_energy", "share of total energy"},
      {"entropy", "Shannon entropy of the normalized energy"},
      {"dominant_frequency", "dominant frequency (Hz)"},
      {"mean", "mean"},
      {"std", "standard deviation"},
      {"variance", "variance"},
      {"skewness", "skewness"},
      {"kurtosis", "kurtosis"},
      {"rms", "RMS"},
      {"min", "minimum"},
      {"max", "maximum"},
      {"range", "range (max - min)"},
      {"median", "median"},
      {"iqr", "interquartile range"},
      {"mad", "median absolute deviation"},
      {"zcr", "zero-crossing rate"},
      {"line_length", "line length"},
      {"hist_entropy", "histogram entropy"},
      {"spectral_centroid", "spectral centroid"},
      {"spectral_spread", "spectral spread"},
      {"spectral_rolloff", "spectral rolloff frequency"},
      {"spectral_flatness", "spectral flatness"},
      {"spectral_entropy", "spectral entropy"},
      {"spectral_flux", "spectral flux"},
      {"peak_count", "number of peaks"},
      {"trough_count", "number of troughs"},
      {"peak_amplitude_mean", "mean peak amplitude"},
      {"peak_amplitude_std", "standard deviation of peak amplitudes"},
      {"peak_interval_mean", "mean interval between peaks (s)"},
      {"peak_interval_std", "standard deviation of peak intervals (s)"},
      {"peak_trough_mean", "mean peak-to-trough amplitude"},
  };
  return m;
}

std::string statistic_phrase(const std::string& s) {
  const auto& m = statistic_phrases();
  if (auto it = m.find(s); it != m.end()) return it->second;
  if (s.rfind("band_energy_ratio_", 0) == 0) return "energy share of spectral band " + s.substr(18);
  return s;
}

std::string band_phrase(const std::string& band, const std::string& wavelet) {
  if (band.rfind("detail", 0) == 0) return "DWT detail band " + band.substr(6) + " under " + wavelet;
  if (band.rfind("approx", 0) == 0) return "DWT approximation band " + band.substr(6) + " under " + wavelet;
  return band;
}

std::string source_phrase(const Lineage& l) {
  if (l.transform == "stft") return "the STFT spectrum";
  if (l.transform.rfind("dwt(", 0) == 0) {
    const std::string w = l.transform.substr(4, l.transform.size() - 5);
    return l.band.empty() ? "the DWT under " + w : band_phrase(l.band, w);
  }
  if (l.derivative == "d1") return "the first difference of the signal";
  if (l.derivative == "d2") return "the second difference of the signal";
  return "the signal";
}

}  // namespace

std::string describe(const Lineage& l) {
  std::string text = statistic_phrase(l.statistic);
  const bool self_describing = l.transform == "stft" && l.band.empty();
  if (!self_describing) text += " of " + source_phrase(l);
  if (l.is_ratio()) {
    Lineage den = l;
    den.band = l.ratio_band;
    den.statistic = l.ratio_statistic;
    den.ratio_band.clear();
    den.ratio_statistic.clear();
    text += ", divided by the " + describe(den);
  }
  return text;
}

std::vector<FeatureExplanation> interpret(std::span<const std::size_t> ids,
                                          std::span<const FeatureDescriptor> descriptors) {
  std::vector<FeatureExplanation> out;
  for (auto id : ids) {
    if (id >= descriptors.size() || descriptors[id].id != id) {
      throw std::logic_error("feature id " + std::to_string(id) + " has no descriptor");
    }
    const auto& d = descriptors[id];
    out.push_back({id, d.level, d.lineage.render(), describe(d.lineage)});
  }
  return out;
}

namespace {

void render_set(std::ostringstream& os, const std::string& title, std::span<const std::size_t> ids,
                std::span<const FeatureDescriptor> descriptors) {
  os << title << " (" << ids.size() << " features)\n";
  std::size_t rank = 1;
  for (const auto& e : interpret(ids, descriptors)) {
    os << "  " << rank++ << ". [L" << e.level << "] " << e.path << "\n     " << e.text << "\n";
  }
}

}  // namespace

std::string interpret(const Recommendation& rec, std::span<const FeatureDescriptor> descriptors) {
  std::ostringstream os;
  render_set(os, "Fe1: best single split (" + fmt(rec.fe1.best_value) + " on split " + std::to_string(rec.fe1.best_fold) +
                     ")",
             rec.fe1.ids, descriptors);
  render_set(os, "Fe2: most consistent (min " + fmt(rec.fe2.min_metric) + ", mean " + fmt(rec.fe2.mean_metric) + ")",
             rec.fe2.ids, descriptors);
  if (rec.refined && rec.refined->performed) {
    render_set(os, "Refined Fe2 (" + rec.refined->note + ")", rec.refined->best, descriptors);
  }
  return os.str();
}

}  // namespace wide
