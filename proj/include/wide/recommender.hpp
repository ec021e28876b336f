#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "wide/dataset.hpp"
#include "wide/error.hpp"
#include "wide/evaluation.hpp"
#include "wide/features.hpp"
#include "wide/selector.hpp"

namespace wide {

struct RecommendConfig {
  double tau = 0.85;
  Metric metric = Metric::accuracy;
  std::vector<std::size_t> k_schedule{5, 10, 15, 20};
  std::size_t c = 6;  // refinement cap: 2^c - 1 subsets at most
  int p = 5;
  std::uint64_t seed = 0;
  /// Fold kept out of every decision; its rows only score the final sets.
  int hidden_fold = 0;
  int max_level_cap = 2;
  SelectorConfig selector;
  EvalConfig eval;
  ExtractionConfig extraction;

  /// Throws ConfigError on the first violated constraint.
  void validate() const;
};

/// One candidate feature set evaluated on every split.
struct CandidateResult {
  int level = 0;
  std::size_t k = 0;
  std::vector<std::size_t> ids;       // rank-interleaved order
  std::vector<int> source_splits;     // splits whose selectors produced it
  std::vector<FoldOutcome> outcomes;  // eval side only
  std::vector<double> fold_metrics;   // failed split -> 0
  double min_metric = 0.0;
  double mean_metric = 0.0;
  bool all_folds_ok = false;
};

struct SplitSelection {
  int split = 0;
  SelectionResult mrmr;
  SelectionResult mrms;
  std::vector<std::size_t> union_ids;
};

struct TraceStep {
  int level = 0;
  std::size_t k = 0;
  std::size_t columns = 0;
  std::vector<SplitSelection> selections;
  std::vector<CandidateResult> candidates;
  std::string decision;
};

struct FeatureSetReport {
  int level = 0;
  std::size_t k = 0;
  std::vector<std::size_t> ids;
  std::vector<double> fold_metrics;  // eval side
  int best_fold = 0;                 // split attaining best_value
  double best_value = 0.0;
  double min_metric = 0.0;
  double mean_metric = 0.0;
  std::vector<FoldOutcome> outcomes;  // with test metrics
};

struct SubsetScore {
  std::vector<std::size_t> ids;
  double min_metric = 0.0;
  double mean_metric = 0.0;
};

struct RefinementLog {
  bool performed = false;
  std::string note;
  std::vector<std::size_t> base;
  std::vector<SubsetScore> evaluations;
  std::vector<std::size_t> best;
  double best_min = 0.0;
  double best_mean = 0.0;
  std::vector<FoldOutcome> outcomes;  // of best, with test metrics
};

struct Recommendation {
  FeatureSetReport fe1;
  FeatureSetReport fe2;
  int level_reached = 0;
  bool target_met = false;
  std::vector<TraceStep> trace;
  std::optional<RefinementLog> refined;
  FoldPlan plan;
  int hidden_fold = 0;
  ResolvedTransforms transforms;
  std::vector<FeatureDescriptor> descriptors;  // of the widest matrix built
  std::string reading;
};

/// Raised when no split of any candidate could be evaluated. Carries the
/// trace built so far.
class RecommendError : public RunError {
 public:
  RecommendError(const std::string& what, std::vector<TraceStep> trace) : RunError(what), trace_(std::move(trace)) {}
  const std::vector<TraceStep>& trace() const { return trace_; }

 private:
  std::vector<TraceStep> trace_;
};

/// Transforms resolved from non-hidden records; window and depth are still
/// clamped to the shortest record overall so every row can be extracted.
ResolvedTransforms resolve_dev_transforms(std::span<const SignalRecord> records, const FoldPlan& plan, int hidden_fold,
                                          const ExtractionConfig& config);

Recommendation recommend(std::span<const SignalRecord> records, const RecommendConfig& config);

/// Every non-empty subset of base scored by (min, mean) eval metric across the
/// splits; ties go to the smaller subset, then lexicographically lower ids.
RefinementLog exhaustive_refine(const FeatureMatrix& matrix, std::span<const int> labels,
                                std::span<const FoldRoles> splits, std::span<const std::size_t> base, std::size_t c,
                                const EvalConfig& eval);
RefinementLog exhaustive_refine(const FeatureMatrix& matrix, std::span<const int> labels, const FoldPlan& plan,
                                std::span<const std::size_t> base, std::size_t c, const EvalConfig& eval);

struct FeatureExplanation {
  std::size_t id = 0;
  int level = 0;
  std::string path;
  std::string text;
};

/// Plain-language reading of one lineage, e.g. "energy of DWT detail band 3
/// under db4".
std::string describe(const Lineage& lineage);

std::vector<FeatureExplanation> interpret(std::span<const std::size_t> ids,
                                          std::span<const FeatureDescriptor> descriptors);
/// Fe1, Fe2 and the refined set as a text report.
std::string interpret(const Recommendation& rec, std::span<const FeatureDescriptor> descriptors);

}  // namespace wide
