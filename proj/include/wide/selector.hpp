#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "wide/features.hpp"

namespace wide {

enum class SelectionMethod { mrmr_mid, mrmr_miq, mrms };
enum class MrmrObjective { MID, MIQ };

std::string to_string(SelectionMethod m);
std::string to_string(MrmrObjective o);

/// Objective values at one greedy step. mRMR fills relevance (V), redundancy
/// (W) and score; MRMS fills relevance (J_rel), significance (J_sig) and
/// score (J).
struct StepScore {
  double relevance = 0.0;
  double redundancy = 0.0;
  double significance = 0.0;
  double score = 0.0;
};

struct SelectionResult {
  SelectionMethod method = SelectionMethod::mrmr_mid;
  std::size_t k = 0;
  std::vector<std::size_t> ranked_ids;
  std::vector<StepScore> step_scores;

  /// The first n picks; greedy selection makes this the size-n result.
  SelectionResult prefix(std::size_t n) const;
};

/// F-statistics of each column saturate here when within-class variance is 0.
inline constexpr double kFSentinel = 1e12;
inline constexpr double kMiqEpsilon = 1e-12;

/// One-way ANOVA F of a column against class labels.
double f_statistic(std::span<const double> column, std::span<const int> labels);

/// |Pearson r| in [0, 1]; 0 when either column is constant.
double pearson_abs(std::span<const double> a, std::span<const double> b);

/// A row subset of a FeatureMatrix in column-major form, which is what the
/// selectors scan.
class SelectionView {
 public:
  SelectionView(const FeatureMatrix& matrix, std::span<const int> labels, std::span<const std::size_t> rows);
  /// All rows.
  SelectionView(const FeatureMatrix& matrix, std::span<const int> labels);

  std::size_t rows() const { return labels_.size(); }
  std::size_t cols() const { return columns_.size(); }
  std::span<const double> column(std::size_t c) const { return columns_[c]; }
  std::span<const int> labels() const { return labels_; }

 private:
  std::vector<std::vector<double>> columns_;
  std::vector<int> labels_;
};

/// Relevance and redundancy terms for one view. F-statistics and single
/// feature dependencies are filled on construction; pairwise terms are
/// computed on first use and memoized.
class RelevanceCache {
 public:
  explicit RelevanceCache(const SelectionView& view);

  double f_stat(std::size_t c) const { return f_stats_[c]; }
  double correlation(std::size_t a, std::size_t b);
  double dependency(std::size_t c);
  double pair_dependency(std::size_t a, std::size_t b);

 private:
  const SelectionView& view_;
  std::vector<double> f_stats_;
  std::vector<std::optional<double>> dependency_;
  std::map<std::pair<std::size_t, std::size_t>, double> correlations_;
  std::map<std::pair<std::size_t, std::size_t>, double> pair_dependency_;
  std::vector<std::vector<double>> normalized_;  // min-max scaled columns
  std::vector<double> sigma_;                    // std of each scaled column
};

SelectionResult mrmr_select(const SelectionView& view, std::size_t k, MrmrObjective objective);
SelectionResult mrmr_select(const FeatureMatrix& matrix, std::span<const int> labels, std::size_t k,
                            MrmrObjective objective);

/// Fuzzy-rough dependency of the labels on a feature subset (columns given
/// raw; each is min-max scaled first).
double fuzzy_dependency(std::span<const std::span<const double>> columns, std::span<const int> labels);

SelectionResult mrms_select(const SelectionView& view, std::size_t k, double beta);
SelectionResult mrms_select(const FeatureMatrix& matrix, std::span<const int> labels, std::size_t k, double beta);

/// Rank-interleaved union x1, y1, x2, y2, ... without repeats, cut to k.
std::vector<std::size_t> union_recommend(const SelectionResult& x, const SelectionResult& y, std::size_t k);

struct SelectorConfig {
  MrmrObjective objective = MrmrObjective::MID;
  double beta = 0.5;
  std::optional<std::size_t> k;
};

}  // namespace wide
