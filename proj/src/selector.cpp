#include "wide/selector.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "wide/error.hpp"

namespace wide {

std::string to_string(SelectionMethod m) {
  switch (m) {
    case SelectionMethod::mrmr_mid: return "mrmr_mid";
    case SelectionMethod::mrmr_miq: return "mrmr_miq";
    case SelectionMethod::mrms: return "mrms";
  }
  return "unknown";
}

std::string to_string(MrmrObjective o) { return o == MrmrObjective::MID ? "MID" : "MIQ"; }

SelectionResult SelectionResult::prefix(std::size_t n) const {
  if (n > ranked_ids.size()) throw ArgumentError("prefix longer than the selection");
  SelectionResult out{method, n, {ranked_ids.begin(), ranked_ids.begin() + static_cast<std::ptrdiff_t>(n)},
                      {step_scores.begin(), step_scores.begin() + static_cast<std::ptrdiff_t>(n)}};
  return out;
}

// ---------------------------------------------------------------------------
// Relevance and redundancy primitives

double f_statistic(std::span<const double> column, std::span<const int> labels) {
  if (column.size() != labels.size()) throw ArgumentError("column and labels differ in length");
  std::map<int, std::pair<double, std::size_t>> groups;  // label -> (sum, count)
  for (std::size_t i = 0; i < column.size(); ++i) {
    auto& g = groups[labels[i]];
    g.first += column[i];
    g.second++;
  }
  if (groups.size() < 2) throw ArgumentError("F-statistic needs at least 2 classes");
  for (const auto& [label, g] : groups) {
    if (g.second < 2) throw ArgumentError("class " + std::to_string(label) + " has fewer than 2 members");
  }

  const auto n = static_cast<double>(column.size());
  double total = 0.0, scale = 0.0;
  for (double v : column) {
    total += v;
    scale += v * v;
  }
  const double grand = total / n;
  double ssb = 0.0;
  for (const auto& [label, g] : groups) {
    const double m = g.first / static_cast<double>(g.second);
    ssb += static_cast<double>(g.second) * (m - grand) * (m - grand);
  }
  double ssw = 0.0;
  for (std::size_t i = 0; i < column.size(); ++i) {
    const auto& g = groups[labels[i]];
    const double d = column[i] - g.first / static_cast<double>(g.second);
    ssw += d * d;
  }

  // Sums of squares at rounding level of the data count as exact zeros.
  const double tol = 1e-14 * scale;
  const double k = static_cast<double>(groups.size());
  if (ssw <= tol) return ssb <= tol ? 0.0 : kFSentinel;
  const double f = (ssb / (k - 1.0)) / (ssw / (n - k));
  return std::min(f, kFSentinel);
}

double pearson_abs(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw ArgumentError("columns differ in length");
  if (a.empty()) return 0.0;
  const auto n = static_cast<double>(a.size());
  double ma = 0.0, mb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= n;
  mb /= n;
  double sab = 0.0, saa = 0.0, sbb = 0.0, qa = 0.0, qb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double da = a[i] - ma;
    const double db = b[i] - mb;
    sab += da * db;
    saa += da * da;
    sbb += db * db;
    qa += a[i] * a[i];
    qb += b[i] * b[i];
  }
  if (saa <= 1e-14 * qa || sbb <= 1e-14 * qb || saa <= 0.0 || sbb <= 0.0) return 0.0;
  return std::clamp(std::abs(sab) / std::sqrt(saa * sbb), 0.0, 1.0);
}

// ---------------------------------------------------------------------------
// Views

SelectionView::SelectionView(const FeatureMatrix& matrix, std::span<const int> labels,
                             std::span<const std::size_t> rows) {
  if (labels.size() != matrix.rows) throw ArgumentError("label count does not match matrix rows");
  columns_.resize(matrix.cols);
  for (std::size_t c = 0; c < matrix.cols; ++c) columns_[c] = matrix.column(c, rows);
  for (std::size_t r : rows) labels_.push_back(labels[r]);
}

SelectionView::SelectionView(const FeatureMatrix& matrix, std::span<const int> labels) {
  if (labels.size() != matrix.rows) throw ArgumentError("label count does not match matrix rows");
  columns_.resize(matrix.cols);
  for (std::size_t c = 0; c < matrix.cols; ++c) columns_[c] = matrix.column(c);
  labels_.assign(labels.begin(), labels.end());
}

// ---------------------------------------------------------------------------
// Fuzzy-rough dependency

namespace {

std::vector<double> min_max_scaled(std::span<const double> x) {
  std::vector<double> out(x.size(), 0.0);
  if (x.empty()) return out;
  const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
  const double width = *hi - *lo;
  if (width > 0.0) {
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = (x[i] - *lo) / width;
  }
  return out;
}

double population_std(std::span<const double> x) {
  if (x.empty()) return 0.0;
  double m = 0.0;
  for (double v : x) m += v;
  m /= static_cast<double>(x.size());
  double ss = 0.0;
  for (double v : x) ss += (v - m) * (v - m);
  return std::sqrt(ss / static_cast<double>(x.size()));
}

double similarity(double a, double b, double sigma) {
  if (!(sigma > 0.0)) return 1.0;
  return std::max(0.0, 1.0 - std::abs(a - b) / sigma);
}

// gamma over scaled columns with precomputed sigmas.
double dependency_of(std::span<const std::span<const double>> scaled, std::span<const double> sigma,
                     std::span<const int> labels) {
  const std::size_t n = labels.size();
  if (n == 0) return 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double lower = 1.0;
    for (std::size_t j = 0; j < n && lower > 0.0; ++j) {
      if (labels[j] == labels[i]) continue;
      double r = 1.0;
      for (std::size_t f = 0; f < scaled.size(); ++f) r = std::min(r, similarity(scaled[f][i], scaled[f][j], sigma[f]));
      lower = std::min(lower, 1.0 - r);
    }
    total += lower;
  }
  return total / static_cast<double>(n);
}

}  // namespace

double fuzzy_dependency(std::span<const std::span<const double>> columns, std::span<const int> labels) {
  if (columns.empty()) throw ArgumentError("fuzzy dependency needs a non-empty feature subset");
  std::vector<std::vector<double>> scaled;
  std::vector<double> sigma;
  for (const auto& c : columns) {
    if (c.size() != labels.size()) throw ArgumentError("column and labels differ in length");
    scaled.push_back(min_max_scaled(c));
    sigma.push_back(population_std(scaled.back()));
  }
  std::vector<std::span<const double>> views(scaled.begin(), scaled.end());
  return dependency_of(views, sigma, labels);
}

RelevanceCache::RelevanceCache(const SelectionView& view)
    : view_(view), dependency_(view.cols()), normalized_(view.cols()), sigma_(view.cols()) {
  f_stats_.resize(view.cols());
  for (std::size_t c = 0; c < view.cols(); ++c) {
    f_stats_[c] = f_statistic(view.column(c), view.labels());
    normalized_[c] = min_max_scaled(view.column(c));
    sigma_[c] = population_std(normalized_[c]);
  }
}

double RelevanceCache::correlation(std::size_t a, std::size_t b) {
  const auto key = std::minmax(a, b);
  const auto it = correlations_.find(key);
  if (it != correlations_.end()) return it->second;
  const double r = pearson_abs(view_.column(key.first), view_.column(key.second));
  correlations_.emplace(key, r);
  return r;
}

double RelevanceCache::dependency(std::size_t c) {
  if (!dependency_[c]) {
    const std::span<const double> col[] = {normalized_[c]};
    const double sig[] = {sigma_[c]};
    dependency_[c] = dependency_of(col, sig, view_.labels());
  }
  return *dependency_[c];
}

double RelevanceCache::pair_dependency(std::size_t a, std::size_t b) {
  const auto key = std::minmax(a, b);
  const auto it = pair_dependency_.find(key);
  if (it != pair_dependency_.end()) return it->second;
  const std::span<const double> cols[] = {normalized_[key.first], normalized_[key.second]};
  const double sig[] = {sigma_[key.first], sigma_[key.second]};
  const double g = dependency_of(cols, sig, view_.labels());
  pair_dependency_.emplace(key, g);
  return g;
}

// ---------------------------------------------------------------------------
// Greedy selectors

namespace {

void check_k(std::size_t k, std::size_t cols) {
  if (k > cols) {
    throw ArgumentError("k = " + std::to_string(k) + " exceeds the " + std::to_string(cols) + " available features");
  }
}

}  // namespace

SelectionResult mrmr_select(const SelectionView& view, std::size_t k, MrmrObjective objective) {
  check_k(k, view.cols());
  RelevanceCache cache(view);
  SelectionResult result;
  result.method = objective == MrmrObjective::MID ? SelectionMethod::mrmr_mid : SelectionMethod::mrmr_miq;
  result.k = k;
  std::vector<bool> taken(view.cols(), false);

  for (std::size_t step = 0; step < k; ++step) {
    std::size_t best = view.cols();
    StepScore best_score;
    for (std::size_t c = 0; c < view.cols(); ++c) {
      if (taken[c]) continue;
      StepScore s;
      s.relevance = cache.f_stat(c);
      if (step == 0) {
        s.score = s.relevance;
      } else {
        double w = 0.0;
        for (std::size_t chosen : result.ranked_ids) w += cache.correlation(c, chosen);
        s.redundancy = w / static_cast<double>(result.ranked_ids.size());
        s.score = objective == MrmrObjective::MID ? s.relevance - s.redundancy
                                                  : s.relevance / (s.redundancy + kMiqEpsilon);
      }
      if (best == view.cols() || s.score > best_score.score) {
        best = c;
        best_score = s;
      }
    }
    taken[best] = true;
    result.ranked_ids.push_back(best);
    result.step_scores.push_back(best_score);
  }
  return result;
}

SelectionResult mrmr_select(const FeatureMatrix& matrix, std::span<const int> labels, std::size_t k,
                            MrmrObjective objective) {
  return mrmr_select(SelectionView(matrix, labels), k, objective);
}

SelectionResult mrms_select(const SelectionView& view, std::size_t k, double beta) {
  check_k(k, view.cols());
  if (!(beta >= 0.0)) throw ArgumentError("beta must be >= 0");
  RelevanceCache cache(view);
  SelectionResult result;
  result.method = SelectionMethod::mrms;
  result.k = k;
  std::vector<bool> taken(view.cols(), false);

  for (std::size_t step = 0; step < k; ++step) {
    std::size_t best = view.cols();
    StepScore best_score;
    for (std::size_t c = 0; c < view.cols(); ++c) {
      if (taken[c]) continue;
      StepScore s;
      s.relevance = cache.dependency(c);
      if (!result.ranked_ids.empty()) {
        double gain = 0.0;
        for (std::size_t chosen : result.ranked_ids) gain += cache.pair_dependency(c, chosen) - cache.dependency(chosen);
        s.significance = gain / static_cast<double>(result.ranked_ids.size());
      }
      s.score = s.relevance + beta * s.significance;
      if (best == view.cols() || s.score > best_score.score) {
        best = c;
        best_score = s;
      }
    }
    taken[best] = true;
    result.ranked_ids.push_back(best);
    result.step_scores.push_back(best_score);
  }
  return result;
}

SelectionResult mrms_select(const FeatureMatrix& matrix, std::span<const int> labels, std::size_t k, double beta) {
  return mrms_select(SelectionView(matrix, labels), k, beta);
}

std::vector<std::size_t> union_recommend(const SelectionResult& x, const SelectionResult& y, std::size_t k) {
  if (x.ranked_ids.size() != k || y.ranked_ids.size() != k) {
    throw ArgumentError("union needs both selections of size k = " + std::to_string(k));
  }
  std::vector<std::size_t> z;
  std::set<std::size_t> seen;
  for (std::size_t i = 0; i < k && z.size() < k; ++i) {
    for (std::size_t id : {x.ranked_ids[i], y.ranked_ids[i]}) {
      if (z.size() < k && seen.insert(id).second) z.push_back(id);
    }
  }
  return z;
}

}  // namespace wide
