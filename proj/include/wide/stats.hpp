#pragma once

#include <array>
#include <span>
#include <string_view>
#include <vector>

namespace wide {

/// Names of the per-sequence statistical summary, in column order.
inline constexpr std::array<std::string_view, 15> kStatisticNames = {
    "mean", "std", "variance", "skewness", "kurtosis", "rms",  "min",          "max",
    "range", "median", "iqr",  "mad",      "zcr",      "line_length", "hist_entropy"};

/// Summary of one sequence in kStatisticNames order. Moments are population
/// moments; skewness and excess kurtosis are 0 for zero-variance input.
std::array<double, kStatisticNames.size()> statistical_summary(std::span<const double> x);

namespace stats {

double mean(std::span<const double> x);
double variance(std::span<const double> x);
/// Linear-interpolated quantile of a sorted sequence, q in [0, 1].
double sorted_quantile(std::span<const double> sorted, double q);
double zero_crossing_rate(std::span<const double> x);
/// Shannon entropy (nats) of an equal-width histogram over [min, max].
double histogram_entropy(std::span<const double> x, std::size_t bins = 16);

}  // namespace stats

struct PeakConfig {
  double prominence_frac = 0.1;
  double min_separation_frac = 0.05;
};

/// Local maxima whose prominence is at least prominence_frac * (max - min),
/// thinned so that kept peaks are at least min_separation_frac * n samples
/// apart (taller peaks win). Returned indices are ascending.
std::vector<std::size_t> find_peaks(std::span<const double> x, const PeakConfig& config);

}  // namespace wide
