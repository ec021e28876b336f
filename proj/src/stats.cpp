#include "wide/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace wide {

namespace stats {

double mean(std::span<const double> x) {
  if (x.empty()) return 0.0;
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double variance(std::span<const double> x) {
  if (x.empty()) return 0.0;
  const double m = mean(x);
  double ss = 0.0;
  for (double v : x) ss += (v - m) * (v - m);
  return ss / static_cast<double>(x.size());
}

double sorted_quantile(std::span<const double> sorted, double q) {
  if (sorted.empty()) return 0.0;
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

double zero_crossing_rate(std::span<const double> x) {
  if (x.size() < 2) return 0.0;
  std::size_t crossings = 0;
  for (std::size_t i = 1; i < x.size(); ++i) {
    if ((x[i - 1] < 0.0 && x[i] > 0.0) || (x[i - 1] > 0.0 && x[i] < 0.0)) ++crossings;
  }
  return static_cast<double>(crossings) / static_cast<double>(x.size() - 1);
}

double histogram_entropy(std::span<const double> x, std::size_t bins) {
  if (x.empty() || bins == 0) return 0.0;
  const auto [lo_it, hi_it] = std::minmax_element(x.begin(), x.end());
  const double lo = *lo_it;
  const double width = *hi_it - lo;
  if (!(width > 0.0)) return 0.0;
  std::vector<std::size_t> counts(bins, 0);
  for (double v : x) {
    auto b = static_cast<std::size_t>((v - lo) / width * static_cast<double>(bins));
    counts[std::min(b, bins - 1)]++;
  }
  double h = 0.0;
  const auto n = static_cast<double>(x.size());
  for (std::size_t c : counts) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / n;
    h -= p * std::log(p);
  }
  return h;
}

}  // namespace stats

std::array<double, kStatisticNames.size()> statistical_summary(std::span<const double> x) {
  std::array<double, kStatisticNames.size()> out{};
  if (x.empty()) return out;
  const auto n = static_cast<double>(x.size());

  std::vector<double> sorted(x.begin(), x.end());
  std::sort(sorted.begin(), sorted.end());
  const double lo = sorted.front();
  const double hi = sorted.back();

  const double mean = stats::mean(x);
  double m2 = 0.0, m3 = 0.0, m4 = 0.0, sq = 0.0, abs_dev = 0.0, line = 0.0;
  if (hi > lo) {
    for (double v : x) {
      const double d = v - mean;
      m2 += d * d;
      m3 += d * d * d;
      m4 += d * d * d * d;
      abs_dev += std::abs(d);
    }
    m2 /= n;
    m3 /= n;
    m4 /= n;
    abs_dev /= n;
  }
  for (double v : x) sq += v * v;
  for (std::size_t i = 1; i < x.size(); ++i) line += std::abs(x[i] - x[i - 1]);

  const bool spread = m2 > 0.0;
  out[0] = mean;
  out[1] = std::sqrt(m2);
  out[2] = m2;
  out[3] = spread ? m3 / std::pow(m2, 1.5) : 0.0;
  out[4] = spread ? m4 / (m2 * m2) - 3.0 : 0.0;
  out[5] = std::sqrt(sq / n);
  out[6] = lo;
  out[7] = hi;
  out[8] = hi - lo;
  out[9] = stats::sorted_quantile(sorted, 0.5);
  out[10] = stats::sorted_quantile(sorted, 0.75) - stats::sorted_quantile(sorted, 0.25);
  out[11] = abs_dev;
  out[12] = stats::zero_crossing_rate(x);
  out[13] = line;
  out[14] = stats::histogram_entropy(x, 16);
  return out;
}

std::vector<std::size_t> find_peaks(std::span<const double> x, const PeakConfig& config) {
  const std::size_t n = x.size();
  if (n < 3) return {};
  const auto [lo_it, hi_it] = std::minmax_element(x.begin(), x.end());
  const double span = *hi_it - *lo_it;
  if (!(span > 0.0)) return {};

  // Local maxima; a flat top is reported at its middle sample.
  std::vector<std::size_t> candidates;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (!(x[i - 1] < x[i])) continue;
    std::size_t j = i;
    while (j + 1 < n && x[j + 1] == x[i]) ++j;
    if (j + 1 < n && x[j + 1] < x[i]) candidates.push_back((i + j) / 2);
    i = j;
  }

  const double min_prominence = config.prominence_frac * span;
  std::vector<std::size_t> prominent;
  for (std::size_t p : candidates) {
    const double h = x[p];
    double left_min = h;
    for (std::size_t i = p; i-- > 0;) {
      if (x[i] > h) break;
      left_min = std::min(left_min, x[i]);
    }
    double right_min = h;
    for (std::size_t i = p + 1; i < n; ++i) {
      if (x[i] > h) break;
      right_min = std::min(right_min, x[i]);
    }
    if (h - std::max(left_min, right_min) >= min_prominence) prominent.push_back(p);
  }

  const auto distance =
      std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(config.min_separation_frac * static_cast<double>(n))));
  if (distance <= 1 || prominent.size() < 2) return prominent;

  std::vector<std::size_t> order(prominent.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return x[prominent[a]] > x[prominent[b]]; });
  std::vector<bool> keep(prominent.size(), true);
  for (std::size_t oi : order) {
    if (!keep[oi]) continue;
    for (std::size_t j = oi; j-- > 0 && prominent[oi] - prominent[j] < distance;) keep[j] = false;
    for (std::size_t j = oi + 1; j < prominent.size() && prominent[j] - prominent[oi] < distance; ++j) keep[j] = false;
  }
  std::vector<std::size_t> peaks;
  for (std::size_t i = 0; i < prominent.size(); ++i) {
    if (keep[i]) peaks.push_back(prominent[i]);
  }
  return peaks;
}

}  // namespace wide
