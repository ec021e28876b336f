#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>

namespace wide {

enum class Metric { accuracy, sensitivity, specificity, precision, f_score };

std::string to_string(Metric m);
Metric parse_metric(std::string_view name);

struct MetricReport {
  double accuracy = 0.0;
  double sensitivity = 0.0;
  double specificity = 0.0;
  double precision = 0.0;
  double f_score = 0.0;
  std::size_t tp = 0;
  std::size_t tn = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;

  double value(Metric m) const;
};

/// Rates from confusion counts; a rate with a zero denominator is 0.
MetricReport metrics_from_confusion(std::size_t tp, std::size_t tn, std::size_t fp, std::size_t fn);

MetricReport compute_metrics(std::span<const int> predicted, std::span<const int> actual, int positive_class);

}  // namespace wide
