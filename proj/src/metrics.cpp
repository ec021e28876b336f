#include "wide/metrics.hpp"

#include "wide/error.hpp"

namespace wide {

std::string to_string(Metric m) {
  switch (m) {
    case Metric::accuracy: return "accuracy";
    case Metric::sensitivity: return "sensitivity";
    case Metric::specificity: return "specificity";
    case Metric::precision: return "precision";
    case Metric::f_score: return "f_score";
  }
  return "unknown";
}

Metric parse_metric(std::string_view name) {
  if (name == "accuracy") return Metric::accuracy;
  if (name == "sensitivity") return Metric::sensitivity;
  if (name == "specificity") return Metric::specificity;
  if (name == "precision") return Metric::precision;
  if (name == "f_score" || name == "f1") return Metric::f_score;
  throw ConfigError("unknown metric '" + std::string(name) + "'");
}

double MetricReport::value(Metric m) const {
  switch (m) {
    case Metric::accuracy: return accuracy;
    case Metric::sensitivity: return sensitivity;
    case Metric::specificity: return specificity;
    case Metric::precision: return precision;
    case Metric::f_score: return f_score;
  }
  return 0.0;
}

namespace {
double ratio(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}
}  // namespace

MetricReport metrics_from_confusion(std::size_t tp, std::size_t tn, std::size_t fp, std::size_t fn) {
  MetricReport r;
  r.tp = tp;
  r.tn = tn;
  r.fp = fp;
  r.fn = fn;
  r.accuracy = ratio(tp + tn, tp + tn + fp + fn);
  r.sensitivity = ratio(tp, tp + fn);
  r.specificity = ratio(tn, tn + fp);
  r.precision = ratio(tp, tp + fp);
  const double s = r.precision + r.sensitivity;
  r.f_score = s > 0.0 ? 2.0 * r.precision * r.sensitivity / s : 0.0;
  return r;
}

MetricReport compute_metrics(std::span<const int> predicted, std::span<const int> actual, int positive_class) {
  if (predicted.size() != actual.size()) throw ArgumentError("predicted and actual labels differ in length");
  if (actual.empty()) throw ArgumentError("no labels to score");
  std::size_t tp = 0, tn = 0, fp = 0, fn = 0;
  for (std::size_t i = 0; i < actual.size(); ++i) {
    const bool p = predicted[i] == positive_class;
    const bool a = actual[i] == positive_class;
    if (p && a) ++tp;
    else if (!p && !a) ++tn;
    else if (p) ++fp;
    else ++fn;
  }
  return metrics_from_confusion(tp, tn, fp, fn);
}

}  // namespace wide
