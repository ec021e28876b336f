#include "wide/evaluation.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>

#include "wide/error.hpp"

namespace wide {

Eigen::MatrixXd gather(const FeatureMatrix& matrix, std::span<const std::size_t> rows,
                       std::span<const std::size_t> columns) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(columns.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < columns.size(); ++c) {
      out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = matrix.at(rows[r], columns[c]);
    }
  }
  return out;
}

std::vector<int> gather(std::span<const int> labels, std::span<const std::size_t> rows) {
  std::vector<int> out;
  out.reserve(rows.size());
  for (auto r : rows) out.push_back(labels[r]);
  return out;
}

namespace {

void check_inputs(const FeatureMatrix& matrix, std::span<const int> labels, std::span<const FoldRoles> splits) {
  if (labels.size() != matrix.rows) throw ArgumentError("labels do not cover the matrix rows");
  if (splits.empty()) throw ArgumentError("no splits to evaluate");
  for (const auto& s : splits) {
    for (const auto* set : {&s.train, &s.eval, &s.test}) {
      for (auto r : *set) {
        if (r >= matrix.rows) throw ArgumentError("split row " + std::to_string(r) + " is outside the matrix");
      }
    }
  }
}

// Grid search on one split with the rows already mapped into model space.
FoldOutcome fit_split(const Eigen::MatrixXd& train, const std::vector<int>& train_y, const Eigen::MatrixXd& eval,
                      const std::vector<int>& eval_y, const Eigen::MatrixXd* test, const std::vector<int>* test_y,
                      const EvalConfig& config) {
  FoldOutcome out;
  std::optional<SvmModel> best;
  double best_score = -1.0;
  for (const auto& kernel : config.kernels) {
    for (double C : config.c_grid) {
      SvmConfig sc{kernel, C, config.weights, config.tolerance, config.max_iterations};
      SvmModel model;
      try {
        model = svm_train(train, train_y, sc);
      } catch (const TrainingError& e) {
        out.failed = true;
        out.failure = e.what();
        return out;
      }
      const auto report = compute_metrics(svm_predict(model, eval), eval_y, config.positive_class);
      const double score = report.value(config.metric);
      if (score > best_score) {
        best_score = score;
        out.eval = report;
        out.kernel = kernel;
        out.C = C;
        best = std::move(model);
      }
    }
  }
  if (test && test->rows() > 0) {
    out.test = compute_metrics(svm_predict(*best, *test), *test_y, config.positive_class);
  }
  return out;
}

void check_grid(const EvalConfig& config) {
  if (config.kernels.empty()) throw ConfigError("kernel list is empty");
  if (config.c_grid.empty()) throw ConfigError("C grid is empty");
}

}  // namespace

std::vector<FoldOutcome> evaluate_feature_set(const FeatureMatrix& matrix, std::span<const int> labels,
                                              std::span<const std::size_t> feature_ids,
                                              std::span<const FoldRoles> splits, const EvalConfig& config,
                                              bool compute_test) {
  check_inputs(matrix, labels, splits);
  check_grid(config);
  if (feature_ids.empty()) throw ArgumentError("empty feature set");
  for (auto id : feature_ids) {
    if (id >= matrix.cols) throw ArgumentError("feature id " + std::to_string(id) + " is not a matrix column");
  }
  std::vector<FoldOutcome> outcomes;
  for (std::size_t f = 0; f < splits.size(); ++f) {
    const auto& s = splits[f];
    const auto train_y = gather(labels, s.train);
    const auto eval_y = gather(labels, s.eval);
    FoldOutcome o;
    if (s.eval.empty()) {
      o.failed = true;
      o.failure = "split has no eval rows";
    } else {
      const Eigen::MatrixXd test = compute_test ? gather(matrix, s.test, feature_ids) : Eigen::MatrixXd();
      const auto test_y = gather(labels, s.test);
      o = fit_split(gather(matrix, s.train, feature_ids), train_y, gather(matrix, s.eval, feature_ids), eval_y,
                    compute_test ? &test : nullptr, &test_y, config);
    }
    o.fold = static_cast<int>(f);
    o.feature_ids.assign(feature_ids.begin(), feature_ids.end());
    outcomes.push_back(std::move(o));
  }
  return outcomes;
}

std::vector<FoldOutcome> evaluate_feature_set(const FeatureMatrix& matrix, std::span<const int> labels,
                                              std::span<const std::size_t> feature_ids, const FoldPlan& plan,
                                              const EvalConfig& config, bool compute_test) {
  if (plan.assignments.size() != matrix.rows) throw ArgumentError("fold plan does not cover the matrix rows");
  const auto splits = rotating_roles(plan);
  return evaluate_feature_set(matrix, labels, feature_ids, splits, config, compute_test);
}

Eigen::MatrixXd PcaModel::project(const Eigen::MatrixXd& rows) const { return standardizer.apply(rows) * components; }

Eigen::MatrixXd PcaModel::back_project(const Eigen::MatrixXd& scores) const {
  return scores * components.transpose();
}

PcaModel fit_pca(const Eigen::MatrixXd& rows, std::size_t n_components) {
  const auto m = static_cast<Eigen::Index>(n_components);
  if (m < 1 || m > std::min(rows.rows(), rows.cols())) {
    throw ArgumentError("n_components " + std::to_string(n_components) + " must be in [1, min(rows, cols)] = [1, " +
                        std::to_string(std::min(rows.rows(), rows.cols())) + "]");
  }
  PcaModel pca;
  pca.standardizer = Standardizer::fit(rows);
  const Eigen::MatrixXd z = pca.standardizer.apply(rows);
  Eigen::BDCSVD<Eigen::MatrixXd> svd(z, Eigen::ComputeThinV);
  pca.components = svd.matrixV().leftCols(m);
  pca.singular_values = svd.singularValues().head(m);
  for (Eigen::Index c = 0; c < m; ++c) {
    Eigen::Index arg = 0;
    pca.components.col(c).cwiseAbs().maxCoeff(&arg);
    if (pca.components(arg, c) < 0.0) pca.components.col(c) *= -1.0;
  }
  const double dof = rows.rows() > 1 ? static_cast<double>(rows.rows() - 1) : 1.0;
  pca.explained_variance = pca.singular_values.array().square() / dof;
  return pca;
}

std::vector<FoldOutcome> pca_baseline(const FeatureMatrix& matrix, std::span<const int> labels,
                                      std::span<const FoldRoles> splits, std::size_t n_components,
                                      const EvalConfig& config) {
  check_inputs(matrix, labels, splits);
  check_grid(config);
  if (n_components < 1 || n_components > std::min(matrix.rows, matrix.cols)) {
    throw ArgumentError("n_components " + std::to_string(n_components) + " exceeds min(rows, cols) = " +
                        std::to_string(std::min(matrix.rows, matrix.cols)));
  }
  std::vector<std::size_t> all(matrix.cols);
  for (std::size_t c = 0; c < matrix.cols; ++c) all[c] = c;
  std::vector<FoldOutcome> outcomes;
  for (std::size_t f = 0; f < splits.size(); ++f) {
    const auto& s = splits[f];
    FoldOutcome o;
    const auto train_y = gather(labels, s.train);
    if (s.train.size() < n_components) {
      throw ArgumentError("split " + std::to_string(f) + " has fewer train rows than components");
    }
    if (s.eval.empty()) {
      o.failed = true;
      o.failure = "split has no eval rows";
    } else {
      const auto pca = fit_pca(gather(matrix, s.train, all), n_components);
      const Eigen::MatrixXd test = pca.project(gather(matrix, s.test, all));
      const auto test_y = gather(labels, s.test);
      o = fit_split(pca.project(gather(matrix, s.train, all)), train_y, pca.project(gather(matrix, s.eval, all)),
                    gather(labels, s.eval), &test, &test_y, config);
    }
    o.fold = static_cast<int>(f);
    o.feature_ids = all;
    o.components = n_components;
    outcomes.push_back(std::move(o));
  }
  return outcomes;
}

std::vector<FoldOutcome> pca_baseline(const FeatureMatrix& matrix, std::span<const int> labels, const FoldPlan& plan,
                                      std::size_t n_components, const EvalConfig& config) {
  if (plan.assignments.size() != matrix.rows) throw ArgumentError("fold plan does not cover the matrix rows");
  const auto splits = rotating_roles(plan);
  return pca_baseline(matrix, labels, splits, n_components, config);
}

double mean_metric(std::span<const FoldOutcome> outcomes, Metric metric, bool test_side) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& o : outcomes) {
    if (o.failed) continue;
    if (test_side && !o.test) continue;
    sum += (test_side ? *o.test : o.eval).value(metric);
    ++n;
  }
  return n ? sum / static_cast<double>(n) : 0.0;
}

MetricReport mean_report(std::span<const FoldOutcome> outcomes, bool test_side) {
  MetricReport r;
  r.accuracy = mean_metric(outcomes, Metric::accuracy, test_side);
  r.sensitivity = mean_metric(outcomes, Metric::sensitivity, test_side);
  r.specificity = mean_metric(outcomes, Metric::specificity, test_side);
  r.precision = mean_metric(outcomes, Metric::precision, test_side);
  r.f_score = mean_metric(outcomes, Metric::f_score, test_side);
  for (const auto& o : outcomes) {
    if (o.failed) continue;
    if (test_side && !o.test) continue;
    const auto& m = test_side ? *o.test : o.eval;
    r.tp += m.tp;
    r.tn += m.tn;
    r.fp += m.fp;
    r.fn += m.fn;
  }
  return r;
}

}  // namespace wide
