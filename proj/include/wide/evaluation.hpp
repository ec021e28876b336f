#pragma once

#include <Eigen/Dense>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "wide/dataset.hpp"
#include "wide/features.hpp"
#include "wide/metrics.hpp"
#include "wide/svm.hpp"

namespace wide {

/// Kernel/C grid searched on eval rows, plus the scoring setup.
struct EvalConfig {
  std::vector<KernelSpec> kernels{{KernelKind::linear}, {KernelKind::rbf}, {KernelKind::poly}};
  std::vector<double> c_grid{0.1, 1.0, 10.0};
  ClassWeightMode weights = ClassWeightMode::balanced;
  Metric metric = Metric::accuracy;
  int positive_class = 1;
  double tolerance = 1e-3;
  std::size_t max_iterations = 0;
  std::uint64_t seed = 0;
};

struct FoldOutcome {
  int fold = 0;  // position in the split list
  bool failed = false;
  std::string failure;
  MetricReport eval;
  std::optional<MetricReport> test;
  std::vector<std::size_t> feature_ids;
  KernelSpec kernel;
  double C = 0.0;
  std::size_t components = 0;  // PCA runs only
};

Eigen::MatrixXd gather(const FeatureMatrix& matrix, std::span<const std::size_t> rows,
                       std::span<const std::size_t> columns);
std::vector<int> gather(std::span<const int> labels, std::span<const std::size_t> rows);

/// For each split: train every (kernel, C) on train rows, keep the one with
/// the best eval metric (first in grid order on ties), report its eval
/// metrics and, if asked, its test metrics. A split whose train rows hold one
/// class is marked failed.
std::vector<FoldOutcome> evaluate_feature_set(const FeatureMatrix& matrix, std::span<const int> labels,
                                              std::span<const std::size_t> feature_ids,
                                              std::span<const FoldRoles> splits, const EvalConfig& config,
                                              bool compute_test = true);
/// One split per fold via rotating_roles.
std::vector<FoldOutcome> evaluate_feature_set(const FeatureMatrix& matrix, std::span<const int> labels,
                                              std::span<const std::size_t> feature_ids, const FoldPlan& plan,
                                              const EvalConfig& config, bool compute_test = true);

struct PcaModel {
  Standardizer standardizer;
  Eigen::MatrixXd components;     // d x m, orthonormal columns
  Eigen::VectorXd singular_values;
  Eigen::VectorXd explained_variance;  // s^2 / (n - 1)

  Eigen::MatrixXd project(const Eigen::MatrixXd& rows) const;
  /// Standardized-space reconstruction of projected scores.
  Eigen::MatrixXd back_project(const Eigen::MatrixXd& scores) const;
};

/// Principal axes of the standardized rows; each axis is signed so that its
/// largest-magnitude loading is positive.
PcaModel fit_pca(const Eigen::MatrixXd& rows, std::size_t n_components);

/// PCA fitted on each split's train rows, then the same kernel/C search as
/// evaluate_feature_set on the projected rows.
std::vector<FoldOutcome> pca_baseline(const FeatureMatrix& matrix, std::span<const int> labels,
                                      std::span<const FoldRoles> splits, std::size_t n_components,
                                      const EvalConfig& config);
std::vector<FoldOutcome> pca_baseline(const FeatureMatrix& matrix, std::span<const int> labels, const FoldPlan& plan,
                                      std::size_t n_components, const EvalConfig& config);

/// Mean of a metric over non-failed outcomes (eval or test side); 0 if none.
double mean_metric(std::span<const FoldOutcome> outcomes, Metric metric, bool test_side);
MetricReport mean_report(std::span<const FoldOutcome> outcomes, bool test_side);

}  // namespace wide
