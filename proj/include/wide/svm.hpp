#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace wide {

enum class KernelKind { linear, rbf, poly };

std::string to_string(KernelKind k);
KernelKind parse_kernel(std::string_view name);

/// gamma <= 0 means 1 / feature count, resolved at training time.
struct KernelSpec {
  KernelKind kind = KernelKind::linear;
  double gamma = 0.0;
  int degree = 3;
  double coef0 = 1.0;

  bool operator==(const KernelSpec&) const = default;
};

enum class ClassWeightMode { balanced, uniform };

struct SvmConfig {
  KernelSpec kernel;
  double C = 1.0;
  ClassWeightMode weights = ClassWeightMode::balanced;
  double tolerance = 1e-3;
  std::size_t max_iterations = 0;  // 0: max(10^7, 100 n)
};

/// Per-column affine map fitted on training rows. Columns with no spread map
/// to 0.
struct Standardizer {
  Eigen::VectorXd mean;
  Eigen::VectorXd inv_std;  // 0 for zero-variance columns

  static Standardizer fit(const Eigen::MatrixXd& rows);
  Eigen::MatrixXd apply(const Eigen::MatrixXd& rows) const;
  Eigen::Index width() const { return mean.size(); }
};

double kernel_value(const KernelSpec& k, const Eigen::Ref<const Eigen::VectorXd>& a,
                    const Eigen::Ref<const Eigen::VectorXd>& b);

struct SvmModel {
  KernelSpec kernel;  // gamma resolved
  double C = 1.0;
  /// classes[0] maps to y = -1, classes[1] to y = +1.
  std::array<int, 2> classes{0, 1};
  std::array<double, 2> class_weights{1.0, 1.0};
  Standardizer standardizer;

  Eigen::MatrixXd support_vectors;  // standardized, one per row
  std::vector<double> alpha;
  std::vector<double> y;       // +1 / -1
  std::vector<double> bounds;  // w_i C
  double bias = 0.0;

  std::size_t iterations = 0;
  bool converged = true;

  /// Decision values on raw (unstandardized) rows.
  Eigen::VectorXd decision(const Eigen::MatrixXd& rows) const;
  /// Decision value of an already standardized row.
  double decision_standardized(const Eigen::Ref<const Eigen::VectorXd>& x) const;
};

/// Soft-margin binary SVM by SMO with second-order working-set selection.
/// Exactly two distinct labels are required.
SvmModel svm_train(const Eigen::MatrixXd& rows, std::span<const int> labels, const SvmConfig& config);

std::vector<int> svm_predict(const SvmModel& model, const Eigen::MatrixXd& rows);

}  // namespace wide
