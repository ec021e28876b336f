#include "wide/svm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "wide/error.hpp"

namespace wide {

std::string to_string(KernelKind k) {
  switch (k) {
    case KernelKind::linear: return "linear";
    case KernelKind::rbf: return "rbf";
    case KernelKind::poly: return "poly";
  }
  return "unknown";
}

KernelKind parse_kernel(std::string_view name) {
  if (name == "linear") return KernelKind::linear;
  if (name == "rbf") return KernelKind::rbf;
  if (name == "poly") return KernelKind::poly;
  throw ConfigError("unknown kernel '" + std::string(name) + "'");
}

Standardizer Standardizer::fit(const Eigen::MatrixXd& rows) {
  Standardizer s;
  const Eigen::Index d = rows.cols();
  s.mean = Eigen::VectorXd::Zero(d);
  s.inv_std = Eigen::VectorXd::Zero(d);
  if (rows.rows() == 0) return s;
  s.mean = rows.colwise().mean().transpose();
  for (Eigen::Index c = 0; c < d; ++c) {
    const double sd = std::sqrt((rows.col(c).array() - s.mean(c)).square().mean());
    if (sd > 1e-12 * std::max(1.0, std::abs(s.mean(c)))) s.inv_std(c) = 1.0 / sd;
  }
  return s;
}

Eigen::MatrixXd Standardizer::apply(const Eigen::MatrixXd& rows) const {
  if (rows.cols() != mean.size()) throw ArgumentError("row width does not match the standardizer");
  return (rows.rowwise() - mean.transpose()).array().rowwise() * inv_std.transpose().array();
}

double kernel_value(const KernelSpec& k, const Eigen::Ref<const Eigen::VectorXd>& a,
                    const Eigen::Ref<const Eigen::VectorXd>& b) {
  switch (k.kind) {
    case KernelKind::linear: return a.dot(b);
    case KernelKind::rbf: return std::exp(-k.gamma * (a - b).squaredNorm());
    case KernelKind::poly: return std::pow(k.gamma * a.dot(b) + k.coef0, k.degree);
  }
  return 0.0;
}

double SvmModel::decision_standardized(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  double f = bias;
  for (Eigen::Index i = 0; i < support_vectors.rows(); ++i) {
    f += alpha[static_cast<std::size_t>(i)] * y[static_cast<std::size_t>(i)] *
         kernel_value(kernel, support_vectors.row(i).transpose(), x);
  }
  return f;
}

Eigen::VectorXd SvmModel::decision(const Eigen::MatrixXd& rows) const {
  const Eigen::MatrixXd z = standardizer.apply(rows);
  Eigen::VectorXd out(z.rows());
  for (Eigen::Index r = 0; r < z.rows(); ++r) out(r) = decision_standardized(z.row(r).transpose());
  return out;
}

namespace {

// SMO on  min 1/2 a'Qa - e'a,  0 <= a_i <= ub_i,  y'a = 0,  Q_ij = y_i y_j K_ij.
struct Smo {
  const Eigen::MatrixXd& K;
  const std::vector<double>& y;
  const std::vector<double>& ub;
  double eps;
  std::vector<double> a;
  std::vector<double> G;
  std::size_t iterations = 0;

  Smo(const Eigen::MatrixXd& kernel, const std::vector<double>& labels, const std::vector<double>& bounds,
      double tolerance)
      : K(kernel), y(labels), ub(bounds), eps(tolerance), a(labels.size(), 0.0), G(labels.size(), -1.0) {}

  double Q(std::size_t i, std::size_t j) const {
    return y[i] * y[j] * K(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }
  bool at_upper(std::size_t t) const { return a[t] >= ub[t]; }
  bool at_lower(std::size_t t) const { return a[t] <= 0.0; }

  // Second-order working set selection; false once the KKT gap is below eps.
  bool select(std::size_t& out_i, std::size_t& out_j) const {
    constexpr double tau = 1e-12;
    const std::size_t n = a.size();
    double gmax = -std::numeric_limits<double>::infinity();
    std::size_t i = n;
    for (std::size_t t = 0; t < n; ++t) {
      if (y[t] > 0) {
        if (!at_upper(t) && -G[t] > gmax) {
          gmax = -G[t];
          i = t;
        }
      } else if (!at_lower(t) && G[t] > gmax) {
        gmax = G[t];
        i = t;
      }
    }
    if (i == n) return false;

    double gmax2 = -std::numeric_limits<double>::infinity();
    double best_obj = std::numeric_limits<double>::infinity();
    std::size_t j = n;
    const double kii = K(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i));
    for (std::size_t t = 0; t < n; ++t) {
      const double ktt = K(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(t));
      const double kit = K(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(t));
      double grad_diff = 0.0;
      if (y[t] > 0) {
        if (at_lower(t)) continue;
        gmax2 = std::max(gmax2, G[t]);
        grad_diff = gmax + G[t];
      } else {
        if (at_upper(t)) continue;
        gmax2 = std::max(gmax2, -G[t]);
        grad_diff = gmax - G[t];
      }
      if (grad_diff > 0.0) {
        double quad = kii + ktt - 2.0 * kit;
        if (quad <= 0.0) quad = tau;
        const double obj = -(grad_diff * grad_diff) / quad;
        if (obj < best_obj) {
          best_obj = obj;
          j = t;
        }
      }
    }
    if (gmax + gmax2 < eps || j == n) return false;
    out_i = i;
    out_j = j;
    return true;
  }

  void update(std::size_t i, std::size_t j) {
    constexpr double tau = 1e-12;
    const double Ci = ub[i], Cj = ub[j];
    const double old_ai = a[i], old_aj = a[j];
    double& ai = a[i];
    double& aj = a[j];
    const double qii = Q(i, i), qjj = Q(j, j), qij = Q(i, j);
    if (y[i] != y[j]) {
      double quad = qii + qjj + 2.0 * qij;
      if (quad <= 0.0) quad = tau;
      const double delta = (-G[i] - G[j]) / quad;
      const double diff = ai - aj;
      ai += delta;
      aj += delta;
      if (diff > 0.0) {
        if (aj < 0.0) {
          aj = 0.0;
          ai = diff;
        }
      } else if (ai < 0.0) {
        ai = 0.0;
        aj = -diff;
      }
      if (diff > Ci - Cj) {
        if (ai > Ci) {
          ai = Ci;
          aj = Ci - diff;
        }
      } else if (aj > Cj) {
        aj = Cj;
        ai = Cj + diff;
      }
    } else {
      double quad = qii + qjj - 2.0 * qij;
      if (quad <= 0.0) quad = tau;
      const double delta = (G[i] - G[j]) / quad;
      const double sum = ai + aj;
      ai -= delta;
      aj += delta;
      if (sum > Ci) {
        if (ai > Ci) {
          ai = Ci;
          aj = sum - Ci;
        }
      } else if (aj < 0.0) {
        aj = 0.0;
        ai = sum;
      }
      if (sum > Cj) {
        if (aj > Cj) {
          aj = Cj;
          ai = sum - Cj;
        }
      } else if (ai < 0.0) {
        ai = 0.0;
        aj = sum;
      }
    }
    const double dai = ai - old_ai, daj = aj - old_aj;
    for (std::size_t t = 0; t < a.size(); ++t) G[t] += Q(t, i) * dai + Q(t, j) * daj;
  }

  bool run(std::size_t max_iterations) {
    std::size_t i = 0, j = 0;
    while (iterations < max_iterations) {
      if (!select(i, j)) return true;
      update(i, j);
      ++iterations;
    }
    return false;
  }

  double rho() const {
    double ub_v = std::numeric_limits<double>::infinity();
    double lb_v = -std::numeric_limits<double>::infinity();
    double sum_free = 0.0;
    std::size_t free = 0;
    for (std::size_t t = 0; t < a.size(); ++t) {
      const double yg = y[t] * G[t];
      if (at_upper(t)) {
        if (y[t] < 0) ub_v = std::min(ub_v, yg);
        else lb_v = std::max(lb_v, yg);
      } else if (at_lower(t)) {
        if (y[t] > 0) ub_v = std::min(ub_v, yg);
        else lb_v = std::max(lb_v, yg);
      } else {
        ++free;
        sum_free += yg;
      }
    }
    return free > 0 ? sum_free / static_cast<double>(free) : (ub_v + lb_v) / 2.0;
  }
};

}  // namespace

SvmModel svm_train(const Eigen::MatrixXd& rows, std::span<const int> labels, const SvmConfig& config) {
  const auto n = static_cast<std::size_t>(rows.rows());
  if (labels.size() != n) throw ArgumentError("rows and labels differ in length");
  if (!(config.C > 0.0)) throw ConfigError("SVM C must be > 0");
  if (!(config.tolerance > 0.0)) throw ConfigError("SVM tolerance must be > 0");
  if (!rows.allFinite()) throw ArgumentError("training rows contain non-finite values");
  if (n == 0) throw TrainingError("no training rows");

  SvmModel model;
  model.classes = {labels[0], labels[0]};
  for (int l : labels) {
    if (l == model.classes[0] || l == model.classes[1]) continue;
    if (model.classes[0] != model.classes[1]) throw ArgumentError("SVM is binary; more than two labels given");
    if (l < model.classes[0]) model.classes[0] = l;
    else model.classes[1] = l;
  }
  if (model.classes[0] == model.classes[1]) throw TrainingError("training rows hold a single class");

  model.kernel = config.kernel;
  if (model.kernel.gamma <= 0.0) model.kernel.gamma = 1.0 / static_cast<double>(std::max<Eigen::Index>(1, rows.cols()));
  model.C = config.C;
  model.standardizer = Standardizer::fit(rows);
  const Eigen::MatrixXd z = model.standardizer.apply(rows);

  std::vector<double> y(n);
  std::array<std::size_t, 2> counts{0, 0};
  for (std::size_t i = 0; i < n; ++i) {
    const int c = labels[i] == model.classes[1] ? 1 : 0;
    y[i] = c ? 1.0 : -1.0;
    counts[static_cast<std::size_t>(c)]++;
  }
  if (config.weights == ClassWeightMode::balanced) {
    for (std::size_t c = 0; c < 2; ++c) {
      model.class_weights[c] = static_cast<double>(n) / (2.0 * static_cast<double>(counts[c]));
    }
  }
  std::vector<double> ub(n);
  for (std::size_t i = 0; i < n; ++i) ub[i] = model.class_weights[y[i] > 0 ? 1 : 0] * config.C;

  Eigen::MatrixXd K(z.rows(), z.rows());
  for (Eigen::Index i = 0; i < z.rows(); ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) {
      K(i, j) = K(j, i) = kernel_value(model.kernel, z.row(i).transpose(), z.row(j).transpose());
    }
  }

  Smo smo(K, y, ub, config.tolerance);
  const std::size_t max_iter =
      config.max_iterations ? config.max_iterations : std::max<std::size_t>(1000000, 100 * n);
  model.converged = smo.run(max_iter);
  model.iterations = smo.iterations;
  model.bias = -smo.rho();

  std::vector<Eigen::Index> sv;
  for (std::size_t i = 0; i < n; ++i) {
    if (smo.a[i] > 0.0) sv.push_back(static_cast<Eigen::Index>(i));
  }
  model.support_vectors.resize(static_cast<Eigen::Index>(sv.size()), z.cols());
  for (std::size_t s = 0; s < sv.size(); ++s) {
    model.support_vectors.row(static_cast<Eigen::Index>(s)) = z.row(sv[s]);
    const auto i = static_cast<std::size_t>(sv[s]);
    model.alpha.push_back(smo.a[i]);
    model.y.push_back(y[i]);
    model.bounds.push_back(ub[i]);
  }
  return model;
}

std::vector<int> svm_predict(const SvmModel& model, const Eigen::MatrixXd& rows) {
  if (rows.rows() == 0) return {};
  if (rows.cols() != model.standardizer.width()) {
    throw ArgumentError("row width " + std::to_string(rows.cols()) + " does not match the model's " +
                        std::to_string(model.standardizer.width()) + " features");
  }
  const Eigen::VectorXd f = model.decision(rows);
  std::vector<int> out(static_cast<std::size_t>(f.size()));
  for (Eigen::Index i = 0; i < f.size(); ++i) out[static_cast<std::size_t>(i)] = f(i) > 0.0 ? model.classes[1] : model.classes[0];
  return out;
}

}  // namespace wide
