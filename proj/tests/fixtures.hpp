#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "wide/dataset.hpp"
#include "wide/features.hpp"
#include "wide/random.hpp"

namespace wide::testing {

inline std::vector<double> sine(std::size_t n, double freq_hz, double rate_hz, double amplitude = 1.0,
                                double phase = 0.0) {
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = amplitude * std::sin(2.0 * std::numbers::pi * freq_hz * static_cast<double>(i) / rate_hz + phase);
  }
  return x;
}

inline std::vector<double> gaussian(std::size_t n, Rng& rng, double sd = 1.0) {
  std::vector<double> x(n);
  for (auto& v : x) v = rng.normal(0.0, sd);
  return x;
}

inline SignalRecord record(std::string id, std::vector<double> samples, int label, double rate = 1000.0) {
  return SignalRecord{std::move(id), std::move(samples), rate, label};
}

/// Fresh scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("wide_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

/// Bare matrix with placeholder descriptors, one column per feature.
inline FeatureMatrix matrix_from(const Eigen::MatrixXd& x) {
  FeatureMatrix m;
  m.rows = static_cast<std::size_t>(x.rows());
  m.cols = static_cast<std::size_t>(x.cols());
  m.values.resize(m.rows * m.cols);
  for (std::size_t c = 0; c < m.cols; ++c) {
    FeatureDescriptor d;
    d.id = c;
    d.name = "f" + std::to_string(c);
    m.descriptors.push_back(d);
    for (std::size_t r = 0; r < m.rows; ++r) m.at(r, c) = x(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
  }
  for (std::size_t r = 0; r < m.rows; ++r) m.record_ids.push_back("r" + std::to_string(r));
  return m;
}

}  // namespace wide::testing
