#pragma once

#include <cstdint>
#include <exception>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "wide/io.hpp"

namespace wide {

/// Flag values that take precedence over the config file.
struct CliOverrides {
  std::optional<double> tau;
  std::optional<int> folds;
  std::optional<std::uint64_t> seed;
  std::optional<std::vector<std::size_t>> k;
  std::optional<std::string> metric;
  std::optional<int> max_level;
};

struct RunArtifacts {
  std::string run_id;  // <UTC timestamp>-s<seed>[-n]
  std::filesystem::path dir;
  std::filesystem::path matrix_csv;
  std::filesystem::path descriptors_json;
  std::filesystem::path recommendation_json;
  std::filesystem::path report_txt;
  std::filesystem::path metrics_json;
  std::filesystem::path log;
};

/// Config file (if any) with the overrides applied.
RunConfig resolve_config(const std::optional<std::filesystem::path>& config_path, const CliOverrides& overrides);

/// $WIDE_OUT_DIR if set, else ./wide_runs.
std::filesystem::path default_out_dir();

RunArtifacts cmd_extract(const std::filesystem::path& manifest, const std::optional<std::filesystem::path>& config,
                         const std::filesystem::path& out_dir, const CliOverrides& overrides, std::ostream& out);

RunArtifacts cmd_recommend(const std::filesystem::path& manifest, const std::optional<std::filesystem::path>& config,
                           const std::filesystem::path& out_dir, const CliOverrides& overrides, std::ostream& out);

RunArtifacts cmd_baseline_pca(const std::filesystem::path& manifest,
                              const std::optional<std::filesystem::path>& config, const std::filesystem::path& out_dir,
                              const CliOverrides& overrides, std::ostream& out);

/// Comparison table over every run under `dir` (or `dir` itself); also
/// writes dir/report.csv. Returns the rendered table.
std::string cmd_report(const std::filesystem::path& dir, std::ostream& out);

/// 2 for input/config errors, 3 for run errors.
int exit_code_for(const std::exception& e);

}  // namespace wide
