#pragma once

#include <filesystem>
#include <json.hpp>
#include <span>
#include <string>
#include <vector>

#include "wide/evaluation.hpp"
#include "wide/features.hpp"
#include "wide/recommender.hpp"

namespace wide {

using json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

/// Everything a run reads from its config file. Keys left out keep their
/// defaults; unknown keys are rejected.
struct RunConfig {
  RecommendConfig recommend;
  bool seed_given = false;
  std::vector<std::size_t> pca_components{5, 10, 15};
};

RunConfig run_config_from_json(const json& doc);
RunConfig load_run_config(const std::filesystem::path& path);
json to_json(const RunConfig& config);

json to_json(const KernelSpec& k);
json to_json(const MetricReport& m);
json to_json(const FoldOutcome& o);
json to_json(std::span<const FoldOutcome> outcomes);
json descriptors_json(std::span<const FeatureDescriptor> descriptors);
json to_json(std::span<const TraceStep> trace);
json to_json(const Recommendation& rec, const RecommendConfig& config);

/// `record_id,label,<feature names...>` then one row per record, values in
/// shortest round-trip form.
void write_matrix_csv(const FeatureMatrix& matrix, std::span<const int> labels, const std::filesystem::path& path);

void write_json(const std::filesystem::path& path, const json& doc);
json read_json(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

/// Shortest decimal form that parses back to the same double.
std::string format_exact(double v);
/// `digits` significant digits, for human-facing tables.
std::string format_sig(double v, int digits = 6);

}  // namespace wide
