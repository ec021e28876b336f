#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace wide {

inline constexpr std::size_t kMinSignalLength = 16;

/// One labeled 1-D signal.
struct SignalRecord {
  std::string id;
  std::vector<double> samples;
  double sample_rate_hz = 0.0;
  int label = 0;
};

enum class SignalFormat { csv_column, wav };

struct ManifestEntry {
  std::filesystem::path path;
  int label = 0;
  std::optional<std::string> id;
  /// CSV files carry no rate; falls back to DatasetManifest::sample_rate_hz.
  std::optional<double> sample_rate_hz;
};

struct DatasetManifest {
  SignalFormat format = SignalFormat::csv_column;
  std::vector<std::string> class_names;
  std::vector<ManifestEntry> records;
  std::optional<double> sample_rate_hz;
};

/// Parses a manifest JSON file. Relative record paths are resolved against the
/// manifest's directory.
DatasetManifest read_manifest(const std::filesystem::path& manifest_path);

/// Throws ValidationError naming the record when an invariant is broken.
void validate_record(const SignalRecord& record);

std::vector<SignalRecord> load_dataset(const DatasetManifest& manifest);

/// Single-column CSV; an optional non-numeric first line is taken as a header.
std::vector<double> read_csv_column(const std::filesystem::path& path);

struct WavData {
  std::vector<double> samples;  // channel 0, scaled to [-1, 1)
  double sample_rate_hz = 0.0;
  int bits_per_sample = 0;
  int channels = 0;
};

/// PCM WAV reader (8/16/24/32-bit integer).
WavData read_wav(const std::filesystem::path& path);

/// Per-record fold index in [0, p).
struct FoldPlan {
  int p = 0;
  std::uint64_t seed = 0;
  std::vector<int> assignments;
};

FoldPlan make_folds(std::span<const SignalRecord> records, int p, std::uint64_t seed);
FoldPlan make_folds(std::span<const int> labels, int p, std::uint64_t seed);

/// Index sets of one evaluation split. All three are sorted and disjoint.
struct FoldRoles {
  std::vector<std::size_t> train;
  std::vector<std::size_t> eval;
  std::vector<std::size_t> test;
};

/// test = test_fold, eval = (test_fold + 1) mod p, train = the rest.
FoldRoles fold_roles(const FoldPlan& plan, int test_fold);

/// Every rotation of fold_roles, one per fold.
std::vector<FoldRoles> rotating_roles(const FoldPlan& plan);

/// Splits that keep one fold hidden for good: for every other fold e,
/// eval = e, train = remaining non-hidden folds, test = hidden_fold.
std::vector<FoldRoles> hidden_test_roles(const FoldPlan& plan, int hidden_fold);

std::vector<int> labels_of(std::span<const SignalRecord> records);

}  // namespace wide
