#pragma once

#include <map>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "wide/dataset.hpp"
#include "wide/spectral.hpp"
#include "wide/stats.hpp"
#include "wide/wavelet.hpp"

namespace wide {

/// Where a feature comes from, bottom to top.
///
/// Rendered as `transform[/derivative][/band]/statistic[/over(denominator)]`,
/// e.g. `dwt(db4)/detail3/energy`, `time/d1/rms`,
/// `stft/spectral_centroid/over(spectral_spread)`,
/// `dwt(db4)/detail1/energy/over(detail2.energy)`.
struct Lineage {
  std::string transform;   // "time", "stft" or "dwt(<wavelet>)"
  std::string derivative;  // "", "d1" or "d2" (time only)
  std::string band;        // "", "detail<j>" or "approx<j>" (dwt only)
  std::string statistic;
  std::string ratio_band;       // denominator band, dwt ratios only
  std::string ratio_statistic;  // empty unless this is a ratio feature

  bool is_ratio() const { return !ratio_statistic.empty(); }
  int level() const;
  std::string render() const;
  std::vector<std::string> stages() const;

  bool operator==(const Lineage&) const = default;
};

/// Parses a rendered lineage path; throws ArgumentError when the path does not
/// name a catalog feature.
Lineage parse_lineage(std::string_view path);

struct FeatureDescriptor {
  std::size_t id = 0;
  int level = 0;
  Lineage lineage;
  std::string name;  // rendered lineage path, unique within a matrix
  bool guarded_division = false;
};

/// records x features, row-major.
struct FeatureMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;
  std::vector<FeatureDescriptor> descriptors;
  std::vector<std::string> record_ids;
  /// (row, col) cells where a ratio's denominator vanished and 0 was stored.
  std::vector<std::pair<std::size_t, std::size_t>> guarded_cells;

  double at(std::size_t r, std::size_t c) const { return values[r * cols + c]; }
  double& at(std::size_t r, std::size_t c) { return values[r * cols + c]; }
  std::span<const double> row(std::size_t r) const { return {values.data() + r * cols, cols}; }
  std::vector<double> column(std::size_t c) const;
  std::vector<double> column(std::size_t c, std::span<const std::size_t> row_subset) const;
  bool is_guarded(std::size_t r, std::size_t c) const;
  std::size_t count_at_level(int level) const;
};

struct StftConfig {
  std::size_t window = 256;
  std::size_t hop = 128;
};

struct DwtConfig {
  std::vector<std::string> bank = default_wavelet_bank();
  int depth = 4;
  Extension extension = Extension::symmetric;
};

struct ExtractionConfig {
  StftConfig stft;
  DwtConfig dwt;
  PeakConfig peaks;
  int max_level = 2;
};

/// Dataset-wide transform settings, so every record yields the same columns.
struct ResolvedTransforms {
  std::string wavelet;
  int depth = 1;
  std::size_t window = 0;
  std::size_t hop = 0;
  std::map<std::string, int> wavelet_votes;
};

/// The mother wavelet is the one most records pick by energy-to-entropy
/// ratio (ties by bank order; records with no detail energy abstain). STFT
/// window and DWT depth are clamped to the shortest record.
ResolvedTransforms resolve_transforms(std::span<const SignalRecord> records, const ExtractionConfig& config);

/// Features of one record at one level, in column order.
struct FeatureFragment {
  std::vector<Lineage> lineages;
  std::vector<double> values;
  std::vector<bool> guarded;

  void add(Lineage lineage, double value, bool was_guarded = false);
  std::size_t size() const { return values.size(); }
};

struct Level0Output {
  std::vector<double> time;
  double sample_rate_hz = 0.0;
  Spectrogram spectrogram;
  WaveletBands bands;
  FeatureFragment features;
};

Level0Output extract_level0(const SignalRecord& record, const ResolvedTransforms& transforms);
FeatureFragment extract_level1(const Level0Output& level0, const PeakConfig& peaks);
FeatureFragment extract_level2(const Level0Output& level0, const FeatureFragment& level1);

/// Denominators with |d| < this produce a 0 ratio and a guarded cell.
inline constexpr double kRatioGuard = 1e-12;

FeatureMatrix build_feature_matrix(std::span<const SignalRecord> records, const ExtractionConfig& config,
                                   int max_level);
FeatureMatrix build_feature_matrix(std::span<const SignalRecord> records, const ExtractionConfig& config,
                                   int max_level, const ResolvedTransforms& transforms);

/// Columns kept in the given order, ids renumbered from 0.
FeatureMatrix select_columns(const FeatureMatrix& matrix, std::span<const std::size_t> columns);

}  // namespace wide
