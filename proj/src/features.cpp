#include "wide/features.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <regex>
#include <unordered_map>

#include "wide/error.hpp"

namespace wide {

namespace {

constexpr std::array<std::string_view, 10> kSpectralNames = {
    "spectral_centroid", "spectral_spread", "spectral_rolloff",   "spectral_flatness",  "spectral_entropy",
    "spectral_flux",     "band_energy_ratio_1", "band_energy_ratio_2", "band_energy_ratio_3", "band_energy_ratio_4"};

constexpr std::array<std::string_view, 7> kPeakNames = {
    "peak_count",         "trough_count",       "peak_amplitude_mean", "peak_amplitude_std",
    "peak_interval_mean", "peak_interval_std",  "peak_trough_mean"};

constexpr std::array<std::string_view, 3> kBandLevel0Names = {"energy", "relative_energy", "entropy"};

template <std::size_t N>
bool contains(const std::array<std::string_view, N>& names, std::string_view s) {
  return std::find(names.begin(), names.end(), s) != names.end();
}

bool is_level0_statistic(const Lineage& l) {
  if (l.transform == "time") return l.statistic == "energy";
  if (l.transform == "stft") return l.statistic == "dominant_frequency";
  return contains(kBandLevel0Names, l.statistic);
}

// Whether (transform, band, statistic) names a catalog feature below level 2.
bool is_base_feature(const std::string& transform, const std::string& band, std::string_view statistic) {
  if (transform == "time") {
    return band.empty() && (statistic == "energy" || contains(kStatisticNames, statistic) || contains(kPeakNames, statistic));
  }
  if (transform == "stft") {
    return band.empty() && (statistic == "dominant_frequency" || contains(kSpectralNames, statistic));
  }
  return !band.empty() && (contains(kBandLevel0Names, statistic) || contains(kStatisticNames, statistic));
}

std::string band_name(bool approx, int level) { return (approx ? "approx" : "detail") + std::to_string(level); }

Lineage make(std::string transform, std::string band, std::string statistic) {
  Lineage l;
  l.transform = std::move(transform);
  l.band = std::move(band);
  l.statistic = std::move(statistic);
  return l;
}

std::size_t largest_power_of_two_at_most(std::size_t n) {
  std::size_t p = 1;
  while (p * 2 <= n) p *= 2;
  return p;
}

}  // namespace

// ---------------------------------------------------------------------------
// Lineage

int Lineage::level() const {
  if (is_ratio() || !derivative.empty()) return 2;
  return is_level0_statistic(*this) ? 0 : 1;
}

std::string Lineage::render() const {
  std::string out = transform;
  if (!derivative.empty()) out += "/" + derivative;
  if (!band.empty()) out += "/" + band;
  out += "/" + statistic;
  if (is_ratio()) out += "/over(" + (ratio_band.empty() ? ratio_statistic : ratio_band + "." + ratio_statistic) + ")";
  return out;
}

std::vector<std::string> Lineage::stages() const {
  std::vector<std::string> s{transform};
  if (!derivative.empty()) s.push_back(derivative);
  if (!band.empty()) s.push_back(band);
  s.push_back(statistic);
  if (is_ratio()) s.push_back("over(" + (ratio_band.empty() ? ratio_statistic : ratio_band + "." + ratio_statistic) + ")");
  return s;
}

Lineage parse_lineage(std::string_view path) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (start <= path.size()) {
    const auto slash = path.find('/', start);
    const auto end = slash == std::string_view::npos ? path.size() : slash;
    parts.emplace_back(path.substr(start, end - start));
    if (slash == std::string_view::npos) break;
    start = slash + 1;
  }
  const auto fail = [&](const std::string& why) {
    return ArgumentError("invalid lineage '" + std::string(path) + "': " + why);
  };
  if (parts.size() < 2) throw fail("too few stages");

  Lineage l;
  std::size_t i = 0;
  l.transform = parts[i++];
  static const std::regex dwt_re(R"(dwt\(([A-Za-z0-9_.\-]+)\))");
  static const std::regex band_re(R"((detail|approx)[1-9][0-9]*)");
  static const std::regex over_re(R"(over\((?:((?:detail|approx)[1-9][0-9]*)\.)?([a-z_0-9]+)\))");
  std::smatch m;
  const bool is_dwt = std::regex_match(l.transform, m, dwt_re);
  if (is_dwt) {
    wavelet(m[1].str());  // throws for unknown wavelets
  } else if (l.transform != "time" && l.transform != "stft") {
    throw fail("unknown transform '" + l.transform + "'");
  }

  if (l.transform == "time" && i < parts.size() && (parts[i] == "d1" || parts[i] == "d2")) l.derivative = parts[i++];
  if (is_dwt) {
    if (i >= parts.size() || !std::regex_match(parts[i], band_re)) throw fail("dwt lineage needs a band");
    l.band = parts[i++];
  }
  if (i >= parts.size()) throw fail("missing statistic");
  l.statistic = parts[i++];
  if (i < parts.size()) {
    if (!std::regex_match(parts[i], m, over_re)) throw fail("bad ratio stage '" + parts[i] + "'");
    l.ratio_band = m[1].str();
    l.ratio_statistic = m[2].str();
    ++i;
  }
  if (i != parts.size()) throw fail("trailing stages");

  if (!l.derivative.empty()) {
    if (!contains(kStatisticNames, l.statistic) || l.is_ratio()) throw fail("derivatives carry the statistical catalog only");
  } else if (!is_base_feature(l.transform, l.band, l.statistic)) {
    throw fail("'" + l.statistic + "' is not a catalog statistic for " + l.transform);
  }
  if (l.is_ratio()) {
    if (is_dwt != !l.ratio_band.empty()) throw fail("ratio denominator band mismatch");
    if (!is_base_feature(l.transform, l.ratio_band, l.ratio_statistic)) throw fail("unknown ratio denominator");
  }
  return l;
}

// ---------------------------------------------------------------------------
// FeatureMatrix

std::vector<double> FeatureMatrix::column(std::size_t c) const {
  std::vector<double> out(rows);
  for (std::size_t r = 0; r < rows; ++r) out[r] = at(r, c);
  return out;
}

std::vector<double> FeatureMatrix::column(std::size_t c, std::span<const std::size_t> row_subset) const {
  std::vector<double> out;
  out.reserve(row_subset.size());
  for (std::size_t r : row_subset) out.push_back(at(r, c));
  return out;
}

bool FeatureMatrix::is_guarded(std::size_t r, std::size_t c) const {
  return std::find(guarded_cells.begin(), guarded_cells.end(), std::pair{r, c}) != guarded_cells.end();
}

std::size_t FeatureMatrix::count_at_level(int level) const {
  return static_cast<std::size_t>(
      std::count_if(descriptors.begin(), descriptors.end(), [&](const auto& d) { return d.level == level; }));
}

void FeatureFragment::add(Lineage lineage, double value, bool was_guarded) {
  lineages.push_back(std::move(lineage));
  values.push_back(std::isfinite(value) ? value : 0.0);
  guarded.push_back(was_guarded);
}

// ---------------------------------------------------------------------------
// Transform resolution

ResolvedTransforms resolve_transforms(std::span<const SignalRecord> records, const ExtractionConfig& config) {
  if (records.empty()) throw ArgumentError("no records to resolve transforms for");
  if (config.dwt.bank.empty()) throw ConfigError("DWT wavelet bank is empty");
  if (config.dwt.depth < 1) throw ConfigError("DWT depth must be >= 1");
  if (config.stft.window == 0 || (config.stft.window & (config.stft.window - 1)) != 0) {
    throw ConfigError("STFT window must be a power of two");
  }
  if (config.stft.hop == 0 || config.stft.hop > config.stft.window) throw ConfigError("STFT hop must be in (0, window]");
  for (const auto& name : config.dwt.bank) wavelet(name);

  std::size_t shortest = records.front().samples.size();
  for (const auto& r : records) shortest = std::min(shortest, r.samples.size());

  ResolvedTransforms out;
  out.window = std::min(config.stft.window, largest_power_of_two_at_most(shortest));
  out.hop = std::max<std::size_t>(1, config.stft.hop * out.window / config.stft.window);

  for (const auto& name : config.dwt.bank) out.wavelet_votes[name] = 0;
  if (config.dwt.bank.size() == 1) {
    out.wavelet = config.dwt.bank.front();
  } else {
    for (const auto& r : records) {
      const int depth = std::min(config.dwt.depth, static_cast<int>(std::floor(std::log2(r.samples.size()))));
      try {
        const auto choice = select_mother_wavelet(std::span<const double>(r.samples), config.dwt.bank, depth);
        out.wavelet_votes[choice.wavelet_name]++;
      } catch (const DegenerateInputError&) {
        // no detail energy: abstain
      }
    }
    int best = -1;
    for (const auto& name : config.dwt.bank) {
      if (out.wavelet_votes[name] > best) {
        best = out.wavelet_votes[name];
        out.wavelet = name;
      }
    }
  }
  const auto& w = wavelet(out.wavelet);
  if (shortest < w.length()) {
    throw ConfigError("shortest record (" + std::to_string(shortest) + " samples) is shorter than the " + w.name +
                      " filter");
  }
  out.depth = clamp_depth(config.dwt.depth, shortest, w.length());
  return out;
}

// ---------------------------------------------------------------------------
// Level 0

Level0Output extract_level0(const SignalRecord& record, const ResolvedTransforms& transforms) {
  Level0Output out;
  out.time = record.samples;
  out.sample_rate_hz = record.sample_rate_hz;
  out.spectrogram = stft(out.time, transforms.window, transforms.hop);
  out.bands = dwt_decompose(out.time, transforms.wavelet, transforms.depth);

  double energy = 0.0;
  for (double v : out.time) energy += v * v;
  out.features.add(make("time", "", "energy"), energy);

  const std::string dwt = "dwt(" + transforms.wavelet + ")";
  const int depth = out.bands.depth();
  std::vector<std::pair<std::string, const std::vector<double>*>> bands;
  for (int j = 1; j <= depth; ++j) bands.emplace_back(band_name(false, j), &out.bands.details[static_cast<std::size_t>(j - 1)]);
  bands.emplace_back(band_name(true, depth), &out.bands.approx);

  std::vector<double> band_energy;
  double total = 0.0;
  for (const auto& [name, coeffs] : bands) {
    double e = 0.0;
    for (double c : *coeffs) e += c * c;
    band_energy.push_back(e);
    total += e;
  }
  for (std::size_t b = 0; b < bands.size(); ++b) {
    const auto& [name, coeffs] = bands[b];
    const double e = band_energy[b];
    double entropy = 0.0;
    if (e > 0.0) {
      for (double c : *coeffs) {
        const double p = c * c / e;
        if (p > 0.0) entropy -= p * std::log(p);
      }
    }
    out.features.add(make(dwt, name, "energy"), e);
    out.features.add(make(dwt, name, "relative_energy"), total > 0.0 ? e / total : 0.0);
    out.features.add(make(dwt, name, "entropy"), entropy);
  }

  const auto spectrum = mean_spectrum(out.spectrogram);
  const auto peak = static_cast<std::size_t>(std::max_element(spectrum.begin(), spectrum.end()) - spectrum.begin());
  out.features.add(make("stft", "", "dominant_frequency"),
                   bin_frequency(peak, out.spectrogram.window_len, out.sample_rate_hz));
  return out;
}

// ---------------------------------------------------------------------------
// Level 1

namespace {

void add_statistics(FeatureFragment& frag, const std::string& transform, const std::string& derivative,
                    const std::string& band, std::span<const double> x) {
  const auto summary = statistical_summary(x);
  for (std::size_t s = 0; s < kStatisticNames.size(); ++s) {
    Lineage l = make(transform, band, std::string(kStatisticNames[s]));
    l.derivative = derivative;
    frag.add(std::move(l), summary[s]);
  }
}

std::array<double, kSpectralNames.size()> spectral_summary(const Spectrogram& spec, double rate) {
  std::array<double, kSpectralNames.size()> out{};
  const auto m = mean_spectrum(spec);
  const std::size_t bins = m.size();
  std::vector<double> freq(bins);
  for (std::size_t k = 0; k < bins; ++k) freq[k] = bin_frequency(k, spec.window_len, rate);

  double mag_sum = 0.0, power_sum = 0.0;
  for (double v : m) {
    mag_sum += v;
    power_sum += v * v;
  }
  if (mag_sum > 0.0) {
    double centroid = 0.0;
    for (std::size_t k = 0; k < bins; ++k) centroid += freq[k] * m[k];
    centroid /= mag_sum;
    double spread = 0.0;
    for (std::size_t k = 0; k < bins; ++k) spread += (freq[k] - centroid) * (freq[k] - centroid) * m[k];
    spread = std::sqrt(spread / mag_sum);
    double cumulative = 0.0;
    double rolloff = freq.back();
    for (std::size_t k = 0; k < bins; ++k) {
      cumulative += m[k];
      if (cumulative >= 0.85 * mag_sum) {
        rolloff = freq[k];
        break;
      }
    }
    out[0] = centroid;
    out[1] = spread;
    out[2] = rolloff;
  }
  if (power_sum > 0.0) {
    double log_sum = 0.0;
    double entropy = 0.0;
    for (double v : m) {
      const double p = v * v;
      log_sum += std::log(p + 1e-300);
      const double q = p / power_sum;
      if (q > 0.0) entropy -= q * std::log(q);
    }
    const double arithmetic = power_sum / static_cast<double>(bins);
    out[3] = std::exp(log_sum / static_cast<double>(bins)) / arithmetic;
    out[4] = entropy;

    // Four log-spaced bands between bin 1 and the Nyquist bin; DC joins band 1.
    std::array<double, 4> band{};
    const double top = std::log(static_cast<double>(bins - 1));
    for (std::size_t k = 0; k < bins; ++k) {
      std::size_t b = 0;
      if (k >= 1 && top > 0.0) b = std::min<std::size_t>(3, static_cast<std::size_t>(4.0 * std::log(double(k)) / top));
      band[b] += m[k] * m[k];
    }
    for (std::size_t b = 0; b < 4; ++b) out[6 + b] = band[b] / power_sum;
  }
  if (spec.frames > 1) {
    double flux = 0.0;
    for (std::size_t f = 1; f < spec.frames; ++f) {
      double d2 = 0.0;
      for (std::size_t k = 0; k < bins; ++k) {
        const double d = spec.at(f, k) - spec.at(f - 1, k);
        d2 += d * d;
      }
      flux += std::sqrt(d2);
    }
    out[5] = flux / static_cast<double>(spec.frames - 1);
  }
  return out;
}

double mean_of(const std::vector<double>& v) { return stats::mean(v); }
double std_of(const std::vector<double>& v) { return std::sqrt(stats::variance(v)); }

std::array<double, kPeakNames.size()> peak_summary(std::span<const double> x, double rate, const PeakConfig& config) {
  std::array<double, kPeakNames.size()> out{};
  const auto peaks = find_peaks(x, config);
  std::vector<double> negated(x.size());
  std::transform(x.begin(), x.end(), negated.begin(), [](double v) { return -v; });
  const auto troughs = find_peaks(negated, config);

  std::vector<double> amplitude;
  for (std::size_t p : peaks) amplitude.push_back(x[p]);
  std::vector<double> interval;
  for (std::size_t i = 1; i < peaks.size(); ++i) interval.push_back(static_cast<double>(peaks[i] - peaks[i - 1]) / rate);
  std::vector<double> drop;
  for (std::size_t p : peaks) {
    const auto next = std::upper_bound(troughs.begin(), troughs.end(), p);
    if (next != troughs.end()) drop.push_back(x[p] - x[*next]);
  }
  out[0] = static_cast<double>(peaks.size());
  out[1] = static_cast<double>(troughs.size());
  out[2] = mean_of(amplitude);
  out[3] = std_of(amplitude);
  out[4] = mean_of(interval);
  out[5] = std_of(interval);
  out[6] = mean_of(drop);
  return out;
}

}  // namespace

FeatureFragment extract_level1(const Level0Output& level0, const PeakConfig& peaks) {
  FeatureFragment frag;
  add_statistics(frag, "time", "", "", level0.time);

  const std::string dwt = "dwt(" + level0.bands.wavelet_name + ")";
  const int depth = level0.bands.depth();
  for (int j = 1; j <= depth; ++j) {
    add_statistics(frag, dwt, "", band_name(false, j), level0.bands.details[static_cast<std::size_t>(j - 1)]);
  }
  add_statistics(frag, dwt, "", band_name(true, depth), level0.bands.approx);

  const auto spectral = spectral_summary(level0.spectrogram, level0.sample_rate_hz);
  for (std::size_t s = 0; s < kSpectralNames.size(); ++s) {
    frag.add(make("stft", "", std::string(kSpectralNames[s])), spectral[s]);
  }
  const auto pk = peak_summary(level0.time, level0.sample_rate_hz, peaks);
  for (std::size_t s = 0; s < kPeakNames.size(); ++s) frag.add(make("time", "", std::string(kPeakNames[s])), pk[s]);
  return frag;
}

// ---------------------------------------------------------------------------
// Level 2

FeatureFragment extract_level2(const Level0Output& level0, const FeatureFragment& level1) {
  std::unordered_map<std::string, double> known;
  for (std::size_t i = 0; i < level0.features.size(); ++i) known[level0.features.lineages[i].render()] = level0.features.values[i];
  for (std::size_t i = 0; i < level1.size(); ++i) known[level1.lineages[i].render()] = level1.values[i];

  FeatureFragment frag;
  const auto ratio = [&](Lineage numerator, const std::string& den_band, const std::string& den_stat) {
    const Lineage den = make(numerator.transform, den_band, den_stat);
    const auto num_it = known.find(numerator.render());
    const auto den_it = known.find(den.render());
    if (num_it == known.end() || den_it == known.end()) {
      throw ArgumentError("level-2 ratio needs '" + numerator.render() + "' and '" + den.render() + "'");
    }
    numerator.ratio_band = den_band;
    numerator.ratio_statistic = den_stat;
    const double d = den_it->second;
    if (std::abs(d) < kRatioGuard) {
      frag.add(std::move(numerator), 0.0, true);
    } else {
      frag.add(std::move(numerator), num_it->second / d);
    }
  };

  ratio(make("stft", "", "spectral_centroid"), "", "spectral_spread");
  ratio(make("stft", "", "spectral_rolloff"), "", "spectral_centroid");
  ratio(make("time", "", "rms"), "", "range");
  ratio(make("time", "", "peak_count"), "", "trough_count");
  ratio(make("time", "", "iqr"), "", "std");
  const std::string dwt = "dwt(" + level0.bands.wavelet_name + ")";
  const int depth = level0.bands.depth();
  for (int j = 1; j < depth; ++j) ratio(make(dwt, band_name(false, j), "energy"), band_name(false, j + 1), "energy");
  ratio(make(dwt, band_name(false, depth), "energy"), band_name(true, depth), "energy");

  std::vector<double> d1(level0.time.size() - 1);
  for (std::size_t i = 0; i + 1 < level0.time.size(); ++i) d1[i] = level0.time[i + 1] - level0.time[i];
  std::vector<double> d2(d1.size() - 1);
  for (std::size_t i = 0; i + 1 < d1.size(); ++i) d2[i] = d1[i + 1] - d1[i];
  add_statistics(frag, "time", "d1", "", d1);
  add_statistics(frag, "time", "d2", "", d2);
  return frag;
}

// ---------------------------------------------------------------------------
// Matrix assembly

FeatureMatrix build_feature_matrix(std::span<const SignalRecord> records, const ExtractionConfig& config,
                                   int max_level) {
  if (records.empty()) throw ArgumentError("no records to extract features from");
  return build_feature_matrix(records, config, max_level, resolve_transforms(records, config));
}

FeatureMatrix build_feature_matrix(std::span<const SignalRecord> records, const ExtractionConfig& config,
                                   int max_level, const ResolvedTransforms& transforms) {
  if (records.empty()) throw ArgumentError("no records to extract features from");
  if (max_level < 0 || max_level > 2) throw ConfigError("max_level must be 0, 1 or 2");
  const double rate = records.front().sample_rate_hz;
  for (const auto& r : records) {
    if (std::abs(r.sample_rate_hz - rate) > 1e-9 * rate) {
      throw ConfigError("mixed sample rates: record '" + r.id + "' has " + std::to_string(r.sample_rate_hz) +
                        " Hz, expected " + std::to_string(rate) + " Hz");
    }
  }

  FeatureMatrix m;
  m.rows = records.size();
  for (std::size_t r = 0; r < records.size(); ++r) {
    const auto& record = records[r];
    validate_record(record);
    std::vector<const FeatureFragment*> parts;
    const auto level0 = extract_level0(record, transforms);
    parts.push_back(&level0.features);
    FeatureFragment level1;
    FeatureFragment level2;
    if (max_level >= 1) {
      level1 = extract_level1(level0, config.peaks);
      parts.push_back(&level1);
    }
    if (max_level >= 2) {
      level2 = extract_level2(level0, level1);
      parts.push_back(&level2);
    }

    if (r == 0) {
      for (const auto* part : parts) {
        for (std::size_t i = 0; i < part->size(); ++i) {
          FeatureDescriptor d;
          d.id = m.descriptors.size();
          d.lineage = part->lineages[i];
          d.level = d.lineage.level();
          d.name = d.lineage.render();
          d.guarded_division = d.lineage.is_ratio();
          m.descriptors.push_back(std::move(d));
        }
      }
      m.cols = m.descriptors.size();
      m.values.reserve(m.rows * m.cols);
    }
    std::size_t c = 0;
    for (const auto* part : parts) {
      for (std::size_t i = 0; i < part->size(); ++i, ++c) {
        if (c >= m.cols || part->lineages[i] != m.descriptors[c].lineage) {
          throw RunError("record '" + record.id + "' produced a different feature layout");
        }
        m.values.push_back(part->values[i]);
        if (part->guarded[i]) m.guarded_cells.emplace_back(r, c);
      }
    }
    m.record_ids.push_back(record.id);
  }
  return m;
}

FeatureMatrix select_columns(const FeatureMatrix& matrix, std::span<const std::size_t> columns) {
  FeatureMatrix out;
  out.rows = matrix.rows;
  out.cols = columns.size();
  out.record_ids = matrix.record_ids;
  out.values.reserve(out.rows * out.cols);
  for (std::size_t c = 0; c < columns.size(); ++c) {
    if (columns[c] >= matrix.cols) throw ArgumentError("column " + std::to_string(columns[c]) + " out of range");
    FeatureDescriptor d = matrix.descriptors[columns[c]];
    d.id = c;
    out.descriptors.push_back(std::move(d));
  }
  for (std::size_t r = 0; r < matrix.rows; ++r) {
    for (std::size_t c : columns) out.values.push_back(matrix.at(r, c));
  }
  for (const auto& [r, c] : matrix.guarded_cells) {
    const auto it = std::find(columns.begin(), columns.end(), c);
    if (it != columns.end()) out.guarded_cells.emplace_back(r, static_cast<std::size_t>(it - columns.begin()));
  }
  return out;
}

}  // namespace wide
