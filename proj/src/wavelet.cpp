#include "wide/wavelet.hpp"

#include <cmath>
#include <mutex>

#include "wide/error.hpp"

namespace wide {

namespace {

// Decomposition low-pass filters, in the same orientation as PyWavelets.
const std::vector<std::pair<std::string, std::vector<double>>>& builtin_filters() {
  static const std::vector<std::pair<std::string, std::vector<double>>> filters = {
      {"haar", {0.7071067811865476, 0.7071067811865476}},
      {"db2", {-0.12940952255126037, 0.2241438680420134, 0.8365163037378079, 0.48296291314453416}},
      {"db4",
       {-0.010597401785069032, 0.0328830116668852, 0.030841381835560764, -0.18703481171909309,
        -0.027983769416859854, 0.6308807679298589, 0.7148465705529157, 0.2303778133088965}},
      {"db8",
       {-0.00011747678412476953, 0.0006754494064505693, -0.00039174037337694705, -0.004870352993451574,
        0.008746094047405777, 0.013981027917398282, -0.044088253930794755, -0.017369301001807547,
        0.12874742662047847, 0.0004724845739132828, -0.2840155429615469, -0.015829105256349306,
        0.5853546836542067, 0.6756307362972898, 0.31287159091429995, 0.05441584224310401}},
      {"sym4",
       {-0.07576571478927333, -0.02963552764599851, 0.49761866763201545, 0.8037387518059161,
        0.29785779560527736, -0.09921954357684722, -0.012603967262037833, 0.0322231006040427}},
      {"coif1",
       {-0.015655728135791993, -0.07273261951252645, 0.3848648468648578, 0.8525720202116004,
        0.3378976624574818, -0.07273261951252645}},
  };
  return filters;
}

Wavelet make_wavelet(std::string name, std::vector<double> dec_lo) {
  Wavelet w{std::move(name), std::move(dec_lo), {}};
  const std::size_t len = w.dec_lo.size();
  w.dec_hi.resize(len);
  for (std::size_t j = 0; j < len; ++j) {
    const double sign = (j % 2 == 0) ? -1.0 : 1.0;
    w.dec_hi[j] = sign * w.dec_lo[len - 1 - j];
  }
  return w;
}

struct Registry {
  std::mutex mutex;
  std::map<std::string, Wavelet, std::less<>> wavelets;

  Registry() {
    for (const auto& [name, lo] : builtin_filters()) wavelets.emplace(name, make_wavelet(name, lo));
  }
};

Registry& registry() {
  static Registry r;
  return r;
}

// Half-sample symmetric index into [0, n).
std::size_t reflect(std::ptrdiff_t t, std::size_t n) {
  const auto period = static_cast<std::ptrdiff_t>(2 * n);
  std::ptrdiff_t m = t % period;
  if (m < 0) m += period;
  return m < static_cast<std::ptrdiff_t>(n) ? static_cast<std::size_t>(m) : static_cast<std::size_t>(period - 1 - m);
}

std::size_t wrap(std::ptrdiff_t t, std::size_t n) {
  const auto nn = static_cast<std::ptrdiff_t>(n);
  std::ptrdiff_t m = t % nn;
  return static_cast<std::size_t>(m < 0 ? m + nn : m);
}

// One analysis step: out[k] = sum_j filter[j] * x[2k + 1 - j] on the extended signal.
void analysis_step(std::span<const double> x, const Wavelet& w, Extension ext, std::vector<double>& approx,
                   std::vector<double>& detail) {
  const std::size_t len = w.length();
  std::vector<double> padded;
  std::span<const double> input = x;
  std::size_t count = 0;
  if (ext == Extension::symmetric) {
    count = (x.size() + len - 1) / 2;
  } else {
    if (x.size() % 2 == 1) {
      padded.assign(x.begin(), x.end());
      padded.push_back(x.back());
      input = padded;
    }
    count = input.size() / 2;
  }
  approx.assign(count, 0.0);
  detail.assign(count, 0.0);
  const std::size_t n = input.size();
  for (std::size_t k = 0; k < count; ++k) {
    double a = 0.0;
    double d = 0.0;
    for (std::size_t j = 0; j < len; ++j) {
      const std::ptrdiff_t t = static_cast<std::ptrdiff_t>(2 * k + 1) - static_cast<std::ptrdiff_t>(j);
      const double v = input[ext == Extension::symmetric ? reflect(t, n) : wrap(t, n)];
      a += w.dec_lo[j] * v;
      d += w.dec_hi[j] * v;
    }
    approx[k] = a;
    detail[k] = d;
  }
}

// Adjoint of analysis_step, which is its inverse for an orthogonal bank.
std::vector<double> synthesis_step(std::span<const double> approx, std::span<const double> detail, const Wavelet& w,
                                   Extension ext, std::size_t out_len) {
  const std::size_t len = w.length();
  if (ext == Extension::symmetric) {
    std::vector<double> out(out_len, 0.0);
    for (std::size_t k = 0; k < approx.size(); ++k) {
      for (std::size_t j = 0; j < len; ++j) {
        const std::ptrdiff_t t = static_cast<std::ptrdiff_t>(2 * k + 1) - static_cast<std::ptrdiff_t>(j);
        if (t < 0 || t >= static_cast<std::ptrdiff_t>(out_len)) continue;
        out[static_cast<std::size_t>(t)] += w.dec_lo[j] * approx[k] + w.dec_hi[j] * detail[k];
      }
    }
    return out;
  }
  const std::size_t n = 2 * approx.size();
  std::vector<double> out(n, 0.0);
  for (std::size_t k = 0; k < approx.size(); ++k) {
    for (std::size_t j = 0; j < len; ++j) {
      const std::ptrdiff_t t = static_cast<std::ptrdiff_t>(2 * k + 1) - static_cast<std::ptrdiff_t>(j);
      out[wrap(t, n)] += w.dec_lo[j] * approx[k] + w.dec_hi[j] * detail[k];
    }
  }
  out.resize(out_len);
  return out;
}

}  // namespace

const Wavelet& wavelet(std::string_view name) {
  auto& reg = registry();
  std::lock_guard lock(reg.mutex);
  const auto it = reg.wavelets.find(name);
  if (it == reg.wavelets.end()) throw ArgumentError("unknown wavelet '" + std::string(name) + "'");
  return it->second;
}

void register_wavelet(std::string name, std::vector<double> dec_lo) {
  if (dec_lo.size() < 2 || dec_lo.size() % 2 != 0) {
    throw ArgumentError("wavelet filter for '" + name + "' must have even length >= 2");
  }
  auto& reg = registry();
  std::lock_guard lock(reg.mutex);
  reg.wavelets.insert_or_assign(name, make_wavelet(name, std::move(dec_lo)));
}

std::vector<std::string> default_wavelet_bank() {
  std::vector<std::string> names;
  for (const auto& [name, lo] : builtin_filters()) names.push_back(name);
  return names;
}

int clamp_depth(int requested, std::size_t n, std::size_t filter_length) {
  int max_depth = 0;
  if (filter_length > 0 && n >= filter_length) {
    max_depth = static_cast<int>(std::floor(std::log2(static_cast<double>(n) / static_cast<double>(filter_length))));
  }
  return std::max(1, std::min(requested, max_depth));
}

WaveletBands dwt_decompose(std::span<const double> samples, std::string_view wavelet_name, int depth,
                           Extension extension) {
  const Wavelet& w = wavelet(wavelet_name);
  if (depth < 1) throw ArgumentError("DWT depth must be >= 1");
  if (samples.size() < w.length()) {
    throw ArgumentError("signal of length " + std::to_string(samples.size()) + " is shorter than the " + w.name +
                        " filter");
  }
  WaveletBands bands;
  bands.wavelet_name = w.name;
  bands.extension = extension;
  std::vector<double> current(samples.begin(), samples.end());
  for (int level = 0; level < depth; ++level) {
    std::vector<double> approx;
    std::vector<double> detail;
    bands.level_lengths.push_back(current.size());
    analysis_step(current, w, extension, approx, detail);
    bands.details.push_back(std::move(detail));
    current = std::move(approx);
  }
  bands.approx = std::move(current);
  return bands;
}

std::vector<double> dwt_reconstruct(const WaveletBands& bands) {
  const Wavelet& w = wavelet(bands.wavelet_name);
  std::vector<double> current = bands.approx;
  for (int level = bands.depth() - 1; level >= 0; --level) {
    const auto& detail = bands.details[static_cast<std::size_t>(level)];
    if (detail.size() != current.size()) throw ArgumentError("band length mismatch at level " + std::to_string(level + 1));
    current = synthesis_step(current, detail, w, bands.extension, bands.level_lengths[static_cast<std::size_t>(level)]);
  }
  return current;
}

WaveletChoice select_mother_wavelet(std::span<const double> samples, std::span<const std::string> bank, int depth) {
  if (bank.empty()) throw ArgumentError("wavelet bank is empty");
  if (depth < 1 || samples.size() < (std::size_t{1} << depth)) {
    throw ArgumentError("signal of length " + std::to_string(samples.size()) + " is too short for depth " +
                        std::to_string(depth));
  }
  double signal_energy = 0.0;
  for (double v : samples) signal_energy += v * v;

  WaveletChoice choice;
  bool any = false;
  for (const auto& name : bank) {
    const auto bands = dwt_decompose(samples, name, depth);
    double energy = 0.0;
    for (const auto& d : bands.details) {
      for (double c : d) energy += c * c;
    }
    double score = 0.0;
    // Detail energy at rounding-noise level carries no structure.
    if (energy > 1e-20 * signal_energy && energy > 0.0) {
      double entropy = 0.0;
      for (const auto& d : bands.details) {
        for (double c : d) {
          const double p = c * c / energy;
          if (p > 0.0) entropy -= p * std::log(p);
        }
      }
      score = energy / std::max(entropy, 1e-12);
      any = true;
    }
    choice.per_candidate_scores[name] = score;
    if (choice.wavelet_name.empty() || score > choice.ratio) {
      choice.wavelet_name = name;
      choice.ratio = score;
    }
  }
  if (!any) throw DegenerateInputError("all detail coefficients are zero; energy-to-entropy ratio undefined");
  return choice;
}

WaveletChoice select_mother_wavelet(const SignalRecord& signal, std::span<const std::string> bank, int depth) {
  try {
    return select_mother_wavelet(std::span<const double>(signal.samples), bank, depth);
  } catch (const DegenerateInputError& e) {
    throw DegenerateInputError("record '" + signal.id + "': " + e.what());
  }
}

}  // namespace wide
