#pragma once

#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "wide/dataset.hpp"

namespace wide {

/// Orthogonal two-channel filter bank. dec_hi is the quadrature mirror of
/// dec_lo: dec_hi[j] = (-1)^(j+1) dec_lo[L-1-j].
struct Wavelet {
  std::string name;
  std::vector<double> dec_lo;
  std::vector<double> dec_hi;

  std::size_t length() const { return dec_lo.size(); }
};

/// Looks up a registered wavelet; throws ArgumentError for unknown names.
const Wavelet& wavelet(std::string_view name);

/// Adds a wavelet from its decomposition low-pass filter. The filter must be
/// even-length and orthonormal under even shifts.
void register_wavelet(std::string name, std::vector<double> dec_lo);

/// The built-in bank in its fixed order: haar, db2, db4, db8, sym4, coif1.
std::vector<std::string> default_wavelet_bank();

enum class Extension {
  symmetric,      // half-sample symmetric padding, bands of floor((n + L - 1) / 2)
  periodization,  // circular, bands of ceil(n / 2); orthogonal for even lengths
};

struct WaveletBands {
  std::vector<double> approx;                 // approximation at the deepest level
  std::vector<std::vector<double>> details;   // details[0] is level 1 (finest)
  std::vector<std::size_t> level_lengths;     // input length seen by each level
  std::string wavelet_name;
  Extension extension = Extension::symmetric;

  int depth() const { return static_cast<int>(details.size()); }
};

WaveletBands dwt_decompose(std::span<const double> samples, std::string_view wavelet_name, int depth,
                           Extension extension = Extension::symmetric);

std::vector<double> dwt_reconstruct(const WaveletBands& bands);

/// floor(log2(n / filter_length)), never below 1.
int clamp_depth(int requested, std::size_t n, std::size_t filter_length);

struct WaveletChoice {
  std::string wavelet_name;
  double ratio = 0.0;
  std::map<std::string, double> per_candidate_scores;
};

/// Picks the wavelet maximizing detail energy / detail Shannon entropy.
WaveletChoice select_mother_wavelet(std::span<const double> samples, std::span<const std::string> bank, int depth);
WaveletChoice select_mother_wavelet(const SignalRecord& signal, std::span<const std::string> bank, int depth);

}  // namespace wide
