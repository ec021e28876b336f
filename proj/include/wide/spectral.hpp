#pragma once

#include <span>
#include <vector>

namespace wide {

/// Magnitude spectrogram: frames x (window_len / 2 + 1) one-sided bins.
struct Spectrogram {
  std::size_t window_len = 0;
  std::size_t hop = 0;
  std::size_t frames = 0;
  std::size_t bins = 0;
  std::vector<double> magnitude;  // row-major, frames x bins

  double at(std::size_t frame, std::size_t bin) const { return magnitude[frame * bins + bin]; }
  std::span<const double> frame(std::size_t f) const { return {magnitude.data() + f * bins, bins}; }
};

/// Periodic Hann window of length n.
std::vector<double> hann_window(std::size_t n);

/// Hann-windowed short-time Fourier magnitudes. window_len must be a power of
/// two no longer than the signal and 0 < hop <= window_len.
Spectrogram stft(std::span<const double> samples, std::size_t window_len, std::size_t hop);

/// Mean magnitude per bin over all frames.
std::vector<double> mean_spectrum(const Spectrogram& spec);

inline double bin_frequency(std::size_t bin, std::size_t window_len, double sample_rate_hz) {
  return static_cast<double>(bin) * sample_rate_hz / static_cast<double>(window_len);
}

}  // namespace wide
