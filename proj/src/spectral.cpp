#include "wide/spectral.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <string>

#include <unsupported/Eigen/FFT>

#include "wide/error.hpp"

namespace wide {

std::vector<double> hann_window(std::size_t n) {
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) {
    w[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n));
  }
  return w;
}

Spectrogram stft(std::span<const double> samples, std::size_t window_len, std::size_t hop) {
  if (window_len == 0 || (window_len & (window_len - 1)) != 0) {
    throw ArgumentError("STFT window length " + std::to_string(window_len) + " is not a power of two");
  }
  if (window_len > samples.size()) {
    throw ArgumentError("STFT window length " + std::to_string(window_len) + " exceeds signal length " +
                        std::to_string(samples.size()));
  }
  if (hop == 0 || hop > window_len) throw ArgumentError("STFT hop must be in (0, window_len]");

  Spectrogram spec;
  spec.window_len = window_len;
  spec.hop = hop;
  spec.frames = 1 + (samples.size() - window_len) / hop;
  spec.bins = window_len / 2 + 1;
  spec.magnitude.resize(spec.frames * spec.bins);

  const auto window = hann_window(window_len);
  Eigen::FFT<double> fft;
  std::vector<double> frame(window_len);
  std::vector<std::complex<double>> out;
  for (std::size_t f = 0; f < spec.frames; ++f) {
    const std::size_t start = f * hop;
    for (std::size_t i = 0; i < window_len; ++i) frame[i] = samples[start + i] * window[i];
    fft.fwd(out, frame);
    for (std::size_t b = 0; b < spec.bins; ++b) spec.magnitude[f * spec.bins + b] = std::abs(out[b]);
  }
  return spec;
}

std::vector<double> mean_spectrum(const Spectrogram& spec) {
  std::vector<double> mean(spec.bins, 0.0);
  for (std::size_t f = 0; f < spec.frames; ++f) {
    for (std::size_t b = 0; b < spec.bins; ++b) mean[b] += spec.at(f, b);
  }
  for (double& m : mean) m /= static_cast<double>(spec.frames);
  return mean;
}

}  // namespace wide
