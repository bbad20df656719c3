#pragma once

// Welch power spectral density: averaged modified periodograms over
// mean-removed, Hann-tapered, overlapping segments. Density normalization
// is such that integrating the one-sided spectrum over frequency
// approximates the time-domain variance.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace eegemo {

struct WelchSpec {
  std::size_t segment_len = 512;  // 2 s at 256 Hz
  double overlap = 0.5;           // fraction of segment_len
  double stats_low_hz = 0.5;      // PSD statistics range
  double stats_high_hz = 50.0;
};

inline void validate(const WelchSpec& spec) {
  if (spec.segment_len < 4)
    throw std::invalid_argument("welch: segment_len must be >= 4");
  if (!(spec.overlap >= 0.0) || !(spec.overlap < 1.0))
    throw std::invalid_argument("welch: overlap must lie in [0, 1)");
  if (!(spec.stats_low_hz < spec.stats_high_hz))
    throw std::invalid_argument("welch: stats range is empty");
}

struct Spectrum {
  std::vector<double> freqs;  // ascending Hz grid
  std::vector<double> power;  // density, uV^2/Hz

  double resolution_hz() const {
    return freqs.size() > 1 ? freqs[1] - freqs[0] : 0.0;
  }
};

namespace detail {

// In-place iterative radix-2 FFT; falls back to the direct transform for
// lengths that are not powers of two.
inline void fft(std::vector<std::complex<double>>& a) {
  const std::size_t n = a.size();
  if (n < 2) return;
  if ((n & (n - 1)) != 0) {
    std::vector<std::complex<double>> out(n);
    for (std::size_t k = 0; k < n; ++k) {
      std::complex<double> acc = 0.0;
      for (std::size_t t = 0; t < n; ++t) {
        const double ang = -2.0 * std::numbers::pi * static_cast<double>(k * t % n) / n;
        acc += a[t] * std::complex<double>(std::cos(ang), std::sin(ang));
      }
      out[k] = acc;
    }
    a = std::move(out);
    return;
  }
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = -2.0 * std::numbers::pi / static_cast<double>(len);
    const std::complex<double> wlen(std::cos(ang), std::sin(ang));
    for (std::size_t i = 0; i < n; i += len) {
      std::complex<double> w = 1.0;
      for (std::size_t j = 0; j < len / 2; ++j) {
        const std::complex<double> u = a[i + j];
        const std::complex<double> v = a[i + j + len / 2] * w;
        a[i + j] = u + v;
        a[i + j + len / 2] = u - v;
        w *= wlen;
      }
    }
  }
}

inline std::vector<double> hann_window(std::size_t n) {
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i)
    w[i] = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * static_cast<double>(i) /
                                 static_cast<double>(n - 1)));
  return w;
}

}  // namespace detail

inline Spectrum welch_psd(const std::vector<double>& signal, double fs,
                          const WelchSpec& spec = {}) {
  validate(spec);
  if (!(fs > 0.0)) throw std::invalid_argument("welch: fs must be positive");
  const std::size_t len = spec.segment_len;
  if (signal.size() < len)
    throw std::length_error("welch: signal length " + std::to_string(signal.size()) +
                            " shorter than segment_len " + std::to_string(len));

  const std::size_t hop =
      std::max<std::size_t>(1, static_cast<std::size_t>(
                                   std::llround(len * (1.0 - spec.overlap))));
  const std::vector<double> window = detail::hann_window(len);
  double win_sumsq = 0.0;
  for (double w : window) win_sumsq += w * w;
  const double norm = 1.0 / (fs * win_sumsq);

  const std::size_t n_bins = len / 2 + 1;
  std::vector<double> acc(n_bins, 0.0);
  std::size_t n_segments = 0;
  std::vector<std::complex<double>> buf(len);

  for (std::size_t start = 0; start + len <= signal.size(); start += hop) {
    double mean = 0.0;
    for (std::size_t i = 0; i < len; ++i) mean += signal[start + i];
    mean /= static_cast<double>(len);
    for (std::size_t i = 0; i < len; ++i)
      buf[i] = {(signal[start + i] - mean) * window[i], 0.0};
    detail::fft(buf);
    for (std::size_t k = 0; k < n_bins; ++k) {
      const double mag2 = std::norm(buf[k]);
      const bool interior = k != 0 && !(len % 2 == 0 && k == n_bins - 1);
      acc[k] += (interior ? 2.0 : 1.0) * mag2 * norm;
    }
    ++n_segments;
  }

  Spectrum out;
  out.freqs.resize(n_bins);
  out.power.resize(n_bins);
  for (std::size_t k = 0; k < n_bins; ++k) {
    out.freqs[k] = static_cast<double>(k) * fs / static_cast<double>(len);
    out.power[k] = acc[k] / static_cast<double>(n_segments);
  }
  return out;
}

// Trapezoidal integral of the density over grid points inside [low, high].
inline double integrate_spectrum(const Spectrum& spec, double low_hz, double high_hz) {
  if (spec.freqs.empty() || low_hz > spec.freqs.back() || high_hz < spec.freqs.front())
    throw std::out_of_range("integrate_spectrum: range outside spectrum support");
  std::size_t first = 0;
  while (first < spec.freqs.size() && spec.freqs[first] < low_hz) ++first;
  std::size_t last = spec.freqs.size();
  while (last > 0 && spec.freqs[last - 1] > high_hz) --last;
  if (last < first + 2)
    throw std::out_of_range("integrate_spectrum: fewer than two grid points in range");
  double integral = 0.0;
  for (std::size_t k = first + 1; k < last; ++k)
    integral += 0.5 * (spec.power[k] + spec.power[k - 1]) *
                (spec.freqs[k] - spec.freqs[k - 1]);
  return integral;
}

}  // namespace eegemo
