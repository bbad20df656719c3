#pragma once

// Butterworth band filters applied forward-backward (zero phase). Filters
// are designed from the analog prototype via the bilinear transform and run
// as a cascade of biquad sections; band-pass sections carry one zero at
// z=+1 and one at z=-1 each. The delta band is a low-pass at its upper edge.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "eegemo/types.hpp"

namespace eegemo {

// One second-order section, direct form II transposed. Denominator is
// monic: y = b0 x + s0; s0' = b1 x - a1 y + s1; s1' = b2 x - a2 y.
struct Biquad {
  double b0 = 1.0, b1 = 0.0, b2 = 0.0;
  double a1 = 0.0, a2 = 0.0;

  std::complex<double> response(std::complex<double> z_inv) const {
    return (b0 + (b1 + b2 * z_inv) * z_inv) /
           (1.0 + (a1 + a2 * z_inv) * z_inv);
  }

  double gain_at_dc() const { return (b0 + b1 + b2) / (1.0 + a1 + a2); }
};

struct SosFilter {
  std::vector<Biquad> sections;

  int order() const { return static_cast<int>(2 * sections.size()); }

  double magnitude(double freq_hz, double fs) const {
    const double w = 2.0 * std::numbers::pi * freq_hz / fs;
    const std::complex<double> z_inv = std::exp(std::complex<double>(0.0, -w));
    std::complex<double> h = 1.0;
    for (const auto& s : sections) h *= s.response(z_inv);
    return std::abs(h);
  }
};

namespace detail {

// Analog Butterworth prototype poles for unit cutoff, order n.
inline std::vector<std::complex<double>> butterworth_poles(int n) {
  std::vector<std::complex<double>> poles(n);
  for (int k = 0; k < n; ++k) {
    const double theta = std::numbers::pi * (2.0 * k + n + 1.0) / (2.0 * n);
    poles[k] = {std::cos(theta), std::sin(theta)};
  }
  return poles;
}

inline std::complex<double> bilinear_pole(std::complex<double> s, double fs2) {
  return (fs2 + s) / (fs2 - s);
}

}  // namespace detail

// Low-pass Butterworth of even order, unity gain at DC.
inline SosFilter butterworth_lowpass(int order, double cutoff_hz, double fs) {
  if (order < 2 || order % 2 != 0)
    throw std::invalid_argument("butterworth_lowpass: order must be even and >= 2");
  if (!(cutoff_hz > 0.0) || cutoff_hz >= fs / 2.0)
    throw std::invalid_argument("butterworth_lowpass: cutoff must lie in (0, fs/2)");

  const double fs2 = 2.0 * fs;
  const double warped = fs2 * std::tan(std::numbers::pi * cutoff_hz / fs);
  const auto prototype = detail::butterworth_poles(order);

  SosFilter filt;
  // Conjugate pole pairs: poles k and order-1-k.
  for (int k = 0; k < order / 2; ++k) {
    const std::complex<double> p = detail::bilinear_pole(warped * prototype[k], fs2);
    Biquad s;
    s.b0 = 1.0;
    s.b1 = 2.0;
    s.b2 = 1.0;
    s.a1 = -2.0 * p.real();
    s.a2 = std::norm(p);
    // Unity at DC per section.
    const double g = s.gain_at_dc();
    s.b0 /= g;
    s.b1 /= g;
    s.b2 /= g;
    filt.sections.push_back(s);
  }
  return filt;
}

// Band-pass Butterworth built from an order-n low-pass prototype (2n poles).
inline SosFilter butterworth_bandpass(int order, double low_hz, double high_hz,
                                      double fs) {
  if (order < 2 || order % 2 != 0)
    throw std::invalid_argument("butterworth_bandpass: order must be even and >= 2");
  if (!(low_hz > 0.0) || !(low_hz < high_hz) || high_hz >= fs / 2.0)
    throw std::invalid_argument("butterworth_bandpass: edges must satisfy 0 < low < high < fs/2");

  const double fs2 = 2.0 * fs;
  const double w1 = fs2 * std::tan(std::numbers::pi * low_hz / fs);
  const double w2 = fs2 * std::tan(std::numbers::pi * high_hz / fs);
  const double bw = w2 - w1;
  const double w0 = std::sqrt(w1 * w2);

  // Each prototype pole p maps to the pair  p*bw/2 +- sqrt((p*bw/2)^2 - w0^2).
  std::vector<std::complex<double>> analog;
  for (const auto& p : detail::butterworth_poles(order)) {
    const std::complex<double> half = p * (bw / 2.0);
    const std::complex<double> root = std::sqrt(half * half - w0 * w0);
    analog.push_back(half + root);
    analog.push_back(half - root);
  }

  std::vector<std::complex<double>> digital;
  digital.reserve(analog.size());
  for (const auto& s : analog) digital.push_back(detail::bilinear_pole(s, fs2));

  // Group into conjugate pairs by matching each pole with its conjugate.
  std::vector<bool> used(digital.size(), false);
  SosFilter filt;
  for (std::size_t i = 0; i < digital.size(); ++i) {
    if (used[i]) continue;
    used[i] = true;
    std::size_t mate = i;
    double best = 1e300;
    for (std::size_t j = i + 1; j < digital.size(); ++j) {
      if (used[j]) continue;
      const double d = std::abs(digital[j] - std::conj(digital[i]));
      if (d < best) {
        best = d;
        mate = j;
      }
    }
    if (mate == i)
      throw std::runtime_error("butterworth_bandpass: unpaired pole");
    used[mate] = true;
    Biquad s;
    s.b0 = 1.0;
    s.b1 = 0.0;
    s.b2 = -1.0;  // zeros at z = +1 and z = -1
    s.a1 = -(digital[i] + digital[mate]).real();
    s.a2 = (digital[i] * digital[mate]).real();
    filt.sections.push_back(s);
  }

  // Normalize to unit gain at the digital frequency that maps to the analog
  // center w0 (the exact unity point of the analog response).
  const double f_center = fs / std::numbers::pi * std::atan(w0 / fs2);
  const double g = filt.magnitude(f_center, fs);
  if (!(g > 0.0))
    throw std::runtime_error("butterworth_bandpass: degenerate center gain");
  filt.sections.front().b0 /= g;
  filt.sections.front().b1 /= g;
  filt.sections.front().b2 /= g;
  return filt;
}

namespace detail {

// One cascaded pass over the signal with steady-state initial conditions
// scaled to the first sample (limits start-up transients).
inline void sos_filter_inplace(const SosFilter& filt, std::vector<double>& x) {
  double scale = x.empty() ? 0.0 : x.front();
  for (const auto& s : filt.sections) {
    // State for which a constant input x0 yields the constant output
    // x0 * H(1) immediately.
    const double y_inf = s.gain_at_dc();
    double s0 = (y_inf - s.b0) * scale;
    double s1 = (s.b2 - s.a2 * y_inf) * scale;
    for (double& v : x) {
      const double in = v;
      const double out = s.b0 * in + s0;
      s0 = s.b1 * in - s.a1 * out + s1;
      s1 = s.b2 * in - s.a2 * out;
      v = out;
    }
    scale *= y_inf;
  }
}

}  // namespace detail

// Zero-phase filtering: odd-reflection padding, forward pass, backward pass.
inline std::vector<double> filtfilt(const SosFilter& filt,
                                    const std::vector<double>& signal) {
  const std::size_t n = signal.size();
  const std::size_t edge = 3 * (2 * filt.sections.size() + 1);
  if (n <= edge)
    throw std::length_error("filtfilt: signal length " + std::to_string(n) +
                            " must exceed padding " + std::to_string(edge));

  std::vector<double> ext;
  ext.reserve(n + 2 * edge);
  for (std::size_t i = edge; i >= 1; --i)
    ext.push_back(2.0 * signal.front() - signal[i]);
  ext.insert(ext.end(), signal.begin(), signal.end());
  for (std::size_t i = 2; i <= edge + 1; ++i)
    ext.push_back(2.0 * signal.back() - signal[n - i]);

  detail::sos_filter_inplace(filt, ext);
  std::reverse(ext.begin(), ext.end());
  detail::sos_filter_inplace(filt, ext);
  std::reverse(ext.begin(), ext.end());

  return {ext.begin() + static_cast<std::ptrdiff_t>(edge),
          ext.begin() + static_cast<std::ptrdiff_t>(edge + n)};
}

inline constexpr int kBandFilterOrder = 4;

// Design the filter for one canonical band; delta degenerates to a low-pass.
inline SosFilter design_band_filter(const Band& band, double fs) {
  if (band.high_hz >= fs / 2.0)
    throw std::invalid_argument("band " + band.name + " exceeds the Nyquist rate");
  if (band.low_hz <= 0.0)
    return butterworth_lowpass(kBandFilterOrder, band.high_hz, fs);
  return butterworth_bandpass(kBandFilterOrder, band.low_hz, band.high_hz, fs);
}

// Zero-phase band-limited signal, same length as the input.
inline std::vector<double> bandpass(const std::vector<double>& signal,
                                    const Band& band, double fs) {
  return filtfilt(design_band_filter(band, fs), signal);
}

}  // namespace eegemo
