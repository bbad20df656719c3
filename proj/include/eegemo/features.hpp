#pragma once

// The five frequency-domain feature groups and their assembly into the
// 34-entry vector: PSD mean/variance per channel (8), hemispheric Pearson
// correlations (2), DASM (2), RASM (2), and per-channel band powers (20).
// All groups are computed on the smoothed broadband signal; band powers
// integrate the Welch spectrum over the canonical band edges.

#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "eegemo/types.hpp"
#include "eegemo/welch.hpp"

namespace eegemo {

// Arithmetic mean and population variance of the density values at bins
// inside [low, high].
inline std::pair<double, double> psd_stats(const Spectrum& spec, double low_hz,
                                           double high_hz) {
  std::size_t count = 0;
  double mean = 0.0;
  for (std::size_t k = 0; k < spec.freqs.size(); ++k) {
    if (spec.freqs[k] < low_hz || spec.freqs[k] > high_hz) continue;
    mean += spec.power[k];
    ++count;
  }
  if (count == 0)
    throw std::out_of_range("psd_stats: no spectrum bins inside range");
  mean /= static_cast<double>(count);
  double var = 0.0;
  for (std::size_t k = 0; k < spec.freqs.size(); ++k) {
    if (spec.freqs[k] < low_hz || spec.freqs[k] > high_hz) continue;
    const double d = spec.power[k] - mean;
    var += d * d;
  }
  var /= static_cast<double>(count);
  return {mean, var};
}

struct UndefinedCorrelationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline double pearson_correlation(const std::vector<double>& x,
                                  const std::vector<double>& y) {
  if (x.size() != y.size())
    throw std::invalid_argument("pearson_correlation: length mismatch");
  if (x.size() < 2)
    throw std::invalid_argument("pearson_correlation: need at least 2 samples");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (sxx == 0.0 || syy == 0.0)
    throw UndefinedCorrelationError("pearson_correlation: constant input series");
  double r = sxy / std::sqrt(sxx * syy);
  if (r > 1.0) r = 1.0;
  if (r < -1.0) r = -1.0;
  return r;
}

// Mean squared amplitude of the broadband channel, uV^2.
inline double absolute_power(const std::vector<double>& signal) {
  if (signal.empty())
    throw std::invalid_argument("absolute_power: empty signal");
  double acc = 0.0;
  for (double v : signal) acc += v * v;
  return acc / static_cast<double>(signal.size());
}

// Differential asymmetry: left minus right absolute power.
inline double dasm(double left_power, double right_power) {
  return left_power - right_power;
}

// Rational asymmetry: left over right absolute power.
inline double rasm(double left_power, double right_power) {
  if (!(right_power > 0.0))
    throw std::domain_error("rasm: right-hemisphere power must be positive");
  return left_power / right_power;
}

inline double band_power(const Spectrum& spec, const Band& band) {
  return integrate_spectrum(spec, band.low_hz, band.high_hz);
}

// Assemble the 34 features for one preprocessed trial. Throws if any
// sub-feature is undefined (constant channel, zero right-hemisphere power);
// callers flag the trial.
inline FeatureVector extract_features(const Trial& trial,
                                      const WelchSpec& welch_spec = {}) {
  const Recording& rec = trial.recording;
  const double fs = rec.sample_rate_hz;
  FeatureVector fv;

  std::array<std::vector<double>, kNumChannels> channels;
  for (int c = 0; c < kNumChannels; ++c) channels[c] = rec.channel(kChannels[c]);

  for (int c = 0; c < kNumChannels; ++c) {
    const Spectrum spec = welch_psd(channels[c], fs, welch_spec);
    const auto [mean, var] =
        psd_stats(spec, welch_spec.stats_low_hz, welch_spec.stats_high_hz);
    fv.values[FeatureVector::psd_mean_index(c)] = mean;
    fv.values[FeatureVector::psd_var_index(c)] = var;
    for (int b = 0; b < kNumBands; ++b)
      fv.values[FeatureVector::band_power_index(c, b)] =
          band_power(spec, canonical_bands()[b]);
  }

  for (int p = 0; p < 2; ++p) {
    const auto& pair = kHemisphericPairs[p];
    const auto& left = channels[static_cast<int>(pair.left)];
    const auto& right = channels[static_cast<int>(pair.right)];
    fv.values[FeatureVector::correlation_index(p)] = pearson_correlation(left, right);
    const double lp = absolute_power(left);
    const double rp = absolute_power(right);
    fv.values[FeatureVector::dasm_index(p)] = dasm(lp, rp);
    fv.values[FeatureVector::rasm_index(p)] = rasm(lp, rp);
  }
  return fv;
}

// Per-dimension standardization statistics fitted on training data only.
// Zero-variance dimensions pass through unscaled and are recorded.
struct Standardizer {
  std::array<double, kNumFeatures> mean{};
  std::array<double, kNumFeatures> std_dev{};
  std::array<uint8_t, kNumFeatures> passthrough{};

  static Standardizer identity() {
    Standardizer s;
    s.mean.fill(0.0);
    s.std_dev.fill(1.0);
    s.passthrough.fill(0);
    return s;
  }
};

inline Standardizer fit_standardizer(const std::vector<FeatureVector>& train) {
  if (train.size() < 2)
    throw std::invalid_argument("fit_standardizer: need at least 2 training vectors");
  Standardizer s;
  const double n = static_cast<double>(train.size());
  for (int d = 0; d < kNumFeatures; ++d) {
    double mean = 0.0;
    for (const auto& fv : train) mean += fv.values[d];
    mean /= n;
    double var = 0.0;
    for (const auto& fv : train) {
      const double diff = fv.values[d] - mean;
      var += diff * diff;
    }
    var /= n;
    s.mean[d] = mean;
    const double sd = std::sqrt(var);
    if (sd > 0.0) {
      s.std_dev[d] = sd;
      s.passthrough[d] = 0;
    } else {
      s.std_dev[d] = 1.0;
      s.passthrough[d] = 1;
    }
  }
  return s;
}

inline FeatureVector standardize(const FeatureVector& v, const Standardizer& s) {
  FeatureVector out;
  for (int d = 0; d < kNumFeatures; ++d)
    out.values[d] = (v.values[d] - s.mean[d]) / s.std_dev[d];
  return out;
}

}  // namespace eegemo
