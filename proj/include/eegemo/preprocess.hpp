#pragma once

// Missing-sample imputation, whole-recording smoothing, and five-band
// decomposition. Pipeline order is impute -> truncate -> smooth -> bands.

#include <algorithm>
#include <array>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "eegemo/bandpass.hpp"
#include "eegemo/savgol.hpp"
#include "eegemo/types.hpp"

namespace eegemo {

inline constexpr int kDefaultImputeRadius = 4;

// Replace each missing cell with the mean of up to window_radius nearest
// valid samples on each side (fewer near the edges). Only originally valid
// samples feed the averages, so the result does not depend on gap order and
// imputing twice is a no-op.
inline std::vector<double> impute_missing(const std::vector<double>& signal,
                                          const std::vector<uint8_t>& mask,
                                          int window_radius = kDefaultImputeRadius) {
  if (signal.size() != mask.size())
    throw std::invalid_argument("impute_missing: signal/mask length mismatch");
  if (window_radius < 1)
    throw std::invalid_argument("impute_missing: window_radius must be >= 1");
  const std::size_t n = signal.size();
  bool any_valid = false;
  for (std::size_t i = 0; i < n; ++i)
    if (!mask[i]) {
      any_valid = true;
      break;
    }
  if (!any_valid)
    throw std::runtime_error("impute_missing: channel has no valid samples");

  std::vector<double> out = signal;
  for (std::size_t i = 0; i < n; ++i) {
    if (!mask[i]) continue;
    double sum = 0.0;
    int count = 0;
    int taken = 0;
    for (std::size_t j = i; j-- > 0 && taken < window_radius;) {
      if (!mask[j]) {
        sum += signal[j];
        ++count;
        ++taken;
      }
    }
    taken = 0;
    for (std::size_t j = i + 1; j < n && taken < window_radius; ++j) {
      if (!mask[j]) {
        sum += signal[j];
        ++count;
        ++taken;
      }
    }
    out[i] = sum / count;  // count >= 1: some valid sample exists
  }
  return out;
}

// Impute every channel of a recording; the returned mask is all-false.
inline Recording impute_recording(const Recording& rec,
                                  int window_radius = kDefaultImputeRadius) {
  Recording out = rec;
  for (Channel c : kChannels) {
    const auto ch = static_cast<std::size_t>(c);
    std::vector<double> signal(rec.n_samples());
    std::vector<uint8_t> mask(rec.n_samples());
    for (std::size_t i = 0; i < signal.size(); ++i) {
      signal[i] = rec.at(i, ch);
      mask[i] = rec.missing[i * rec.n_channels + ch];
    }
    try {
      out.set_channel(c, impute_missing(signal, mask, window_radius));
    } catch (const std::runtime_error&) {
      throw std::runtime_error(std::string("impute_recording: channel ") +
                               channel_name(c) + " has no valid samples");
    }
  }
  std::fill(out.missing.begin(), out.missing.end(), 0);
  return out;
}

inline Recording smooth_recording(const Recording& rec, const SavGolSpec& spec) {
  Recording out = rec;
  for (Channel c : kChannels) out.set_channel(c, savgol_smooth(rec.channel(c), spec));
  return out;
}

// Per-channel, per-band filtered time series; series[ch][band] has the same
// length as the trial.
struct BandSignals {
  std::array<std::array<std::vector<double>, kNumBands>, kNumChannels> series;
};

inline BandSignals decompose_bands(const Trial& trial) {
  const double fs = trial.recording.sample_rate_hz;
  std::array<SosFilter, kNumBands> filters;
  for (int b = 0; b < kNumBands; ++b)
    filters[b] = design_band_filter(canonical_bands()[b], fs);

  BandSignals out;
  for (int c = 0; c < kNumChannels; ++c) {
    const std::vector<double> channel = trial.recording.channel(kChannels[c]);
    for (int b = 0; b < kNumBands; ++b)
      out.series[c][b] = filtfilt(filters[b], channel);
  }
  return out;
}

}  // namespace eegemo
