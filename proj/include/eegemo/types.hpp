#pragma once

// Core domain types for the 4-channel EEG emotion pipeline: channels,
// emotion labels, frequency bands, recordings, trials and the 34-entry
// feature vector layout shared by every stage.

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace eegemo {

inline constexpr int kNumChannels = 4;
inline constexpr int kNumClasses = 4;
inline constexpr int kNumBands = 5;
inline constexpr int kNumFeatures = 34;

// Stream order is fixed: TP9, AF7, AF8, TP10. Every sample matrix, file
// column and feature index uses this order.
enum class Channel : int { TP9 = 0, AF7 = 1, AF8 = 2, TP10 = 3 };

inline constexpr std::array<Channel, kNumChannels> kChannels = {
    Channel::TP9, Channel::AF7, Channel::AF8, Channel::TP10};

inline constexpr const char* channel_name(Channel c) {
  switch (c) {
    case Channel::TP9:  return "TP9";
    case Channel::AF7:  return "AF7";
    case Channel::AF8:  return "AF8";
    case Channel::TP10: return "TP10";
  }
  return "?";
}

inline std::optional<Channel> parse_channel(std::string_view s) {
  for (Channel c : kChannels)
    if (s == channel_name(c)) return c;
  return std::nullopt;
}

// Hemispheric electrode pairs, left member first (odd 10-20 indices are
// left-hemisphere). Asymmetry features are left-minus-right / left-over-right.
struct ChannelPair {
  Channel left;
  Channel right;
};

inline constexpr std::array<ChannelPair, 2> kHemisphericPairs = {{
    {Channel::TP9, Channel::TP10},
    {Channel::AF7, Channel::AF8},
}};

// Valence-arousal quadrants Q1..Q4.
enum class Emotion : int { Happy = 0, Angry = 1, Sad = 2, Relaxed = 3 };

inline constexpr std::array<Emotion, kNumClasses> kEmotions = {
    Emotion::Happy, Emotion::Angry, Emotion::Sad, Emotion::Relaxed};

inline constexpr int quadrant(Emotion e) { return static_cast<int>(e) + 1; }

inline Emotion emotion_from_quadrant(int q) {
  if (q < 1 || q > kNumClasses)
    throw std::invalid_argument("quadrant must be 1..4, got " + std::to_string(q));
  return static_cast<Emotion>(q - 1);
}

inline constexpr const char* emotion_name(Emotion e) {
  switch (e) {
    case Emotion::Happy:   return "happy";
    case Emotion::Angry:   return "angry";
    case Emotion::Sad:     return "sad";
    case Emotion::Relaxed: return "relaxed";
  }
  return "?";
}

inline std::optional<Emotion> parse_emotion(std::string_view s) {
  for (Emotion e : kEmotions)
    if (s == emotion_name(e)) return e;
  return std::nullopt;
}

struct Band {
  std::string name;
  double low_hz;
  double high_hz;
};

// The five canonical bands. The 7-8 Hz gap between theta and alpha is kept
// as-is; filters use these exact edges.
inline const std::array<Band, kNumBands>& canonical_bands() {
  static const std::array<Band, kNumBands> bands = {{
      {"delta", 0.0, 4.0},
      {"theta", 4.0, 7.0},
      {"alpha", 8.0, 12.0},
      {"beta", 12.0, 30.0},
      {"gamma", 30.0, 50.0},
  }};
  return bands;
}

// Timestamp-indexed multichannel sample matrix in microvolts, row-major,
// with a per-cell missing mask. n_channels is 4 for every well-formed
// recording; the field exists so validation can describe malformed data.
struct Recording {
  std::string subject_id;
  double sample_rate_hz = 256.0;
  std::size_t n_channels = kNumChannels;
  std::vector<double> data;      // n_samples * n_channels, row-major
  std::vector<uint8_t> missing;  // same shape, 1 = missing

  std::size_t n_samples() const {
    return n_channels == 0 ? 0 : data.size() / n_channels;
  }

  double& at(std::size_t sample, std::size_t ch) {
    return data[sample * n_channels + ch];
  }
  double at(std::size_t sample, std::size_t ch) const {
    return data[sample * n_channels + ch];
  }

  bool is_missing(std::size_t sample, std::size_t ch) const {
    return missing[sample * n_channels + ch] != 0;
  }

  bool has_missing() const {
    for (uint8_t m : missing)
      if (m) return true;
    return false;
  }

  // Copy of one channel column.
  std::vector<double> channel(Channel c) const {
    const auto ch = static_cast<std::size_t>(c);
    std::vector<double> out(n_samples());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = at(i, ch);
    return out;
  }

  void set_channel(Channel c, const std::vector<double>& values) {
    const auto ch = static_cast<std::size_t>(c);
    if (values.size() != n_samples())
      throw std::invalid_argument("set_channel: length mismatch");
    for (std::size_t i = 0; i < values.size(); ++i) at(i, ch) = values[i];
  }

  static Recording zeros(std::size_t n_samples, double fs = 256.0) {
    Recording rec;
    rec.sample_rate_hz = fs;
    rec.data.assign(n_samples * kNumChannels, 0.0);
    rec.missing.assign(n_samples * kNumChannels, 0);
    return rec;
  }
};

// One recording segment aligned to one stimulus video. Raw trials straight
// from ingest may still carry missing samples; preprocessed trials must not
// (validate with require_complete = true).
struct Trial {
  Recording recording;
  Emotion label = Emotion::Happy;
  std::string video_id;
  double duration_s = 0.0;
};

struct Violation {
  std::string rule;
  std::size_t index = 0;  // first offending flat index (sample*n_channels+ch)
  std::string detail;
};

// Validation never throws; it reports the first offending index per rule.
inline std::vector<Violation> validate_recording(const Recording& rec,
                                                 bool require_complete = false) {
  std::vector<Violation> out;
  if (!(rec.sample_rate_hz > 0.0))
    out.push_back({"sample rate", 0, "sample_rate_hz must be positive"});
  if (rec.n_channels != kNumChannels)
    out.push_back({"channel arity", 0,
                   "expected 4 channel slots per row, got " +
                       std::to_string(rec.n_channels)});
  if (rec.data.empty())
    out.push_back({"empty recording", 0, "n_samples must be >= 1"});
  if (rec.n_channels != 0 && rec.data.size() % rec.n_channels != 0)
    out.push_back({"ragged matrix", rec.data.size(),
                   "sample count is not a multiple of channel count"});
  if (rec.missing.size() != rec.data.size())
    out.push_back({"mask shape", 0, "missing mask does not match data shape"});
  if (rec.missing.size() == rec.data.size()) {
    for (std::size_t i = 0; i < rec.data.size(); ++i) {
      if (!rec.missing[i] && !std::isfinite(rec.data[i])) {
        out.push_back({"nonfinite sample", i, "non-missing cell is not finite"});
        break;
      }
    }
    if (require_complete) {
      for (std::size_t i = 0; i < rec.missing.size(); ++i) {
        if (rec.missing[i]) {
          out.push_back({"unimputed sample", i,
                         "missing cell in a recording declared preprocessed"});
          break;
        }
      }
    }
  }
  return out;
}

// Fixed 34-entry feature layout:
//   [0..7]   PSD mean, variance per channel (TP9, AF7, AF8, TP10)
//   [8..9]   Pearson correlation for (TP9,TP10), (AF7,AF8)
//   [10..11] DASM for the two pairs
//   [12..13] RASM for the two pairs
//   [14..33] band power, channel-major, band order delta..gamma
struct FeatureVector {
  std::array<double, kNumFeatures> values{};

  static constexpr std::size_t psd_mean_index(int ch) { return 2 * ch; }
  static constexpr std::size_t psd_var_index(int ch) { return 2 * ch + 1; }
  static constexpr std::size_t correlation_index(int pair) { return 8 + pair; }
  static constexpr std::size_t dasm_index(int pair) { return 10 + pair; }
  static constexpr std::size_t rasm_index(int pair) { return 12 + pair; }
  static constexpr std::size_t band_power_index(int ch, int band) {
    return 14 + ch * kNumBands + band;
  }

  static const std::array<std::string, kNumFeatures>& names() {
    static const std::array<std::string, kNumFeatures> n = [] {
      std::array<std::string, kNumFeatures> a;
      for (int c = 0; c < kNumChannels; ++c) {
        const char* ch = channel_name(kChannels[c]);
        a[psd_mean_index(c)] = std::string("psd_mean_") + ch;
        a[psd_var_index(c)] = std::string("psd_var_") + ch;
      }
      for (int p = 0; p < 2; ++p) {
        std::string pair = std::string(channel_name(kHemisphericPairs[p].left)) +
                           "_" + channel_name(kHemisphericPairs[p].right);
        a[correlation_index(p)] = "corr_" + pair;
        a[dasm_index(p)] = "dasm_" + pair;
        a[rasm_index(p)] = "rasm_" + pair;
      }
      for (int c = 0; c < kNumChannels; ++c)
        for (int b = 0; b < kNumBands; ++b)
          a[band_power_index(c, b)] = std::string("power_") +
                                      channel_name(kChannels[c]) + "_" +
                                      canonical_bands()[b].name;
      return a;
    }();
    return n;
  }
};

enum class Provenance { Real, Synthetic };

inline constexpr const char* provenance_name(Provenance p) {
  return p == Provenance::Real ? "real" : "synthetic";
}

// Labeled trials, before or after preprocessing.
struct TrialSet {
  std::vector<Trial> trials;
  std::vector<std::string> subject_ids;  // parallel to trials
  Provenance provenance = Provenance::Real;
  uint64_t seed = 0;

  std::size_t size() const { return trials.size(); }
};

// Labeled feature rows; the form the classifier and evaluator consume.
struct FeatureSet {
  std::vector<FeatureVector> features;
  std::vector<Emotion> labels;
  std::vector<std::string> subject_ids;
  Provenance provenance = Provenance::Real;
  uint64_t seed = 0;

  std::size_t size() const { return features.size(); }

  FeatureSet subset(const std::vector<std::size_t>& indices) const {
    FeatureSet out;
    out.provenance = provenance;
    out.seed = seed;
    out.features.reserve(indices.size());
    out.labels.reserve(indices.size());
    out.subject_ids.reserve(indices.size());
    for (std::size_t i : indices) {
      out.features.push_back(features.at(i));
      out.labels.push_back(labels.at(i));
      out.subject_ids.push_back(subject_ids.at(i));
    }
    return out;
  }
};

}  // namespace eegemo
