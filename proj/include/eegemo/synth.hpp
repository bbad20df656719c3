#pragma once

// Seeded synthetic EEG. Each trial is a sum of band-center sinusoids whose
// amplitudes follow a per-label profile, scaled per hemisphere to plant
// DASM/RASM signal, on top of 1/f-shaped noise, with optional sample
// dropout. Every trial draws from its own (seed, subject, video) stream, so
// the full tree is a pure function of the config.

#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "eegemo/ingest.hpp"
#include "eegemo/rng.hpp"
#include "eegemo/types.hpp"

namespace eegemo {

// Representative frequency per band, used as the sinusoid carrier.
inline constexpr std::array<double, kNumBands> kBandCenterHz = {2.0, 5.5, 10.0,
                                                                21.0, 40.0};

struct ClassProfile {
  std::array<double, kNumBands> band_amplitude{};
  double asymmetry = 0.0;  // left channels scale by 1+a, right by 1-a
};

// Quadrant stereotypes: happy is alpha-heavy with left dominance, angry
// fast-wave with right dominance, sad slow-wave, relaxed alpha/theta. Chosen
// so every feature group carries class signal, not for physiological truth.
inline std::array<ClassProfile, kNumClasses> default_profiles() {
  return {{
      {{1.0, 0.8, 3.0, 1.2, 0.6}, 0.3},    // happy
      {{1.0, 0.8, 1.0, 2.8, 1.6}, -0.3},   // angry
      {{2.6, 2.0, 1.0, 0.8, 0.4}, -0.15},  // sad
      {{1.2, 2.4, 2.2, 0.6, 0.4}, 0.15},   // relaxed
  }};
}

struct SynthConfig {
  int n_subjects = 40;
  int videos_per_quadrant = 4;
  double duration_s = 30.0;
  double fs = 256.0;
  double lead_in_s = 1.0;  // pre/post-roll around the stimulus window
  double noise_std = 0.6;
  double missing_rate = 0.001;
  double subject_gain_spread = 0.1;
  uint64_t seed = 0;
  std::array<ClassProfile, kNumClasses> profiles = default_profiles();
};

inline void validate(const SynthConfig& cfg) {
  if (cfg.n_subjects < 1)
    throw std::invalid_argument("synth: n_subjects must be >= 1");
  if (cfg.videos_per_quadrant < 1)
    throw std::invalid_argument("synth: videos_per_quadrant must be >= 1");
  if (!(cfg.duration_s > 0.0) || !(cfg.fs > 0.0))
    throw std::invalid_argument("synth: duration_s and fs must be positive");
  if (cfg.lead_in_s < 0.0)
    throw std::invalid_argument("synth: lead_in_s must be >= 0");
  if (cfg.noise_std < 0.0)
    throw std::invalid_argument("synth: noise_std must be >= 0");
  if (!(cfg.missing_rate >= 0.0 && cfg.missing_rate < 0.1))
    throw std::invalid_argument("synth: missing_rate must be in [0, 0.1)");
  if (cfg.subject_gain_spread < 0.0 || cfg.subject_gain_spread >= 0.5)
    throw std::invalid_argument("synth: subject_gain_spread must be in [0, 0.5)");
  for (const ClassProfile& p : cfg.profiles)
    for (double a : p.band_amplitude)
      if (a < 0.0)
        throw std::invalid_argument("synth: band amplitudes must be >= 0");
}

namespace detail {

// Voss-McCartney pink noise: octave rows of held white samples, one row
// refreshed per step, plus an always-fresh top row.
class PinkNoise {
 public:
  PinkNoise(Rng& rng, int rows = 8) : rows_(static_cast<std::size_t>(rows)) {
    for (double& r : rows_) r = rng.normal();
    norm_ = 1.0 / std::sqrt(static_cast<double>(rows_.size()) + 1.0);
  }

  double next(Rng& rng) {
    ++counter_;
    const int idx = std::countr_zero(counter_);
    if (idx < static_cast<int>(rows_.size())) rows_[idx] = rng.normal();
    double sum = rng.normal();
    for (double r : rows_) sum += r;
    return sum * norm_;
  }

 private:
  std::vector<double> rows_;
  uint64_t counter_ = 0;
  double norm_ = 1.0;
};

}  // namespace detail

inline bool is_left_channel(Channel c) {
  return c == Channel::TP9 || c == Channel::AF7;
}

inline double hemisphere_gain(const ClassProfile& p, Channel c) {
  return is_left_channel(c) ? 1.0 + p.asymmetry : 1.0 - p.asymmetry;
}

inline std::string synth_subject_id(int subject_idx) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "s%03d", subject_idx);
  return buf;
}

inline std::string synth_video_id(int video_idx) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "v%02d", video_idx);
  return buf;
}

// Videos are grouped by quadrant: the first videos_per_quadrant belong to
// Q1, the next to Q2, and so on.
inline Emotion label_for_video(int video_idx, int videos_per_quadrant) {
  const int q = video_idx / videos_per_quadrant;
  if (video_idx < 0 || q >= kNumClasses)
    throw std::invalid_argument("label_for_video: video index out of range");
  return kEmotions[q];
}

inline uint64_t trial_seed(const SynthConfig& cfg, int subject_idx,
                           int video_idx) {
  uint64_t s = mix_seed(cfg.seed, "synth-trial");
  s = mix_seed(s, static_cast<uint64_t>(subject_idx));
  return mix_seed(s, static_cast<uint64_t>(video_idx));
}

inline double subject_gain(const SynthConfig& cfg, int subject_idx) {
  Rng rng(mix_seed(mix_seed(cfg.seed, "subject-gain"),
                   static_cast<uint64_t>(subject_idx)));
  const double g = 1.0 + cfg.subject_gain_spread * rng.normal();
  return std::max(g, 0.1);
}

// One raw recording, lead-in and lead-out included. The stimulus window for
// the matching manifest entry starts at floor(lead_in_s * fs) and runs for
// duration_s.
inline Recording generate_trial(Emotion label, int subject_idx, int video_idx,
                                const SynthConfig& cfg) {
  validate(cfg);
  const ClassProfile& profile = cfg.profiles[static_cast<int>(label)];
  const std::size_t lead = static_cast<std::size_t>(
      std::floor(cfg.lead_in_s * cfg.fs));
  const std::size_t body = stimulus_sample_count(cfg.duration_s, cfg.fs);
  const std::size_t total = body + 2 * lead;

  Recording rec = Recording::zeros(total, cfg.fs);
  rec.subject_id = synth_subject_id(subject_idx);

  Rng rng(trial_seed(cfg, subject_idx, video_idx));
  const double gain = subject_gain(cfg, subject_idx);

  std::array<double, kNumBands> phase{};
  for (double& p : phase) p = rng.uniform(0.0, 2.0 * std::numbers::pi);

  for (int c = 0; c < kNumChannels; ++c) {
    const double hemi = gain * hemisphere_gain(profile, kChannels[c]);
    detail::PinkNoise pink(rng);
    for (std::size_t i = 0; i < total; ++i) {
      const double t = static_cast<double>(i) / cfg.fs;
      double v = 0.0;
      for (int b = 0; b < kNumBands; ++b)
        v += profile.band_amplitude[b] *
             std::sin(2.0 * std::numbers::pi * kBandCenterHz[b] * t + phase[b]);
      rec.at(i, c) = hemi * v + cfg.noise_std * pink.next(rng);
    }
  }

  if (cfg.missing_rate > 0.0) {
    for (std::size_t k = 0; k < rec.data.size(); ++k) {
      if (rng.uniform01() < cfg.missing_rate) {
        rec.data[k] = std::numeric_limits<double>::quiet_NaN();
        rec.missing[k] = 1;
      }
    }
  }
  return rec;
}

// Writes out_dir/recordings/*.csv plus out_dir/manifest.json and returns the
// manifest. Each recording carries one extra '#' note naming its origin;
// parsers skip it.
inline SessionManifest generate_dataset(const SynthConfig& cfg,
                                        const std::string& out_dir) {
  validate(cfg);
  namespace fs = std::filesystem;
  const fs::path root(out_dir);
  fs::create_directories(root / "recordings");

  SessionManifest manifest;
  manifest.stage = "raw";
  manifest.provenance = Provenance::Synthetic;
  manifest.seed = cfg.seed;

  const std::size_t onset =
      static_cast<std::size_t>(std::floor(cfg.lead_in_s * cfg.fs));
  const int n_videos = kNumClasses * cfg.videos_per_quadrant;

  for (int s = 0; s < cfg.n_subjects; ++s) {
    for (int v = 0; v < n_videos; ++v) {
      const Emotion label = label_for_video(v, cfg.videos_per_quadrant);
      const Recording rec = generate_trial(label, s, v, cfg);

      const std::string sid = synth_subject_id(s);
      const std::string vid = synth_video_id(v);
      const std::string rel = "recordings/" + sid + "_" + vid + ".csv";

      std::string body = serialize_recording(rec);
      const std::string note = "# synthetic: subject=" + sid + " video=" + vid +
                               " label=" + emotion_name(label) + "\n";
      body.insert(body.find('\n') + 1, note);
      std::ofstream out(root / rel, std::ios::binary);
      if (!out)
        throw std::runtime_error("cannot write recording file: " +
                                 (root / rel).string());
      out << body;

      manifest.trials.push_back(
          {sid, vid, quadrant(label), onset, cfg.duration_s, rel});
    }
  }

  nlohmann::json j = manifest_to_json(manifest);
  nlohmann::json profiles = nlohmann::json::array();
  for (const ClassProfile& p : cfg.profiles)
    profiles.push_back(
        {{"band_amplitude", p.band_amplitude}, {"asymmetry", p.asymmetry}});
  j["config"] = {{"n_subjects", cfg.n_subjects},
                 {"videos_per_quadrant", cfg.videos_per_quadrant},
                 {"duration_s", cfg.duration_s},
                 {"fs", cfg.fs},
                 {"lead_in_s", cfg.lead_in_s},
                 {"noise_std", cfg.noise_std},
                 {"missing_rate", cfg.missing_rate},
                 {"subject_gain_spread", cfg.subject_gain_spread},
                 {"profiles", profiles}};
  std::ofstream mout(root / "manifest.json");
  if (!mout)
    throw std::runtime_error("cannot write manifest file: " +
                             (root / "manifest.json").string());
  mout << j.dump(2) << '\n';
  return manifest;
}

}  // namespace eegemo
