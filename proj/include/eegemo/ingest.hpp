#pragma once

// Recording and manifest file handling. Recordings are a small text format:
//   # muse-eeg v1, rate=<hz>
//   index,TP9,AF7,AF8,TP10
// one row per sample, empty or non-numeric fields meaning "missing". Extra
// '#' lines are skipped. Values are written with shortest-round-trip
// formatting and read back with from_chars, so parse(serialize(x)) == x
// bit for bit. Manifests are JSON and list the trials of a session.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "json.hpp"

#include "eegemo/types.hpp"

namespace eegemo {

namespace detail {

inline std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

// Full-token parse; partial matches (trailing junk) fail.
inline bool parse_double(std::string_view s, double& out) {
  const char* last = s.data() + s.size();
  const auto res = std::from_chars(s.data(), last, out);
  return res.ec == std::errc() && res.ptr == last;
}

inline bool parse_size(std::string_view s, std::size_t& out) {
  const char* last = s.data() + s.size();
  const auto res = std::from_chars(s.data(), last, out);
  return res.ec == std::errc() && res.ptr == last;
}

}  // namespace detail

struct ParseError : std::runtime_error {
  ParseError(std::string_view source, std::size_t line_no,
             const std::string& message)
      : std::runtime_error(std::string(source) + ":" +
                           std::to_string(line_no) + ": " + message),
        line(line_no) {}
  std::size_t line;
};

inline constexpr std::string_view kRecordingHeaderPrefix = "# muse-eeg v1, rate=";

// Missing cells come back as quiet NaN with the mask set; forgotten
// imputation then fails loudly downstream instead of passing zeros.
inline Recording parse_recording_text(std::string_view text,
                                      std::string_view source = "<memory>") {
  Recording rec;
  rec.data.clear();
  rec.missing.clear();

  std::size_t line_no = 0;
  std::size_t pos = 0;
  bool header_seen = false;
  bool have_prev_index = false;
  std::size_t prev_index = 0;

  while (pos <= text.size()) {
    if (pos == text.size() && line_no > 0) break;
    const std::size_t eol = text.find('\n', pos);
    std::string_view line = text.substr(
        pos, eol == std::string_view::npos ? std::string_view::npos
                                           : eol - pos);
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
    ++line_no;

    if (!line.empty() && line.back() == '\r')
      throw ParseError(source, line_no,
                       "carriage return found; the format uses LF line endings");

    if (!header_seen) {
      if (line.substr(0, kRecordingHeaderPrefix.size()) != kRecordingHeaderPrefix)
        throw ParseError(source, line_no,
                         "malformed header; expected '# muse-eeg v1, rate=<hz>'");
      double rate = 0.0;
      if (!detail::parse_double(line.substr(kRecordingHeaderPrefix.size()), rate) ||
          !(rate > 0.0))
        throw ParseError(source, line_no, "header rate is not a positive number");
      rec.sample_rate_hz = rate;
      header_seen = true;
      continue;
    }

    if (line.empty())
      throw ParseError(source, line_no, "blank line inside the sample table");
    if (line.front() == '#') continue;

    std::vector<std::string_view> fields;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= line.size(); ++i) {
      if (i == line.size() || line[i] == ',') {
        fields.push_back(line.substr(start, i - start));
        start = i + 1;
      }
    }
    if (fields.size() != 1 + kNumChannels)
      throw ParseError(source, line_no,
                       "expected 5 fields (index,TP9,AF7,AF8,TP10), got " +
                           std::to_string(fields.size()));

    std::size_t index = 0;
    if (!detail::parse_size(fields[0], index))
      throw ParseError(source, line_no, "sample index is not a number");
    if (have_prev_index && index <= prev_index)
      throw ParseError(source, line_no,
                       "non-monotonic sample index (" + std::to_string(index) +
                           " after " + std::to_string(prev_index) + ")");
    prev_index = index;
    have_prev_index = true;

    for (int c = 0; c < kNumChannels; ++c) {
      double v = 0.0;
      if (detail::parse_double(fields[1 + c], v)) {
        rec.data.push_back(v);
        rec.missing.push_back(0);
      } else {
        rec.data.push_back(std::numeric_limits<double>::quiet_NaN());
        rec.missing.push_back(1);
      }
    }
  }

  if (rec.data.empty())
    throw ParseError(source, line_no + 1, "no sample rows after the header");
  return rec;
}

inline Recording load_recording(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open recording file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_recording_text(buf.str(), path);
}

inline std::string serialize_recording(const Recording& rec) {
  std::string out;
  out += kRecordingHeaderPrefix;
  out += detail::format_double(rec.sample_rate_hz);
  out += '\n';
  const std::size_t n = rec.n_samples();
  for (std::size_t i = 0; i < n; ++i) {
    out += std::to_string(i);
    for (int c = 0; c < kNumChannels; ++c) {
      out += ',';
      if (!rec.is_missing(i, c)) out += detail::format_double(rec.at(i, c));
    }
    out += '\n';
  }
  return out;
}

inline void save_recording(const Recording& rec, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write recording file: " + path);
  out << serialize_recording(rec);
}

struct ManifestEntry {
  std::string subject_id;
  std::string video_id;
  int quadrant = 1;
  std::size_t onset_sample = 0;
  double duration_s = 0.0;
  std::string path;  // relative to the manifest's directory
};

struct SessionManifest {
  std::string stage = "raw";  // "raw" or "preprocessed"
  Provenance provenance = Provenance::Real;
  uint64_t seed = 0;
  std::vector<ManifestEntry> trials;
};

inline constexpr int kManifestFormatVersion = 1;

inline nlohmann::json manifest_to_json(const SessionManifest& m) {
  nlohmann::json j;
  j["format"] = "eegemo-manifest";
  j["version"] = kManifestFormatVersion;
  j["stage"] = m.stage;
  j["provenance"] = provenance_name(m.provenance);
  j["seed"] = m.seed;
  j["trials"] = nlohmann::json::array();
  for (const ManifestEntry& e : m.trials) {
    j["trials"].push_back({{"subject_id", e.subject_id},
                           {"video_id", e.video_id},
                           {"quadrant", e.quadrant},
                           {"onset_sample", e.onset_sample},
                           {"duration_s", e.duration_s},
                           {"path", e.path}});
  }
  return j;
}

inline SessionManifest manifest_from_json(const nlohmann::json& j) {
  if (j.value("format", "") != "eegemo-manifest")
    throw std::runtime_error("not a manifest file (missing format marker)");
  if (j.at("version").get<int>() != kManifestFormatVersion)
    throw std::runtime_error("unsupported manifest version " +
                             j.at("version").dump());
  SessionManifest m;
  m.stage = j.at("stage").get<std::string>();
  if (m.stage != "raw" && m.stage != "preprocessed")
    throw std::runtime_error("manifest stage must be 'raw' or 'preprocessed', got '" +
                             m.stage + "'");
  const auto prov = j.at("provenance").get<std::string>();
  if (prov == "real") m.provenance = Provenance::Real;
  else if (prov == "synthetic") m.provenance = Provenance::Synthetic;
  else throw std::runtime_error("unknown provenance '" + prov + "'");
  m.seed = j.at("seed").get<uint64_t>();

  std::size_t k = 0;
  for (const auto& ej : j.at("trials")) {
    ManifestEntry e;
    e.subject_id = ej.at("subject_id").get<std::string>();
    e.video_id = ej.at("video_id").get<std::string>();
    e.quadrant = ej.at("quadrant").get<int>();
    if (e.quadrant < 1 || e.quadrant > kNumClasses)
      throw std::runtime_error("manifest trial " + std::to_string(k) +
                               ": quadrant must be 1..4");
    const auto onset = ej.at("onset_sample").get<int64_t>();
    if (onset < 0)
      throw std::runtime_error("manifest trial " + std::to_string(k) +
                               ": onset_sample must be >= 0");
    e.onset_sample = static_cast<std::size_t>(onset);
    e.duration_s = ej.at("duration_s").get<double>();
    if (!(e.duration_s > 0.0))
      throw std::runtime_error("manifest trial " + std::to_string(k) +
                               ": duration_s must be positive");
    e.path = ej.at("path").get<std::string>();
    m.trials.push_back(std::move(e));
    ++k;
  }
  return m;
}

inline void save_manifest(const SessionManifest& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write manifest file: " + path);
  out << manifest_to_json(m).dump(2) << '\n';
}

inline SessionManifest load_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open manifest file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw std::runtime_error("manifest file " + path + ": " + e.what());
  }
  return manifest_from_json(j);
}

// Number of samples a stimulus window covers; fractional tails are dropped
// so every subject yields the same trial length for a given video.
inline std::size_t stimulus_sample_count(double duration_s, double fs) {
  if (!(duration_s > 0.0) || !(fs > 0.0))
    throw std::invalid_argument("stimulus window needs positive duration and rate");
  return static_cast<std::size_t>(std::floor(duration_s * fs));
}

inline Recording truncate_to_stimulus(const Recording& rec, std::size_t onset,
                                      double duration_s) {
  const std::size_t keep = stimulus_sample_count(duration_s, rec.sample_rate_hz);
  if (keep == 0)
    throw std::invalid_argument("truncate_to_stimulus: window shorter than one sample");
  if (onset + keep > rec.n_samples())
    throw std::out_of_range(
        "truncate_to_stimulus: window [" + std::to_string(onset) + ", " +
        std::to_string(onset + keep) + ") exceeds recording length " +
        std::to_string(rec.n_samples()));
  Recording out;
  out.subject_id = rec.subject_id;
  out.sample_rate_hz = rec.sample_rate_hz;
  out.n_channels = rec.n_channels;
  const std::size_t begin = onset * rec.n_channels;
  const std::size_t end = (onset + keep) * rec.n_channels;
  out.data.assign(rec.data.begin() + begin, rec.data.begin() + end);
  out.missing.assign(rec.missing.begin() + begin, rec.missing.begin() + end);
  return out;
}

// Every bad manifest entry is reported, not just the first.
struct BuildError : std::runtime_error {
  explicit BuildError(std::vector<std::string> entry_errors)
      : std::runtime_error(join(entry_errors)), errors(std::move(entry_errors)) {}
  std::vector<std::string> errors;

 private:
  static std::string join(const std::vector<std::string>& v) {
    std::string msg = "build_dataset: " + std::to_string(v.size()) +
                      " bad manifest " + (v.size() == 1 ? "entry" : "entries");
    for (const auto& e : v) msg += "\n  " + e;
    return msg;
  }
};

// Load, validate and truncate every trial a manifest references. The result
// preserves manifest order; trials still carry their missing masks.
inline TrialSet build_dataset(const SessionManifest& manifest,
                              const std::string& base_dir) {
  TrialSet set;
  set.provenance = manifest.provenance;
  set.seed = manifest.seed;
  std::vector<std::string> errors;

  for (std::size_t k = 0; k < manifest.trials.size(); ++k) {
    const ManifestEntry& e = manifest.trials[k];
    const std::string tag = "entry " + std::to_string(k) + " (" + e.subject_id +
                            ", " + e.video_id + ")";
    try {
      const std::filesystem::path path = std::filesystem::path(base_dir) / e.path;
      Recording rec = load_recording(path.string());
      rec.subject_id = e.subject_id;
      const auto violations =
          validate_recording(rec, manifest.stage == "preprocessed");
      if (!violations.empty())
        throw std::runtime_error(violations.front().rule + ": " +
                                 violations.front().detail);
      Trial trial;
      trial.recording = truncate_to_stimulus(rec, e.onset_sample, e.duration_s);
      trial.label = emotion_from_quadrant(e.quadrant);
      trial.video_id = e.video_id;
      trial.duration_s = e.duration_s;
      set.subject_ids.push_back(e.subject_id);
      set.trials.push_back(std::move(trial));
    } catch (const std::exception& ex) {
      errors.push_back(tag + ": " + ex.what());
    }
  }
  if (!errors.empty()) throw BuildError(std::move(errors));
  return set;
}

}  // namespace eegemo
