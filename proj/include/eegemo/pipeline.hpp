#pragma once

// Stage drivers behind the CLI. Each stage consumes the previous stage's
// files and emits the next; every output embeds the seed and the settings
// that produced it, so a rerun with the same inputs is byte-identical.

#include <array>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "eegemo/eval.hpp"
#include "eegemo/features.hpp"
#include "eegemo/ingest.hpp"
#include "eegemo/model_io.hpp"
#include "eegemo/preprocess.hpp"
#include "eegemo/types.hpp"
#include "eegemo/welch.hpp"

namespace eegemo {

struct PreprocessOptions {
  SavGolSpec savgol{};
  int impute_radius = kDefaultImputeRadius;
};

// Raw manifest -> preprocessed trial store. Per trial: impute, truncate to
// the stimulus window, smooth. The store is itself a manifest with
// stage="preprocessed" and zero onsets, so build_dataset reads it directly.
inline SessionManifest run_ingest(const std::string& manifest_path,
                                  const std::string& out_dir,
                                  const PreprocessOptions& opt = {}) {
  validate(opt.savgol);
  const SessionManifest raw = load_manifest(manifest_path);
  if (raw.stage != "raw")
    throw std::invalid_argument("run_ingest: manifest stage is '" + raw.stage +
                                "', expected 'raw'");

  namespace fs = std::filesystem;
  const fs::path base = fs::path(manifest_path).parent_path();
  const fs::path root(out_dir);
  fs::create_directories(root / "trials");

  SessionManifest store;
  store.stage = "preprocessed";
  store.provenance = raw.provenance;
  store.seed = raw.seed;

  std::vector<std::string> errors;
  for (std::size_t k = 0; k < raw.trials.size(); ++k) {
    const ManifestEntry& e = raw.trials[k];
    const std::string tag = "entry " + std::to_string(k) + " (" + e.subject_id +
                            ", " + e.video_id + ")";
    try {
      Recording rec = load_recording((base / e.path).string());
      rec.subject_id = e.subject_id;
      const auto violations = validate_recording(rec, false);
      if (!violations.empty())
        throw std::runtime_error(violations.front().rule + ": " +
                                 violations.front().detail);
      rec = impute_recording(rec, opt.impute_radius);
      rec = truncate_to_stimulus(rec, e.onset_sample, e.duration_s);
      rec = smooth_recording(rec, opt.savgol);

      char prefix[16];
      std::snprintf(prefix, sizeof prefix, "t%04zu_", k);
      const std::string rel =
          "trials/" + std::string(prefix) + e.subject_id + "_" + e.video_id + ".csv";
      save_recording(rec, (root / rel).string());
      store.trials.push_back(
          {e.subject_id, e.video_id, e.quadrant, 0, e.duration_s, rel});
    } catch (const std::exception& ex) {
      errors.push_back(tag + ": " + ex.what());
    }
  }
  if (!errors.empty()) throw BuildError(std::move(errors));

  nlohmann::json j = manifest_to_json(store);
  j["config"] = {{"sg_window", opt.savgol.window_len},
                 {"sg_order", opt.savgol.poly_order},
                 {"impute_radius", opt.impute_radius}};
  std::ofstream out(root / "manifest.json");
  if (!out)
    throw std::runtime_error("cannot write manifest file: " +
                             (root / "manifest.json").string());
  out << j.dump(2) << '\n';
  return store;
}

// Preprocessed store -> feature table. Any trial whose features are
// undefined is reported by entry, and all failures are aggregated.
inline FeatureSet run_features(const std::string& store_path,
                               const WelchSpec& welch = {}) {
  validate(welch);
  const SessionManifest store = load_manifest(store_path);
  if (store.stage != "preprocessed")
    throw std::invalid_argument("run_features: manifest stage is '" +
                                store.stage + "', expected 'preprocessed'");
  const std::string base =
      std::filesystem::path(store_path).parent_path().string();
  const TrialSet set = build_dataset(store, base);

  FeatureSet out;
  out.provenance = set.provenance;
  out.seed = set.seed;
  std::vector<std::string> errors;
  for (std::size_t k = 0; k < set.trials.size(); ++k) {
    try {
      FeatureVector fv = extract_features(set.trials[k], welch);
      out.features.push_back(fv);
      out.labels.push_back(set.trials[k].label);
      out.subject_ids.push_back(set.subject_ids[k]);
    } catch (const std::exception& ex) {
      errors.push_back("trial " + std::to_string(k) + " (" +
                       set.subject_ids[k] + ", " + set.trials[k].video_id +
                       "): " + ex.what());
    }
  }
  if (!errors.empty()) {
    std::string msg = "run_features: " + std::to_string(errors.size()) +
                      " undefined feature " +
                      (errors.size() == 1 ? "vector" : "vectors");
    for (const auto& e : errors) msg += "\n  " + e;
    throw std::runtime_error(msg);
  }
  return out;
}

// Feature table text format: one '#' provenance line, one column header,
// then one row per trial with shortest-round-trip number formatting.
inline constexpr const char* kFeatureTablePrefix = "# eegemo-features v1";

inline std::string feature_table_header() {
  std::string h = "subject_id,label";
  for (const std::string& n : FeatureVector::names()) h += "," + n;
  return h;
}

inline std::string serialize_features(const FeatureSet& data,
                                      const WelchSpec& welch = {}) {
  std::string out = kFeatureTablePrefix;
  out += ", seed=" + std::to_string(data.seed);
  out += ", provenance=" + std::string(provenance_name(data.provenance));
  out += ", segment_len=" + std::to_string(welch.segment_len);
  out += ", overlap=" + detail::format_double(welch.overlap);
  out += '\n';
  out += feature_table_header();
  out += '\n';
  for (std::size_t i = 0; i < data.size(); ++i) {
    out += data.subject_ids[i];
    out += ',';
    out += emotion_name(data.labels[i]);
    for (double v : data.features[i].values) {
      out += ',';
      out += detail::format_double(v);
    }
    out += '\n';
  }
  return out;
}

inline FeatureSet parse_features_text(const std::string& text,
                                      const std::string& source = "<memory>") {
  std::istringstream in(text);
  std::string line;
  auto fail = [&](std::size_t line_no, const std::string& msg) -> ParseError {
    return ParseError(source, line_no, msg);
  };

  if (!std::getline(in, line) || line.rfind(kFeatureTablePrefix, 0) != 0)
    throw fail(1, "expected feature table header '# eegemo-features v1'");

  FeatureSet out;
  bool saw_seed = false;
  bool saw_prov = false;
  std::size_t pos = std::string(kFeatureTablePrefix).size();
  while (pos < line.size()) {
    if (line.compare(pos, 2, ", ") != 0)
      throw fail(1, "malformed provenance header");
    pos += 2;
    const std::size_t eq = line.find('=', pos);
    std::size_t end = line.find(", ", pos);
    if (end == std::string::npos) end = line.size();
    if (eq == std::string::npos || eq >= end)
      throw fail(1, "malformed provenance header");
    const std::string key = line.substr(pos, eq - pos);
    const std::string value = line.substr(eq + 1, end - eq - 1);
    if (key == "seed") {
      std::size_t seed = 0;
      if (!detail::parse_size(value, seed))
        throw fail(1, "bad seed '" + value + "'");
      out.seed = seed;
      saw_seed = true;
    } else if (key == "provenance") {
      if (value == "real") out.provenance = Provenance::Real;
      else if (value == "synthetic") out.provenance = Provenance::Synthetic;
      else throw fail(1, "unknown provenance '" + value + "'");
      saw_prov = true;
    }
    pos = end;
  }
  if (!saw_seed || !saw_prov)
    throw fail(1, "header must carry seed and provenance");

  if (!std::getline(in, line) || line != feature_table_header())
    throw fail(2, "column header does not match the 34-feature layout");

  std::size_t line_no = 2;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) throw fail(line_no, "blank line in feature table");
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = line.find(',', start);
      fields.push_back(line.substr(start, comma - start));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (fields.size() != 2 + kNumFeatures)
      throw fail(line_no, "expected " + std::to_string(2 + kNumFeatures) +
                              " fields, got " + std::to_string(fields.size()));
    const auto label = parse_emotion(fields[1]);
    if (!label) throw fail(line_no, "unknown label '" + fields[1] + "'");
    FeatureVector fv;
    for (int f = 0; f < kNumFeatures; ++f) {
      if (!detail::parse_double(fields[2 + f], fv.values[f]))
        throw fail(line_no, "bad numeric field '" + fields[2 + f] + "'");
    }
    out.subject_ids.push_back(fields[0]);
    out.labels.push_back(*label);
    out.features.push_back(fv);
  }
  if (out.features.empty()) throw fail(line_no + 1, "feature table has no rows");
  return out;
}

inline void save_features(const FeatureSet& data, const std::string& path,
                          const WelchSpec& welch = {}) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write feature file: " + path);
  out << serialize_features(data, welch);
}

inline FeatureSet load_features(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open feature file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_features_text(buf.str(), path);
}

// Table-style comparison across all four kernels, same data and protocol.
inline constexpr std::array<KernelKind, 4> kComparisonOrder = {
    KernelKind::Rbf, KernelKind::Linear, KernelKind::Gaussian,
    KernelKind::Polynomial};

struct KernelComparison {
  std::vector<EvaluationReport> rows;  // kComparisonOrder, one per kernel
};

inline KernelComparison compare_kernels(const FeatureSet& data,
                                        const EvalConfig& base) {
  KernelComparison out;
  for (KernelKind kind : kComparisonOrder) {
    EvalConfig cfg = base;
    cfg.kernel.kind = kind;
    out.rows.push_back(run_protocol(data, cfg).report);
  }
  return out;
}

inline double best_fold_accuracy(const EvaluationReport& r) {
  return r.fold_accuracies.at(r.best_fold);
}

inline std::string render_comparison_text(const KernelComparison& cmp) {
  if (cmp.rows.empty()) throw std::invalid_argument("empty kernel comparison");
  const EvaluationReport& first = cmp.rows.front();
  std::ostringstream out;
  out << "Kernel comparison (C=" << first.c << ", folds=" << first.folds
      << ", split=" << first.train_frac << ", seed=" << first.seed << ")\n";
  out << "kernel        mean CV accuracy   best fold accuracy   test accuracy\n";
  for (const EvaluationReport& r : cmp.rows) {
    char line[128];
    std::snprintf(line, sizeof line, "%-12s  %15s%%   %17s%%   %12s%%\n",
                  kernel_name(r.kernel.kind),
                  format_pct(r.mean_cv_accuracy).c_str(),
                  format_pct(best_fold_accuracy(r)).c_str(),
                  format_pct(r.test_accuracy).c_str());
    out << line;
  }
  return out.str();
}

inline nlohmann::json comparison_to_json(const KernelComparison& cmp) {
  if (cmp.rows.empty()) throw std::invalid_argument("empty kernel comparison");
  const EvaluationReport& first = cmp.rows.front();
  nlohmann::json j;
  j["format"] = "eegemo-kernel-comparison";
  j["version"] = 1;
  j["config"] = {{"c", first.c},
                 {"folds", first.folds},
                 {"train_frac", first.train_frac},
                 {"seed", first.seed},
                 {"train_size", first.train_size},
                 {"test_size", first.test_size}};
  j["rows"] = nlohmann::json::array();
  for (const EvaluationReport& r : cmp.rows) {
    j["rows"].push_back({{"kernel", kernel_to_json(r.kernel)},
                         {"mean_cv_accuracy", r.mean_cv_accuracy},
                         {"best_fold_accuracy", best_fold_accuracy(r)},
                         {"test_accuracy", r.test_accuracy}});
  }
  return j;
}

}  // namespace eegemo
