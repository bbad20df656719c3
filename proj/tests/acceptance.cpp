// Acceptance gate: eight criteria, one PASS/FAIL line each, exit 0 iff all
// pass. Criteria 1-6 exercise the library directly against independent
// oracles; 7 and 8 drive the installed CLI end to end.

#include <array>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "eegemo/eval.hpp"
#include "eegemo/features.hpp"
#include "eegemo/ingest.hpp"
#include "eegemo/pipeline.hpp"
#include "eegemo/preprocess.hpp"
#include "eegemo/rng.hpp"
#include "eegemo/savgol.hpp"
#include "eegemo/svm.hpp"
#include "eegemo/synth.hpp"
#include "eegemo/types.hpp"
#include "eegemo/welch.hpp"
#include "oracles.hpp"

namespace {

namespace fs = std::filesystem;
using namespace eegemo;

struct Outcome {
  bool ok = false;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

std::string fmt(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

// ---------------------------------------------------------------- criterion 1

Outcome savgol_oracle() {
  const SavGolSpec spec{11, 3};
  const std::vector<double> got = savgol_coefficients(spec);
  const std::vector<double> want = oracle::savgol_weights(11, 3);
  double max_err = 0.0;
  for (std::size_t i = 0; i < got.size(); ++i)
    max_err = std::max(max_err, std::abs(got[i] - want[i]));
  if (max_err > 1e-10)
    return {false, "coefficient mismatch " + fmt(max_err) + " > 1e-10"};

  const double center_err = std::abs(got[5] - 89.0 / 429.0);
  if (center_err > 1e-12)
    return {false, "center weight off 89/429 by " + fmt(center_err)};

  auto cubic = [](double t) { return 2.0 * t * t * t - 3.0 * t * t + 0.5 * t - 1.0; };
  std::vector<double> signal(101);
  for (std::size_t i = 0; i < signal.size(); ++i)
    signal[i] = cubic(static_cast<double>(i) * 0.01);
  const std::vector<double> smoothed = savgol_smooth(signal, spec);
  double max_rel = 0.0;
  for (std::size_t i = 0; i < signal.size(); ++i) {
    const double rel =
        std::abs(smoothed[i] - signal[i]) / std::max(1.0, std::abs(signal[i]));
    max_rel = std::max(max_rel, rel);
  }
  if (max_rel > 1e-9)
    return {false, "cubic reproduction error " + fmt(max_rel) + " > 1e-9"};
  return {true, "coeff err " + fmt(max_err) + " <= 1e-10, cubic err " +
                    fmt(max_rel) + " <= 1e-9"};
}

// ---------------------------------------------------------------- criterion 2

Outcome spectral_correctness() {
  const double fs = 256.0;
  const std::size_t n = 2048;  // 8 s
  std::vector<double> sine(n);
  for (std::size_t i = 0; i < n; ++i)
    sine[i] = std::sin(2.0 * std::numbers::pi * 10.0 * static_cast<double>(i) / fs);
  const Spectrum spec = welch_psd(sine, fs);

  const double alpha = band_power(spec, canonical_bands()[2]);
  if (std::abs(alpha - 0.5) > 0.05 * 0.5)
    return {false, "alpha power " + fmt(alpha) + " not within 5% of 0.5"};
  const double total = integrate_spectrum(spec, 0.0, fs / 2.0);
  for (int b = 0; b < kNumBands; ++b) {
    if (b == 2) continue;
    const double p = band_power(spec, canonical_bands()[b]);
    if (p > 0.02 * total)
      return {false, std::string(canonical_bands()[b].name) + " power " +
                         fmt(p) + " > 2% of total " + fmt(total)};
  }

  Rng rng(404);
  std::vector<double> noise(8192);
  double mean = 0.0;
  for (double& v : noise) {
    v = rng.normal();
    mean += v;
  }
  mean /= static_cast<double>(noise.size());
  double var = 0.0;
  for (double v : noise) var += (v - mean) * (v - mean);
  var /= static_cast<double>(noise.size());
  const Spectrum nspec = welch_psd(noise, fs);
  const double integrated = integrate_spectrum(nspec, 0.0, fs / 2.0);
  if (std::abs(integrated - var) > 0.1 * var)
    return {false, "Parseval: integrated " + fmt(integrated) + " vs variance " +
                       fmt(var) + " beyond 10%"};
  return {true, "alpha " + fmt(alpha) + " ~ 0.5, Parseval gap " +
                    fmt(std::abs(integrated - var) / var * 100.0) + "% <= 10%"};
}

// ---------------------------------------------------------------- criterion 3

Outcome feature_contract() {
  SynthConfig cfg;
  cfg.n_subjects = 25;
  cfg.videos_per_quadrant = 1;
  cfg.duration_s = 4.0;
  cfg.lead_in_s = 0.0;
  cfg.missing_rate = 0.002;
  cfg.seed = 31;

  int checked = 0;
  for (int s = 0; s < cfg.n_subjects; ++s) {
    for (int v = 0; v < kNumClasses; ++v) {
      const Emotion label = label_for_video(v, 1);
      Recording rec = generate_trial(label, s, v, cfg);
      rec = impute_recording(rec);
      const Trial trial{rec, label, synth_video_id(v), cfg.duration_s};
      const FeatureVector fv = extract_features(trial);
      if (fv.values.size() != 34) return {false, "feature vector not 34-long"};
      for (int p = 0; p < 2; ++p) {
        const double corr = fv.values[FeatureVector::correlation_index(p)];
        if (!(corr >= -1.0 && corr <= 1.0))
          return {false, "correlation " + fmt(corr) + " outside [-1,1]"};
        if (!(fv.values[FeatureVector::rasm_index(p)] > 0.0))
          return {false, "RASM not positive"};
      }
      ++checked;
    }
  }

  // Mirrored hemispheres: copy each pair's left channel onto its right.
  Recording rec = generate_trial(Emotion::Happy, 0, 0, cfg);
  rec = impute_recording(rec);
  for (const ChannelPair& pair : kHemisphericPairs)
    rec.set_channel(pair.right, rec.channel(pair.left));
  const Trial trial{rec, Emotion::Happy, "v00", cfg.duration_s};
  const FeatureVector fv = extract_features(trial);
  for (int p = 0; p < 2; ++p) {
    if (std::abs(fv.values[FeatureVector::dasm_index(p)]) > 1e-9)
      return {false, "mirrored DASM not 0"};
    if (std::abs(fv.values[FeatureVector::rasm_index(p)] - 1.0) > 1e-9)
      return {false, "mirrored RASM not 1"};
    if (std::abs(fv.values[FeatureVector::correlation_index(p)] - 1.0) > 1e-9)
      return {false, "mirrored correlation not 1"};
  }
  return {true, std::to_string(checked) +
                    " trials in contract, mirrored trial exact to 1e-9"};
}

// ---------------------------------------------------------------- criterion 4

Outcome smo_vs_oracle() {
  const auto t0 = std::chrono::steady_clock::now();
  const int reps = 20;
  const int n = 5;
  const int dim = 4;
  double worst_gap = 0.0;

  for (KernelKind kind : kKernelKinds) {
    for (int rep = 0; rep < reps; ++rep) {
      Rng rng(mix_seed(424242, static_cast<uint64_t>(rep) * 10 +
                                   static_cast<uint64_t>(kind)));
      std::vector<std::vector<double>> x(n, std::vector<double>(dim));
      std::vector<int> y(n);
      bool plus = false, minus = false;
      for (int i = 0; i < n; ++i) {
        for (double& v : x[i]) v = rng.uniform(-1.5, 1.5);
        y[i] = rng.uniform01() < 0.5 ? -1 : 1;
        (y[i] > 0 ? plus : minus) = true;
      }
      if (!plus) y[0] = 1;
      if (!minus) y[n - 1] = -1;

      KernelConfig kernel;
      kernel.kind = kind;
      kernel.gamma = 0.5;
      SmoParams params;
      params.c = 1.0;
      params.tol = 1e-6;
      params.min_alpha_step = 1e-12;
      params.max_sweeps = 50000;
      params.seed = mix_seed(7, static_cast<uint64_t>(rep));

      const BinaryModel model = smo_train_binary(x, y, kernel, params);
      if (!model.converged) return {false, "SMO failed to converge"};
      if (model.max_kkt_violation > params.tol)
        return {false, "KKT violation " + fmt(model.max_kkt_violation) +
                           " > tol " + fmt(params.tol)};

      std::vector<double> alpha(n, 0.0);
      double sum_ay = 0.0;
      for (std::size_t k = 0; k < model.sv_indices.size(); ++k) {
        alpha[model.sv_indices[k]] = std::abs(model.coeffs[k]);
        sum_ay += model.coeffs[k];
      }
      for (double a : alpha)
        if (a < -1e-6 || a > params.c + 1e-6)
          return {false, "alpha outside box"};
      if (std::abs(sum_ay) > 1e-6)
        return {false, "equality constraint off by " + fmt(std::abs(sum_ay))};

      const auto gram = gram_matrix(x, kernel);
      const double got = oracle::dual_objective(alpha, y, gram);
      const double best = oracle::brute_force_dual_max(y, gram, params.c);
      const double gap = best - got;
      worst_gap = std::max(worst_gap, std::abs(gap));
      if (std::abs(gap) > 1e-3)
        return {false, "dual gap " + fmt(gap) + " > 1e-3"};
    }
  }
  const double dt = seconds_since(t0);
  if (dt >= 60.0) return {false, "took " + fmt(dt) + "s >= 60s"};
  return {true, "80 problems, worst dual gap " + fmt(worst_gap) +
                    " <= 1e-3, " + fmt(dt) + "s"};
}

// ---------------------------------------------------------------- criterion 5

Outcome mercer_checks() {
  const auto t0 = std::chrono::steady_clock::now();
  double min_eig = 0.0;
  for (int rep = 0; rep < 200; ++rep) {
    Rng rng(mix_seed(515151, static_cast<uint64_t>(rep)));
    std::vector<std::vector<double>> x(8, std::vector<double>(6));
    for (auto& row : x)
      for (double& v : row) v = rng.uniform(-2.0, 2.0);
    for (KernelKind kind : kKernelKinds) {
      KernelConfig kernel;
      kernel.kind = kind;
      const auto gram = gram_matrix(x, kernel);
      for (std::size_t i = 0; i < gram.size(); ++i)
        for (std::size_t j = 0; j < gram.size(); ++j)
          if (std::abs(gram[i][j] - gram[j][i]) > 1e-12)
            return {false, "asymmetric Gram matrix"};
      const double eig = oracle::min_eigenvalue(gram);
      min_eig = std::min(min_eig, eig);
      if (eig < -1e-8)
        return {false, std::string("min eigenvalue ") + fmt(eig) +
                           " < -1e-8 for " + kernel_name(kind)};
    }
  }
  const double dt = seconds_since(t0);
  if (dt >= 30.0) return {false, "took " + fmt(dt) + "s >= 30s"};
  return {true, "800 Gram matrices symmetric to 1e-12, min eig " +
                    fmt(min_eig) + " >= -1e-8, " + fmt(dt) + "s"};
}

// ---------------------------------------------------------------- criterion 6

Outcome evaluation_bookkeeping() {
  std::vector<Emotion> labels;
  for (int i = 0; i < 160; ++i)
    for (Emotion e : kEmotions) labels.push_back(e);

  const SplitIndices split = stratified_split(labels, 0.8, 99);
  if (split.train.size() != 512 || split.test.size() != 128)
    return {false, "split " + std::to_string(split.train.size()) + "/" +
                       std::to_string(split.test.size()) + " != 512/128"};

  std::vector<Emotion> train_labels;
  for (std::size_t idx : split.train) train_labels.push_back(labels[idx]);
  const auto folds = kfold_partition(train_labels, 10, 99);
  std::vector<std::size_t> seen;
  for (const auto& fold : folds) {
    if (fold.size() != 51 && fold.size() != 52)
      return {false, "fold size " + std::to_string(fold.size())};
    seen.insert(seen.end(), fold.begin(), fold.end());
  }
  std::sort(seen.begin(), seen.end());
  for (std::size_t i = 0; i < seen.size(); ++i)
    if (i != seen[i]) return {false, "folds not a disjoint cover"};
  if (seen.size() != 512) return {false, "folds do not cover the train split"};

  Rng rng(2026);
  for (int rep = 0; rep < 50; ++rep) {
    ConfusionMatrix cm{};
    std::size_t total = 0;
    std::size_t trace = 0;
    for (int i = 0; i < kNumClasses; ++i)
      for (int j = 0; j < kNumClasses; ++j) {
        cm[i][j] = rng.uniform_int(30) + 1;
        total += cm[i][j];
        if (i == j) trace += cm[i][j];
      }
    const Metrics m = compute_metrics(cm);
    const double direct =
        static_cast<double>(trace) / static_cast<double>(total);
    if (std::abs(m.accuracy - direct) > 1e-12)
      return {false, "accuracy != trace/total beyond 1e-12"};
  }

  // 105 of 128 correct, balanced rows of 32.
  ConfusionMatrix cm{};
  const std::array<std::size_t, 4> diag = {27, 26, 26, 26};
  for (int i = 0; i < kNumClasses; ++i) {
    cm[i][i] = diag[i];
    cm[i][(i + 1) % kNumClasses] = 32 - diag[i];
  }
  const Metrics m = compute_metrics(cm);
  const std::string pct = format_pct(m.accuracy);
  if (pct != "82.03")
    return {false, "trace-105 matrix formats as " + pct + " != 82.03"};
  return {true, "512/128 split, fold sizes within 1, trace-105 -> 82.03"};
}

// ----------------------------------------------------------- criteria 7 and 8

struct PipelineRun {
  fs::path dir;
  bool ok = false;
  std::string error;
  double mean_cv = 0.0;
  double test_acc = 0.0;
  nlohmann::json comparison;
};

int run_cmd(const std::string& cmd) { return std::system(cmd.c_str()); }

PipelineRun run_full_pipeline(const fs::path& dir, uint64_t seed) {
  PipelineRun run;
  run.dir = dir;
  fs::remove_all(dir);
  fs::create_directories(dir / "logs");
  const std::string cli = EEGEMO_CLI_PATH;
  const std::string seed_s = std::to_string(seed);

  auto stage = [&](const std::string& name, const std::string& args) {
    const std::string log = (dir / "logs" / (name + ".log")).string();
    const std::string cmd = cli + " " + args + " >" + log + " 2>&1";
    if (run_cmd(cmd) != 0) {
      run.error = name + " stage failed, see " + log;
      return false;
    }
    return true;
  };

  const std::string raw = (dir / "raw").string();
  const std::string store = (dir / "store").string();
  const std::string feats = (dir / "features.csv").string();
  if (!stage("synth", "synth --out " + raw + " --seed " + seed_s)) return run;
  if (!stage("ingest", "ingest --manifest " + raw + "/manifest.json --out " +
                           store))
    return run;
  if (!stage("features", "features --manifest " + store +
                             "/manifest.json --out " + feats))
    return run;
  fs::remove_all(dir / "raw");
  fs::remove_all(dir / "store");

  const std::string proto = " --kernel polynomial --degree 2 --seed " + seed_s;
  if (!stage("train", "train --features " + feats + proto + " --out " +
                          (dir / "model.json").string()))
    return run;
  if (!stage("evaluate", "evaluate --features " + feats + proto + " --out " +
                             (dir / "report").string()))
    return run;
  if (!stage("report", "report --features " + feats + " --seed " + seed_s +
                           " --out " + (dir / "comparison").string()))
    return run;

  try {
    std::ifstream in(dir / "report" / "report.json");
    nlohmann::json rep;
    in >> rep;
    run.mean_cv = rep.at("mean_cv_accuracy").get<double>();
    run.test_acc = rep.at("test_accuracy").get<double>();
    std::ifstream cin(dir / "comparison" / "comparison.json");
    cin >> run.comparison;
  } catch (const std::exception& e) {
    run.error = std::string("report parsing failed: ") + e.what();
    return run;
  }
  run.ok = true;
  return run;
}

Outcome end_to_end(PipelineRun& out_run) {
  const auto t0 = std::chrono::steady_clock::now();
  const fs::path base = fs::temp_directory_path() / "eegemo-acceptance";
  out_run = run_full_pipeline(base / "run-a", 1);
  if (!out_run.ok) return {false, out_run.error};
  const double dt = seconds_since(t0);

  if (out_run.mean_cv < 0.80)
    return {false, "mean CV accuracy " + fmt(out_run.mean_cv) + " < 0.80"};
  if (out_run.test_acc < 0.80)
    return {false, "test accuracy " + fmt(out_run.test_acc) + " < 0.80"};
  if (dt >= 300.0) return {false, "took " + fmt(dt) + "s >= 300s"};

  const nlohmann::json& cmp = out_run.comparison;
  if (cmp.value("format", "") != "eegemo-kernel-comparison" ||
      cmp.at("rows").size() != 4)
    return {false, "comparison is not a 4-kernel table"};
  for (const auto& row : cmp.at("rows"))
    if (!row.contains("mean_cv_accuracy") ||
        !row.contains("best_fold_accuracy") || !row.contains("test_accuracy"))
      return {false, "comparison rows missing Table-I columns"};

  return {true, "mean CV " + fmt(out_run.mean_cv) + ", test " +
                    fmt(out_run.test_acc) + " >= 0.80, 4-kernel table, " +
                    fmt(dt) + "s < 300s"};
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

Outcome determinism(const PipelineRun& run_a) {
  if (!run_a.ok) return {false, "no reference pipeline run to compare against"};
  const fs::path base = fs::temp_directory_path() / "eegemo-acceptance";
  const PipelineRun run_b = run_full_pipeline(base / "run-b", 1);
  if (!run_b.ok) return {false, run_b.error};

  const std::array<const char*, 6> artifacts = {
      "features.csv",          "model.json",
      "report/report.json",    "report/report.txt",
      "report/confusion.csv",  "comparison/comparison.json"};
  for (const char* rel : artifacts) {
    const std::string a = read_file(run_a.dir / rel);
    const std::string b = read_file(run_b.dir / rel);
    if (a.empty()) return {false, std::string(rel) + " missing or empty"};
    if (a != b) return {false, std::string(rel) + " differs between runs"};
  }
  fs::remove_all(base);
  return {true, "6 artifacts byte-identical across two seeded runs"};
}

}  // namespace

int main() {
  int failures = 0;
  auto report = [&](int idx, const char* name, const Outcome& o) {
    std::cout << (o.ok ? "PASS" : "FAIL") << "  [" << idx << "] " << name
              << ": " << o.detail << "\n";
    std::cout.flush();
    if (!o.ok) ++failures;
  };
  auto guard = [](const std::function<Outcome()>& f) -> Outcome {
    try {
      return f();
    } catch (const std::exception& e) {
      return {false, std::string("exception: ") + e.what()};
    }
  };

  report(1, "Savitzky-Golay oracle equivalence", guard(savgol_oracle));
  report(2, "spectral correctness", guard(spectral_correctness));
  report(3, "feature-vector contract", guard(feature_contract));
  report(4, "SMO vs brute-force QP oracle", guard(smo_vs_oracle));
  report(5, "kernel Mercer checks", guard(mercer_checks));
  report(6, "evaluation bookkeeping", guard(evaluation_bookkeeping));

  PipelineRun run_a;
  report(7, "end-to-end pipeline", guard([&] { return end_to_end(run_a); }));
  report(8, "determinism", guard([&] { return determinism(run_a); }));

  std::cout << (8 - failures) << "/8 criteria passed\n";
  return failures == 0 ? 0 : 1;
}
