#pragma once

// The evaluation protocol: stratified 80/20 split, stratified k-fold cross
// validation on the training side, best-fold model selection, and the
// confusion-matrix metrics. The test set is scored with the best fold's
// model by default; --refit-full-train swaps in a model retrained on the
// whole training split.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "eegemo/rng.hpp"
#include "eegemo/svm.hpp"
#include "eegemo/types.hpp"

namespace eegemo {

struct SplitIndices {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

// Per-label proportional split; each label's train share is the rounded
// fraction, clamped so neither side of a label goes empty. Index sets come
// back sorted; the randomness decides membership only.
inline SplitIndices stratified_split(const std::vector<Emotion>& labels,
                                     double train_frac, uint64_t seed) {
  if (!(train_frac > 0.0 && train_frac < 1.0))
    throw std::invalid_argument("stratified_split: train_frac must be in (0,1)");
  std::array<std::vector<std::size_t>, kNumClasses> groups;
  for (std::size_t i = 0; i < labels.size(); ++i)
    groups[static_cast<int>(labels[i])].push_back(i);
  for (int l = 0; l < kNumClasses; ++l)
    if (groups[l].size() == 1)
      throw std::invalid_argument(
          std::string("stratified_split: label '") + emotion_name(kEmotions[l]) +
          "' has a single sample; need at least 2 per present label");

  Rng rng(mix_seed(seed, "stratified-split"));
  SplitIndices out;
  for (int l = 0; l < kNumClasses; ++l) {
    auto& g = groups[l];
    if (g.empty()) continue;
    rng.shuffle(g);
    auto n_train = static_cast<std::size_t>(
        std::lround(train_frac * static_cast<double>(g.size())));
    n_train = std::clamp<std::size_t>(n_train, 1, g.size() - 1);
    out.train.insert(out.train.end(), g.begin(), g.begin() + n_train);
    out.test.insert(out.test.end(), g.begin() + n_train, g.end());
  }
  std::sort(out.train.begin(), out.train.end());
  std::sort(out.test.begin(), out.test.end());
  return out;
}

// Stratified folds: shuffle within each label, then deal every sample to
// folds round-robin with a cursor that keeps running across labels. The
// cursor makes global fold sizes differ by at most one (512 -> two of 52,
// eight of 51) while each label stays spread within one sample per fold.
inline std::vector<std::vector<std::size_t>> kfold_partition(
    const std::vector<Emotion>& labels, int k, uint64_t seed) {
  if (k < 1) throw std::invalid_argument("kfold_partition: k must be >= 1");
  if (static_cast<std::size_t>(k) > labels.size())
    throw std::invalid_argument("kfold_partition: k exceeds the sample count");

  std::array<std::vector<std::size_t>, kNumClasses> groups;
  for (std::size_t i = 0; i < labels.size(); ++i)
    groups[static_cast<int>(labels[i])].push_back(i);

  Rng rng(mix_seed(seed, "kfold"));
  std::vector<std::vector<std::size_t>> folds(static_cast<std::size_t>(k));
  std::size_t cursor = 0;
  for (auto& g : groups) {
    rng.shuffle(g);
    for (std::size_t idx : g) {
      folds[cursor % static_cast<std::size_t>(k)].push_back(idx);
      ++cursor;
    }
  }
  for (auto& fold : folds) std::sort(fold.begin(), fold.end());
  return folds;
}

struct CrossValidation {
  std::vector<double> fold_accuracies;
  std::size_t best_fold = 0;
  MulticlassModel best_model;
};

inline double accuracy_of(const MulticlassModel& model, const FeatureSet& data) {
  if (data.size() == 0)
    throw std::invalid_argument("accuracy_of: empty evaluation set");
  std::size_t correct = 0;
  for (std::size_t i = 0; i < data.size(); ++i)
    if (predict(model, data.features[i]) == data.labels[i]) ++correct;
  return static_cast<double>(correct) / static_cast<double>(data.size());
}

// Train on k-1 folds, validate on the held fold; the model that scored the
// best validation accuracy (ties to the lowest fold index) is kept.
inline CrossValidation cross_validate(const FeatureSet& train,
                                      const KernelConfig& kernel,
                                      const SmoParams& base, int k,
                                      uint64_t seed) {
  if (k < 2) throw std::invalid_argument("cross_validate: k must be >= 2");
  const auto folds = kfold_partition(train.labels, k, seed);

  CrossValidation cv;
  double best_acc = -1.0;
  for (std::size_t f = 0; f < folds.size(); ++f) {
    std::vector<std::size_t> fit_idx;
    for (std::size_t g = 0; g < folds.size(); ++g)
      if (g != f) fit_idx.insert(fit_idx.end(), folds[g].begin(), folds[g].end());
    std::sort(fit_idx.begin(), fit_idx.end());

    const FeatureSet fit = train.subset(fit_idx);
    const FeatureSet held = train.subset(folds[f]);
    SmoParams params = base;
    params.seed = mix_seed(mix_seed(seed, "cv-fold"), f);
    MulticlassModel model;
    try {
      model = train_multiclass(fit, kernel, params);
    } catch (const std::exception& e) {
      throw std::runtime_error("cross_validate: fold " + std::to_string(f) +
                               ": " + e.what());
    }
    const double acc = accuracy_of(model, held);
    cv.fold_accuracies.push_back(acc);
    if (acc > best_acc) {
      best_acc = acc;
      cv.best_fold = f;
      cv.best_model = std::move(model);
    }
  }
  return cv;
}

using ConfusionMatrix =
    std::array<std::array<std::size_t, kNumClasses>, kNumClasses>;

inline ConfusionMatrix confusion_matrix(const std::vector<Emotion>& truths,
                                        const std::vector<Emotion>& preds) {
  if (truths.size() != preds.size())
    throw std::invalid_argument("confusion_matrix: length mismatch");
  if (truths.empty())
    throw std::invalid_argument("confusion_matrix: empty inputs");
  ConfusionMatrix cm{};
  for (std::size_t i = 0; i < truths.size(); ++i)
    ++cm[static_cast<int>(truths[i])][static_cast<int>(preds[i])];
  return cm;
}

struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  bool precision_defined = true;  // false when the class is never predicted
  bool recall_defined = true;     // false when the class never occurs
};

struct Metrics {
  std::array<ClassMetrics, kNumClasses> per_class{};
  double macro_precision = 0.0;
  double macro_recall = 0.0;
  double macro_f1 = 0.0;
  double accuracy = 0.0;
  std::size_t total = 0;
};

inline Metrics compute_metrics(const ConfusionMatrix& cm) {
  Metrics m;
  std::size_t trace = 0;
  for (int c = 0; c < kNumClasses; ++c) {
    std::size_t row = 0, col = 0;
    for (int j = 0; j < kNumClasses; ++j) {
      row += cm[c][j];
      col += cm[j][c];
      m.total += cm[c][j];
    }
    trace += cm[c][c];
    ClassMetrics& cls = m.per_class[c];
    if (col > 0) {
      cls.precision = static_cast<double>(cm[c][c]) / static_cast<double>(col);
    } else {
      cls.precision_defined = false;
    }
    if (row > 0) {
      cls.recall = static_cast<double>(cm[c][c]) / static_cast<double>(row);
    } else {
      cls.recall_defined = false;
    }
    const double pr = cls.precision + cls.recall;
    cls.f1 = pr > 0.0 ? 2.0 * cls.precision * cls.recall / pr : 0.0;
    m.macro_precision += cls.precision / kNumClasses;
    m.macro_recall += cls.recall / kNumClasses;
    m.macro_f1 += cls.f1 / kNumClasses;
  }
  if (m.total == 0)
    throw std::invalid_argument("compute_metrics: empty confusion matrix");
  m.accuracy = static_cast<double>(trace) / static_cast<double>(m.total);
  return m;
}

struct EvalConfig {
  KernelConfig kernel;
  double c = 1.0;
  int folds = 10;
  double train_frac = 0.8;
  uint64_t seed = 0;
  bool refit_full_train = false;
};

struct EvaluationReport {
  std::vector<double> fold_accuracies;
  double mean_cv_accuracy = 0.0;
  std::size_t best_fold = 0;
  double test_accuracy = 0.0;
  ConfusionMatrix cm{};
  Metrics metrics;
  KernelConfig kernel;
  double c = 1.0;
  uint64_t seed = 0;
  int folds = 0;
  double train_frac = 0.8;
  bool refit_full_train = false;
  std::size_t train_size = 0;
  std::size_t test_size = 0;
};

struct ProtocolResult {
  EvaluationReport report;
  MulticlassModel model;
};

// Full protocol on one labeled feature set: split, cross-validate, pick the
// scoring model, score the held-out test set.
inline ProtocolResult run_protocol(const FeatureSet& data,
                                   const EvalConfig& cfg) {
  const SplitIndices split =
      stratified_split(data.labels, cfg.train_frac, cfg.seed);
  const FeatureSet train = data.subset(split.train);
  const FeatureSet test = data.subset(split.test);

  SmoParams base;
  base.c = cfg.c;
  const CrossValidation cv =
      cross_validate(train, cfg.kernel, base, cfg.folds, cfg.seed);

  ProtocolResult out;
  if (cfg.refit_full_train) {
    SmoParams params = base;
    params.seed = mix_seed(cfg.seed, "refit-full-train");
    out.model = train_multiclass(train, cfg.kernel, params);
  } else {
    out.model = cv.best_model;
  }

  std::vector<Emotion> preds;
  preds.reserve(test.size());
  for (std::size_t i = 0; i < test.size(); ++i)
    preds.push_back(predict(out.model, test.features[i]));

  EvaluationReport& r = out.report;
  r.fold_accuracies = cv.fold_accuracies;
  double mean = 0.0;
  for (double a : cv.fold_accuracies) mean += a;
  r.mean_cv_accuracy = mean / static_cast<double>(cv.fold_accuracies.size());
  r.best_fold = cv.best_fold;
  r.cm = confusion_matrix(test.labels, preds);
  r.metrics = compute_metrics(r.cm);
  r.test_accuracy = r.metrics.accuracy;
  r.kernel = cfg.kernel;
  r.c = cfg.c;
  r.seed = cfg.seed;
  r.folds = cfg.folds;
  r.train_frac = cfg.train_frac;
  r.refit_full_train = cfg.refit_full_train;
  r.train_size = train.size();
  r.test_size = test.size();
  return out;
}

// Table I style percentage: two decimal places.
inline std::string format_pct(double fraction) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", fraction * 100.0);
  return buf;
}

inline std::string format_ratio(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

inline std::string kernel_summary(const KernelConfig& k) {
  std::ostringstream os;
  os << kernel_name(k.kind);
  switch (k.kind) {
    case KernelKind::Linear:
      break;
    case KernelKind::Rbf:
      os << " (gamma " << k.gamma << ")";
      break;
    case KernelKind::Gaussian:
      os << " (sigma " << k.sigma << ")";
      break;
    case KernelKind::Polynomial:
      os << " (degree " << k.degree << ", gamma " << k.gamma << ", coef0 "
         << k.coef0 << ")";
      break;
  }
  return os.str();
}

inline std::string confusion_csv(const ConfusionMatrix& cm) {
  std::ostringstream os;
  for (int i = 0; i < kNumClasses; ++i) {
    for (int j = 0; j < kNumClasses; ++j) {
      if (j) os << ',';
      os << cm[i][j];
    }
    os << '\n';
  }
  return os.str();
}

inline std::string render_report_text(const EvaluationReport& r) {
  std::ostringstream os;
  os << "kernel: " << kernel_summary(r.kernel) << "  C: " << r.c
     << "  seed: " << r.seed << '\n';
  os << "train/test: " << r.train_size << '/' << r.test_size
     << "  folds: " << r.folds << "  test model: "
     << (r.refit_full_train ? "refit on full training split"
                            : "best fold's model")
     << '\n';
  os << '\n';
  os << "fold accuracies (%):";
  for (double a : r.fold_accuracies) os << ' ' << format_pct(a);
  os << '\n';
  os << "mean CV accuracy: " << format_pct(r.mean_cv_accuracy)
     << "%  best fold: " << r.best_fold << " ("
     << format_pct(r.fold_accuracies[r.best_fold]) << "%)\n";
  os << "test accuracy: " << format_pct(r.test_accuracy) << "%\n";
  os << '\n';
  os << "confusion matrix (rows = true, cols = predicted):\n";
  os << std::setw(9) << ' ';
  for (int j = 0; j < kNumClasses; ++j)
    os << std::setw(9) << emotion_name(kEmotions[j]);
  os << '\n';
  for (int i = 0; i < kNumClasses; ++i) {
    os << std::setw(9) << emotion_name(kEmotions[i]);
    for (int j = 0; j < kNumClasses; ++j) os << std::setw(9) << r.cm[i][j];
    os << '\n';
  }
  os << '\n';
  os << "per-class metrics:\n";
  os << std::setw(9) << "class" << std::setw(11) << "precision" << std::setw(8)
     << "recall" << std::setw(8) << "f1" << '\n';
  for (int c = 0; c < kNumClasses; ++c) {
    const ClassMetrics& m = r.metrics.per_class[c];
    os << std::setw(9) << emotion_name(kEmotions[c]) << std::setw(11)
       << format_ratio(m.precision) << std::setw(8) << format_ratio(m.recall)
       << std::setw(8) << format_ratio(m.f1);
    if (!m.precision_defined) os << "  [precision undefined: never predicted]";
    if (!m.recall_defined) os << "  [recall undefined: no true samples]";
    os << '\n';
  }
  os << "macro: precision " << format_ratio(r.metrics.macro_precision)
     << "  recall " << format_ratio(r.metrics.macro_recall) << "  f1 "
     << format_ratio(r.metrics.macro_f1) << '\n';
  return os.str();
}

inline nlohmann::json report_to_json(const EvaluationReport& r) {
  nlohmann::json j;
  j["format"] = "eegemo-report";
  j["version"] = 1;
  j["kernel"]["kind"] = kernel_name(r.kernel.kind);
  j["kernel"]["gamma"] = r.kernel.gamma;
  j["kernel"]["sigma"] = r.kernel.sigma;
  j["kernel"]["degree"] = r.kernel.degree;
  j["kernel"]["coef0"] = r.kernel.coef0;
  j["c"] = r.c;
  j["seed"] = r.seed;
  j["folds"] = r.folds;
  j["train_frac"] = r.train_frac;
  j["refit_full_train"] = r.refit_full_train;
  j["train_size"] = r.train_size;
  j["test_size"] = r.test_size;
  j["fold_accuracies"] = r.fold_accuracies;
  j["mean_cv_accuracy"] = r.mean_cv_accuracy;
  j["best_fold"] = r.best_fold;
  j["test_accuracy"] = r.test_accuracy;
  j["confusion_matrix"] = r.cm;
  j["per_class"] = nlohmann::json::array();
  for (int c = 0; c < kNumClasses; ++c) {
    const ClassMetrics& m = r.metrics.per_class[c];
    j["per_class"].push_back({{"label", emotion_name(kEmotions[c])},
                              {"precision", m.precision},
                              {"precision_defined", m.precision_defined},
                              {"recall", m.recall},
                              {"recall_defined", m.recall_defined},
                              {"f1", m.f1}});
  }
  j["macro"] = {{"precision", r.metrics.macro_precision},
                {"recall", r.metrics.macro_recall},
                {"f1", r.metrics.macro_f1}};
  return j;
}

}  // namespace eegemo
