#pragma once

// Kernel SVM trained with simplified Platt SMO, composed into a 4-class
// one-vs-one ensemble. The solver keeps the dual box and equality
// constraints feasible at every step; termination leaves every KKT
// violation within tol or flags the model as non-converged.

#include <array>
#include <cassert>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "eegemo/features.hpp"
#include "eegemo/rng.hpp"
#include "eegemo/types.hpp"

namespace eegemo {

enum class KernelKind : int { Linear = 0, Rbf = 1, Gaussian = 2, Polynomial = 3 };

inline constexpr std::array<KernelKind, 4> kKernelKinds = {
    KernelKind::Linear, KernelKind::Rbf, KernelKind::Gaussian,
    KernelKind::Polynomial};

inline constexpr const char* kernel_name(KernelKind k) {
  switch (k) {
    case KernelKind::Linear:     return "linear";
    case KernelKind::Rbf:        return "rbf";
    case KernelKind::Gaussian:   return "gaussian";
    case KernelKind::Polynomial: return "polynomial";
  }
  return "?";
}

inline KernelKind parse_kernel(std::string_view s) {
  for (KernelKind k : kKernelKinds)
    if (s == kernel_name(k)) return k;
  throw std::invalid_argument("unknown kernel: " + std::string(s));
}

// rbf and gaussian are the same family under different parameterizations;
// both are kept because they are tuned independently.
struct KernelConfig {
  KernelKind kind = KernelKind::Rbf;
  double gamma = 1.0 / kNumFeatures;  // rbf, polynomial
  double sigma = 1.0;                 // gaussian
  int degree = 2;                     // polynomial
  double coef0 = 1.0;                 // polynomial
};

inline void validate(const KernelConfig& cfg) {
  if (!(cfg.gamma > 0.0))
    throw std::invalid_argument("kernel gamma must be positive");
  if (!(cfg.sigma > 0.0))
    throw std::invalid_argument("kernel sigma must be positive");
  if (cfg.degree < 1)
    throw std::invalid_argument("kernel degree must be >= 1");
}

inline double kernel_eval(const KernelConfig& cfg, std::span<const double> x,
                          std::span<const double> y) {
  if (x.size() != y.size())
    throw std::invalid_argument("kernel_eval: dimension mismatch");
  switch (cfg.kind) {
    case KernelKind::Linear: {
      double dot = 0.0;
      for (std::size_t d = 0; d < x.size(); ++d) dot += x[d] * y[d];
      return dot;
    }
    case KernelKind::Rbf: {
      double sq = 0.0;
      for (std::size_t d = 0; d < x.size(); ++d) {
        const double diff = x[d] - y[d];
        sq += diff * diff;
      }
      return std::exp(-cfg.gamma * sq);
    }
    case KernelKind::Gaussian: {
      double sq = 0.0;
      for (std::size_t d = 0; d < x.size(); ++d) {
        const double diff = x[d] - y[d];
        sq += diff * diff;
      }
      return std::exp(-sq / (2.0 * cfg.sigma * cfg.sigma));
    }
    case KernelKind::Polynomial: {
      double dot = 0.0;
      for (std::size_t d = 0; d < x.size(); ++d) dot += x[d] * y[d];
      double base = cfg.gamma * dot + cfg.coef0;
      double acc = 1.0;
      for (int p = 0; p < cfg.degree; ++p) acc *= base;
      return acc;
    }
  }
  throw std::invalid_argument("kernel_eval: unknown kernel kind");
}

inline double kernel_eval(const KernelConfig& cfg, const FeatureVector& x,
                          const FeatureVector& y) {
  return kernel_eval(cfg, std::span<const double>(x.values),
                     std::span<const double>(y.values));
}

inline std::vector<std::vector<double>> gram_matrix(
    const std::vector<std::vector<double>>& X, const KernelConfig& cfg) {
  if (X.empty()) throw std::invalid_argument("gram_matrix: empty sample set");
  const std::size_t n = X.size();
  std::vector<std::vector<double>> G(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) G[i][j] = kernel_eval(cfg, X[i], X[j]);
  return G;
}

struct SmoParams {
  double c = 1.0;
  double tol = 1e-3;        // KKT tolerance
  int max_passes = 100;     // consecutive update-free sweeps before giving up
  int max_sweeps = 10000;   // hard bound on total sweeps
  double min_alpha_step = 1e-5;
  uint64_t seed = 0;
  bool track_objective = false;
};

inline void validate(const SmoParams& p) {
  if (!(p.c > 0.0)) throw std::invalid_argument("smo: C must be positive");
  if (!(p.tol > 0.0)) throw std::invalid_argument("smo: tol must be positive");
  if (p.max_passes < 1 || p.max_sweeps < 1)
    throw std::invalid_argument("smo: pass limits must be >= 1");
}

struct BinaryModel {
  Emotion label_a = Emotion::Happy;  // mapped to +1
  Emotion label_b = Emotion::Angry;  // mapped to -1
  KernelConfig kernel;
  std::vector<std::vector<double>> support_vectors;
  std::vector<double> coeffs;            // alpha_i * y_i, one per support vector
  std::vector<std::size_t> sv_indices;   // positions in the training slice
  double bias = 0.0;
  bool converged = true;
  double max_kkt_violation = 0.0;
  std::vector<double> objective_trace;   // filled when track_objective is set
};

inline double predict_binary(const BinaryModel& model,
                             std::span<const double> x) {
  double score = model.bias;
  for (std::size_t k = 0; k < model.support_vectors.size(); ++k)
    score += model.coeffs[k] *
             kernel_eval(model.kernel, model.support_vectors[k], x);
  return score;
}

inline double predict_binary(const BinaryModel& model, const FeatureVector& x) {
  return predict_binary(model, std::span<const double>(x.values));
}

namespace detail {

inline double dual_objective(const std::vector<double>& alpha,
                             const std::vector<int>& y,
                             const std::vector<std::vector<double>>& G) {
  double obj = 0.0;
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    obj += alpha[i];
    for (std::size_t j = 0; j < alpha.size(); ++j)
      obj -= 0.5 * alpha[i] * alpha[j] * y[i] * y[j] * G[i][j];
  }
  return obj;
}

}  // namespace detail

// Simplified Platt SMO: sweep all positions, treat any KKT violator as the
// first working index and draw the second uniformly at random. A sweep that
// finds no violator proves every KKT condition holds within tol under the
// current bias, and it consumes no randomness, so the state can never change
// again; the remaining grace sweeps are skipped. max_passes only limits
// consecutive sweeps whose updates were all blocked (degenerate segment,
// non-negative curvature or a step below min_alpha_step).
inline BinaryModel smo_train_binary(const std::vector<std::vector<double>>& X,
                                    const std::vector<int>& y,
                                    const KernelConfig& cfg,
                                    const SmoParams& params) {
  validate(cfg);
  validate(params);
  const std::size_t n = X.size();
  if (n == 0) throw std::invalid_argument("smo: empty training set");
  if (y.size() != n) throw std::invalid_argument("smo: label count mismatch");
  bool has_pos = false, has_neg = false;
  for (int v : y) {
    if (v == 1) has_pos = true;
    else if (v == -1) has_neg = true;
    else throw std::invalid_argument("smo: labels must be +1 or -1");
  }
  if (!has_pos || !has_neg)
    throw std::invalid_argument("smo: both classes must be present");

  const auto G = gram_matrix(X, cfg);
  const double C = params.c;
  std::vector<double> alpha(n, 0.0);
  double b = 0.0;
  Rng rng(params.seed);

  const auto decision = [&](std::size_t i) {
    double f = b;
    for (std::size_t j = 0; j < n; ++j)
      if (alpha[j] != 0.0) f += alpha[j] * y[j] * G[j][i];
    return f;
  };

  // Feasible bias interval implied by the KKT conditions at the current
  // alpha. Free support vectors pinch it to a point; its midpoint minimizes
  // the worst per-point violation when nothing pins the running bias.
  const auto bias_interval = [&]() {
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
      double g = 0.0;
      for (std::size_t j = 0; j < n; ++j)
        if (alpha[j] != 0.0) g += alpha[j] * y[j] * G[j][i];
      if (y[i] > 0) {
        if (alpha[i] < C) lo = std::max(lo, 1.0 - g);
        if (alpha[i] > 0.0) hi = std::min(hi, 1.0 - g);
      } else {
        if (alpha[i] < C) hi = std::min(hi, -1.0 - g);
        if (alpha[i] > 0.0) lo = std::max(lo, -1.0 - g);
      }
    }
    return std::pair<double, double>(lo, hi);
  };

  BinaryModel model;
  model.kernel = cfg;

  int blocked_passes = 0;
  int sweeps = 0;
  bool clean = false;
  while (sweeps < params.max_sweeps && blocked_passes < params.max_passes) {
    ++sweeps;
    std::size_t attempted = 0, changed = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const double Ei = decision(i) - y[i];
      const double r = y[i] * Ei;  // margin minus one
      const bool violates =
          (r < -params.tol && alpha[i] < C) || (r > params.tol && alpha[i] > 0.0);
      if (!violates) continue;
      ++attempted;

      const auto try_update = [&](std::size_t j) {
        const double Ej = decision(j) - y[j];
        const double ai_old = alpha[i], aj_old = alpha[j];

        double L, H;
        if (y[i] != y[j]) {
          L = std::max(0.0, aj_old - ai_old);
          H = std::min(C, C + aj_old - ai_old);
        } else {
          L = std::max(0.0, ai_old + aj_old - C);
          H = std::min(C, ai_old + aj_old);
        }
        if (L >= H) return false;

        const double eta = 2.0 * G[i][j] - G[i][i] - G[j][j];
        if (eta >= 0.0) return false;

        double aj = aj_old - y[j] * (Ei - Ej) / eta;
        aj = std::clamp(aj, L, H);
        if (std::abs(aj - aj_old) < params.min_alpha_step) return false;

        // Snap bound dust left by cancellation so a 1e-17 residual never
        // masquerades as a support vector or a phantom KKT violator.
        const double snap = 1e-12 * C;
        if (aj < snap) aj = 0.0;
        else if (aj > C - snap) aj = C;

        double ai = ai_old + y[i] * y[j] * (aj_old - aj);
        if (ai < snap) ai = 0.0;
        else if (ai > C - snap) ai = C;
        ai = std::clamp(ai, 0.0, C);
        alpha[i] = ai;
        alpha[j] = aj;

        const double b1 = b - Ei - y[i] * (ai - ai_old) * G[i][i] -
                          y[j] * (aj - aj_old) * G[i][j];
        const double b2 = b - Ej - y[i] * (ai - ai_old) * G[i][j] -
                          y[j] * (aj - aj_old) * G[j][j];
        if (ai > 0.0 && ai < C) b = b1;
        else if (aj > 0.0 && aj < C) b = b2;
        else b = 0.5 * (b1 + b2);
        return true;
      };

      // Random second index; if that pair cannot move, scan the remaining
      // candidates from the same random offset before giving up on i.
      const std::size_t offset = rng.uniform_int(n - 1);
      bool updated = false;
      for (std::size_t step = 0; step < n - 1 && !updated; ++step) {
        std::size_t j = (offset + step) % (n - 1);
        if (j >= i) ++j;
        updated = try_update(j);
      }
      if (!updated) continue;
      ++changed;

#ifndef NDEBUG
      double balance = 0.0;
      for (std::size_t k = 0; k < n; ++k) {
        assert(alpha[k] >= 0.0 && alpha[k] <= C);
        balance += alpha[k] * y[k];
      }
      assert(std::abs(balance) <= 1e-9 * (1.0 + C * static_cast<double>(n)));
#endif
      if (params.track_objective)
        model.objective_trace.push_back(detail::dual_objective(alpha, y, G));
    }
    if (attempted == 0) {
      clean = true;
      break;
    }
    if (changed == 0) {
      // A blocked sweep with an unpinned bias can manufacture phantom
      // violators; recenter the bias before charging a pass.
      const auto [lo, hi] = bias_interval();
      b = 0.5 * (lo + hi);
    }
    blocked_passes = changed == 0 ? blocked_passes + 1 : 0;
  }

  {
    const auto [lo, hi] = bias_interval();
    b = 0.5 * (lo + hi);
  }

  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double m = y[i] * decision(i);
    double v = 0.0;
    if (alpha[i] < C) v = std::max(v, 1.0 - m);
    if (alpha[i] > 0.0) v = std::max(v, m - 1.0);
    worst = std::max(worst, v);
  }
  model.max_kkt_violation = worst;
  model.converged = clean || worst <= params.tol;
  model.bias = b;
  for (std::size_t i = 0; i < n; ++i) {
    if (alpha[i] > 0.0) {
      model.support_vectors.push_back(X[i]);
      model.coeffs.push_back(alpha[i] * y[i]);
      model.sv_indices.push_back(i);
    }
  }
  return model;
}

struct MulticlassModel {
  KernelConfig kernel;
  double c = 1.0;
  uint64_t seed = 0;
  Standardizer standardizer;
  std::vector<BinaryModel> pairs;  // 6, (a, b) with a < b in label order
};

inline std::vector<double> to_row(const FeatureVector& v) {
  return std::vector<double>(v.values.begin(), v.values.end());
}

inline MulticlassModel train_multiclass(const FeatureSet& train,
                                        const KernelConfig& cfg,
                                        const SmoParams& params) {
  std::array<std::size_t, kNumClasses> counts{};
  for (Emotion e : train.labels) ++counts[static_cast<int>(e)];
  for (int l = 0; l < kNumClasses; ++l)
    if (counts[l] == 0)
      throw std::invalid_argument(std::string("train_multiclass: no '") +
                                  emotion_name(kEmotions[l]) +
                                  "' examples in the training set");

  MulticlassModel model;
  model.kernel = cfg;
  model.c = params.c;
  model.seed = params.seed;
  model.standardizer = fit_standardizer(train.features);

  std::vector<std::vector<double>> rows(train.size());
  for (std::size_t i = 0; i < train.size(); ++i)
    rows[i] = to_row(standardize(train.features[i], model.standardizer));

  for (int a = 0; a < kNumClasses; ++a) {
    for (int btag = a + 1; btag < kNumClasses; ++btag) {
      std::vector<std::vector<double>> X;
      std::vector<int> y;
      for (std::size_t i = 0; i < train.size(); ++i) {
        const int l = static_cast<int>(train.labels[i]);
        if (l != a && l != btag) continue;
        X.push_back(rows[i]);
        y.push_back(l == a ? 1 : -1);
      }
      SmoParams pair_params = params;
      pair_params.seed = mix_seed(mix_seed(params.seed, "smo-pair"),
                                  static_cast<uint64_t>(a * kNumClasses + btag));
      BinaryModel bm = smo_train_binary(X, y, cfg, pair_params);
      bm.label_a = kEmotions[a];
      bm.label_b = kEmotions[btag];
      model.pairs.push_back(std::move(bm));
    }
  }
  return model;
}

struct VoteResult {
  Emotion label = Emotion::Happy;
  std::array<int, kNumClasses> votes{};
  std::array<double, kNumClasses> margin{};  // sum of |score| over won duels
};

inline VoteResult predict_verbose(const MulticlassModel& model,
                                  const FeatureVector& x) {
  if (model.pairs.size() != 6)
    throw std::invalid_argument("predict: model must hold 6 pairwise SVMs");
  const std::vector<double> row = to_row(standardize(x, model.standardizer));
  VoteResult r;
  for (const BinaryModel& bm : model.pairs) {
    const double score = predict_binary(bm, std::span<const double>(row));
    const Emotion winner = score > 0.0 ? bm.label_a : bm.label_b;
    r.votes[static_cast<int>(winner)] += 1;
    r.margin[static_cast<int>(winner)] += std::abs(score);
  }
  // Strict comparisons keep the earliest (lowest quadrant) label on full ties.
  int best = 0;
  for (int l = 1; l < kNumClasses; ++l) {
    if (r.votes[l] > r.votes[best] ||
        (r.votes[l] == r.votes[best] && r.margin[l] > r.margin[best]))
      best = l;
  }
  r.label = kEmotions[best];
  return r;
}

inline Emotion predict(const MulticlassModel& model, const FeatureVector& x) {
  return predict_verbose(model, x).label;
}

}  // namespace eegemo
