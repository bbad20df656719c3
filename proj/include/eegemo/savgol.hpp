#pragma once

// Savitzky-Golay smoothing: local least-squares polynomial fit evaluated at
// the sample position. Interior samples use the center-point convolution
// weights; boundary samples re-fit over the first/last window and evaluate
// at the boundary position, so output length always equals input length.

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace eegemo {

struct SavGolSpec {
  int window_len = 11;
  int poly_order = 3;
};

inline void validate(const SavGolSpec& spec) {
  if (spec.window_len < 3 || spec.window_len % 2 == 0)
    throw std::invalid_argument("savgol: window_len must be odd and >= 3, got " +
                                std::to_string(spec.window_len));
  if (spec.poly_order < 0 || spec.poly_order >= spec.window_len)
    throw std::invalid_argument("savgol: poly_order must satisfy 0 <= order < window_len");
}

namespace detail {

// Gaussian elimination with partial pivoting; A is dense row-major n*n.
inline std::vector<double> solve_linear(std::vector<double> a,
                                        std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(a[r * n + col]) > std::abs(a[pivot * n + col])) pivot = r;
    if (a[pivot * n + col] == 0.0)
      throw std::runtime_error("solve_linear: singular system");
    if (pivot != col) {
      for (std::size_t c = 0; c < n; ++c)
        std::swap(a[col * n + c], a[pivot * n + c]);
      std::swap(b[col], b[pivot]);
    }
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = a[r * n + col] / a[col * n + col];
      if (f == 0.0) continue;
      for (std::size_t c = col; c < n; ++c) a[r * n + c] -= f * a[col * n + c];
      b[r] -= f * b[col];
    }
  }
  std::vector<double> x(n);
  for (std::size_t ri = n; ri-- > 0;) {
    double s = b[ri];
    for (std::size_t c = ri + 1; c < n; ++c) s -= a[ri * n + c] * x[c];
    x[ri] = s / a[ri * n + ri];
  }
  return x;
}

// Least-squares weights for evaluating the fitted polynomial at offset 0,
// given window sample positions relative to the evaluation point. Solves the
// normal equations G z = e0 with G[a][b] = sum_i p_i^(a+b), then
// w_i = sum_j z_j p_i^j.
inline std::vector<double> polyfit_eval_weights(const std::vector<double>& positions,
                                                int order) {
  const std::size_t terms = static_cast<std::size_t>(order) + 1;
  std::vector<double> moments(2 * order + 1, 0.0);
  for (double p : positions) {
    double v = 1.0;
    for (auto& m : moments) {
      m += v;
      v *= p;
    }
  }
  std::vector<double> gram(terms * terms);
  for (std::size_t a = 0; a < terms; ++a)
    for (std::size_t b = 0; b < terms; ++b) gram[a * terms + b] = moments[a + b];
  std::vector<double> rhs(terms, 0.0);
  rhs[0] = 1.0;
  const std::vector<double> z = solve_linear(std::move(gram), std::move(rhs));
  std::vector<double> weights(positions.size());
  for (std::size_t i = 0; i < positions.size(); ++i) {
    double v = 1.0, w = 0.0;
    for (std::size_t j = 0; j < terms; ++j) {
      w += z[j] * v;
      v *= positions[i];
    }
    weights[i] = w;
  }
  return weights;
}

}  // namespace detail

// Center-point convolution weights over positions -m..m. They sum to 1.
inline std::vector<double> savgol_coefficients(const SavGolSpec& spec) {
  validate(spec);
  const int m = spec.window_len / 2;
  std::vector<double> positions(spec.window_len);
  for (int i = 0; i < spec.window_len; ++i) positions[i] = i - m;
  return detail::polyfit_eval_weights(positions, spec.poly_order);
}

inline std::vector<double> savgol_smooth(const std::vector<double>& signal,
                                         const SavGolSpec& spec) {
  validate(spec);
  const std::size_t n = signal.size();
  const std::size_t w = static_cast<std::size_t>(spec.window_len);
  if (n < w)
    throw std::length_error("savgol: signal length " + std::to_string(n) +
                            " shorter than window " + std::to_string(w));
  const std::size_t m = w / 2;
  const std::vector<double> center = savgol_coefficients(spec);

  std::vector<double> out(n);
  for (std::size_t i = m; i + m < n; ++i) {
    double acc = 0.0;
    for (std::size_t k = 0; k < w; ++k) acc += center[k] * signal[i - m + k];
    out[i] = acc;
  }

  // Boundaries: fit over the first/last window, evaluate at the sample.
  std::vector<double> positions(w);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < w; ++j)
      positions[j] = static_cast<double>(j) - static_cast<double>(i);
    const auto weights = detail::polyfit_eval_weights(positions, spec.poly_order);
    double acc = 0.0;
    for (std::size_t j = 0; j < w; ++j) acc += weights[j] * signal[j];
    out[i] = acc;
  }
  for (std::size_t i = n - m; i < n; ++i) {
    const std::size_t start = n - w;
    for (std::size_t j = 0; j < w; ++j)
      positions[j] = static_cast<double>(start + j) - static_cast<double>(i);
    const auto weights = detail::polyfit_eval_weights(positions, spec.poly_order);
    double acc = 0.0;
    for (std::size_t j = 0; j < w; ++j) acc += weights[j] * signal[start + j];
    out[i] = acc;
  }
  return out;
}

}  // namespace eegemo
