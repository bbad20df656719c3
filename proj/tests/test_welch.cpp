#include "eegemo/welch.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <vector>

#include "eegemo/rng.hpp"

using namespace eegemo;

namespace {

std::vector<double> sinusoid(double freq_hz, double fs, std::size_t n,
                             double amplitude = 1.0) {
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i)
    out[i] = amplitude * std::sin(2.0 * std::numbers::pi * freq_hz *
                                  static_cast<double>(i) / fs);
  return out;
}

}  // namespace

TEST_CASE("welch_psd of a unit 10 Hz sinusoid integrates to its variance") {
  // Analytic sinusoid power A^2/2 = 0.5; 8 s at 256 Hz.
  const auto spec = welch_psd(sinusoid(10.0, 256.0, 2048), 256.0, {});
  REQUIRE(spec.freqs.size() == 257);
  REQUIRE(spec.resolution_hz() == Catch::Approx(0.5));
  const double alpha = integrate_spectrum(spec, 8.0, 12.0);
  REQUIRE(alpha == Catch::Approx(0.5).epsilon(0.05));
  const double total = integrate_spectrum(spec, 0.0, 128.0);
  REQUIRE(total == Catch::Approx(0.5).epsilon(0.05));
}

TEST_CASE("welch_psd of a zero signal is identically zero") {
  const std::vector<double> zeros(1024, 0.0);
  const auto spec = welch_psd(zeros, 256.0, {});
  for (double p : spec.power) REQUIRE(p == 0.0);
}

TEST_CASE("welch_psd satisfies Parseval on white noise") {
  Rng rng(7);
  std::vector<double> noise(2048);
  for (auto& v : noise) v = rng.normal();
  double mean = 0.0;
  for (double v : noise) mean += v;
  mean /= static_cast<double>(noise.size());
  double variance = 0.0;
  for (double v : noise) variance += (v - mean) * (v - mean);
  variance /= static_cast<double>(noise.size());

  const auto spec = welch_psd(noise, 256.0, {});
  const double total = integrate_spectrum(spec, 0.0, 128.0);
  REQUIRE(total == Catch::Approx(variance).epsilon(0.10));
}

TEST_CASE("welch_psd power is nonnegative and freqs ascend") {
  Rng rng(3);
  std::vector<double> noise(1500);
  for (auto& v : noise) v = rng.normal();
  const auto spec = welch_psd(noise, 256.0, {});
  for (double p : spec.power) REQUIRE(p >= 0.0);
  for (std::size_t k = 1; k < spec.freqs.size(); ++k)
    REQUIRE(spec.freqs[k] > spec.freqs[k - 1]);
}

TEST_CASE("welch_psd rejects too-short signals and bad specs") {
  const std::vector<double> sig(100, 1.0);
  REQUIRE_THROWS_AS(welch_psd(sig, 256.0, {}), std::length_error);
  WelchSpec bad;
  bad.overlap = 1.0;
  REQUIRE_THROWS_AS(welch_psd(std::vector<double>(1024, 0.0), 256.0, bad),
                    std::invalid_argument);
}

TEST_CASE("welch_psd handles non power-of-two segment lengths") {
  WelchSpec spec;
  spec.segment_len = 300;
  const auto sig = sinusoid(10.0, 256.0, 1200);
  const auto psd = welch_psd(sig, 256.0, spec);
  const double total = integrate_spectrum(psd, 0.0, 128.0);
  REQUIRE(total == Catch::Approx(0.5).epsilon(0.08));
}

TEST_CASE("integrate_spectrum rejects out-of-support ranges") {
  const auto spec = welch_psd(std::vector<double>(1024, 0.0), 256.0, {});
  REQUIRE_THROWS_AS(integrate_spectrum(spec, 130.0, 140.0), std::out_of_range);
  REQUIRE_THROWS_AS(integrate_spectrum(spec, 10.0, 10.1), std::out_of_range);
}
