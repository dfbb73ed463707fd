#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <vector>

#include "doctest.h"
#include "enclosure/indicator.hpp"
#include "enclosure/types.hpp"

using namespace enclosure;

namespace {
Ball ball(const Vec3& c, double r) {
  Ball b;
  b.center = c;
  b.radius = r;
  return b;
}

std::vector<double> log_grid(double lo, double hi, int n) {
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) {
    out[i] = lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1));
  }
  return out;
}

IndicatorCurve synthetic_curve(const std::vector<double>& taus, double logA,
                               double kappa, double power, double b) {
  IndicatorCurve c;
  c.tau = taus;
  for (const double t : taus) {
    c.value.push_back(LogScaled::from_log(
        logA - power * std::log(t) - kappa * t + b / t, 1));
    c.noise_floor.push_back(0.0);
  }
  c.source = "synthetic";
  return c;
}
}  // namespace

TEST_CASE("decay fit recovers the rate exactly on clean model data") {
  const auto taus = log_grid(8.0, 40.0, 16);
  const double kappa = 5.7359;
  const IndicatorCurve curve = synthetic_curve(taus, 2.0, kappa, 4.0, 0.0);
  const DecayFit fit = decay_fit(curve, 4.0);
  CHECK(fit.rate == doctest::Approx(kappa).epsilon(1e-10));
  CHECK(fit.window_end - fit.window_begin >= 12);
  CHECK(fit.uncertainty < 0.1);

  // ignoring the tau^-4 prefactor biases the plain slope by ~ power/tau
  const DecayFit biased = decay_fit(curve, 0.0);
  CHECK(biased.rate > kappa + 0.05);
}

TEST_CASE("refined fit removes the 1/tau correction bias") {
  const auto taus = log_grid(8.0, 40.0, 16);
  const double kappa = 5.7359;
  const IndicatorCurve curve = synthetic_curve(taus, 2.0, kappa, 4.0, 2.0);
  const DecayFit plain = decay_fit(curve, 4.0);
  const DecayFit refined = decay_fit_refined(curve, 4.0);
  CHECK(refined.rate == doctest::Approx(kappa).epsilon(1e-9));
  CHECK(std::fabs(plain.rate - kappa) > 1e-3);  // visible bias
  CHECK(std::fabs(refined.rate - kappa) < std::fabs(plain.rate - kappa));
}

TEST_CASE("noise floor truncates the usable window") {
  const auto taus = log_grid(4.0, 40.0, 20);
  IndicatorCurve curve = synthetic_curve(taus, 0.0, 3.0, 4.0, 0.0);
  // declare a noise floor that swamps the tail
  for (std::size_t i = 0; i < curve.tau.size(); ++i) {
    curve.noise_floor[i] = 1e-30;
  }
  const DecayFit fit = decay_fit(curve, 4.0);
  CHECK(fit.window_end < static_cast<int>(taus.size()));
  CHECK(fit.rate == doctest::Approx(3.0).epsilon(1e-6));
}

TEST_CASE("too few usable samples raise a numeric error") {
  const auto taus = log_grid(4.0, 8.0, 5);
  const IndicatorCurve curve = synthetic_curve(taus, 0.0, 3.0, 4.0, 0.0);
  CHECK_THROWS_AS(decay_fit(curve, 4.0), NumericError);
}

TEST_CASE("scaled limit: plateau detection and divergence flag") {
  const auto taus = log_grid(8.0, 60.0, 24);
  const double kappa = 2.5, Lstar = 0.025;
  IndicatorCurve curve;
  curve.tau = taus;
  curve.source = "synthetic";
  for (const double t : taus) {
    const double L = Lstar * (1.0 + 3.0 / t);
    curve.value.push_back(LogScaled::from_log(
        std::log(L) - 4.0 * std::log(t) - kappa * t, 1));
    curve.noise_floor.push_back(0.0);
  }
  const ScaledLimit lim = scaled_limit(curve, kappa, 4.0);
  CHECK(!lim.diverging);
  CHECK(lim.estimate == doctest::Approx(Lstar).epsilon(1e-3));
  // a 2% error in kappa is flagged as divergence
  const ScaledLimit bad = scaled_limit(curve, kappa * 1.02, 4.0);
  CHECK(bad.diverging);
}

TEST_CASE("semianalytic indicator: positive, decaying, fit near the rate") {
  const ObstacleShape D = ObstacleShape::make_sphere(Vec3::Zero(), 1.0);
  const Ball B = ball(Vec3(4.0, 0.0, 0.0), 0.5);
  const Ball Bp = ball(Vec3(0.0, 4.0, 0.0), 0.5);
  const double kappa = 2.0 * std::sqrt(17.0 - 4.0 * std::sqrt(2.0)) - 1.0;
  const auto taus = log_grid(8.0, 40.0, 12);
  const IndicatorCurve curve = semianalytic_indicator(D, B, Bp, taus);
  REQUIRE(curve.tau.size() == taus.size());
  for (std::size_t i = 0; i < curve.value.size(); ++i) {
    CHECK(curve.value[i].sign == 1);
    if (i > 0) CHECK(curve.value[i].log_abs < curve.value[i - 1].log_abs);
  }
  const DecayFit fit = decay_fit_refined(curve, 4.0);
  CHECK(std::fabs(fit.rate - kappa) / kappa < 5e-3);
}

TEST_CASE("csv round trip preserves the curve bit-exactly") {
  const auto taus = log_grid(5.0, 25.0, 9);
  const IndicatorCurve curve = synthetic_curve(taus, 1.3, 4.2, 4.0, 0.7);
  const std::string path = "test_indicator_roundtrip.csv";
  write_indicator_csv(path, curve);
  const IndicatorCurve back = read_indicator_csv(path);
  REQUIRE(back.tau.size() == curve.tau.size());
  for (std::size_t i = 0; i < curve.tau.size(); ++i) {
    CHECK(back.tau[i] == curve.tau[i]);
    CHECK(back.value[i].log_abs == curve.value[i].log_abs);
    CHECK(back.value[i].sign == curve.value[i].sign);
  }
  CHECK(back.source == curve.source);
  // determinism: writing again produces identical bytes
  const std::string path2 = "test_indicator_roundtrip_2.csv";
  write_indicator_csv(path2, curve);
  std::ifstream a(path, std::ios::binary), b(path2, std::ios::binary);
  const std::string sa((std::istreambuf_iterator<char>(a)),
                       std::istreambuf_iterator<char>());
  const std::string sb((std::istreambuf_iterator<char>(b)),
                       std::istreambuf_iterator<char>());
  CHECK(sa == sb);
  CHECK(!sa.empty());
  std::filesystem::remove(path);
  std::filesystem::remove(path2);
}

TEST_CASE("fit report json carries rate, window, and provenance") {
  const auto taus = log_grid(8.0, 40.0, 16);
  const IndicatorCurve curve = synthetic_curve(taus, 2.0, 5.7, 4.0, 0.0);
  const DecayFit fit = decay_fit(curve, 4.0);
  const std::string rep = fit_report_json(fit, curve);
  CHECK(rep.find("\"rate\"") != std::string::npos);
  CHECK(rep.find("\"uncertainty\"") != std::string::npos);
  CHECK(rep.find("\"source\"") != std::string::npos);
  CHECK(rep.find("synthetic") != std::string::npos);
}
