#include "enclosure/indicator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include <Eigen/Dense>

#include "json.hpp"

namespace enclosure {

IndicatorCurve semianalytic_indicator(const ObstacleShape& D, const Ball& B,
                                      const Ball& B_prime,
                                      const std::vector<double>& taus,
                                      const JOptions& opts) {
  IndicatorCurve curve;
  curve.source = "semianalytic";
  curve.tau = taus;
  curve.noise_floor.assign(taus.size(), 0.0);
  curve.value.reserve(taus.size());
  for (const double tau : taus) {
    const JResult j = j_boundary(D, B, B_prime, tau, opts);
    curve.value.push_back(2.0 * j.value);
  }
  return curve;
}

double indicator_value(const ReceiverTrace& obstacle_run, const Ball& B,
                       const Ball& B_prime, double tau) {
  const std::vector<double> taus{tau};
  const double q = receiver_functional(obstacle_run, taus, &B,
                                       2.0 * obstacle_run.h)[0];
  return ball_ball_integral(B, B_prime, tau) - q;
}

IndicatorCurve fdtd_indicator(const ReceiverTrace& obstacle_run,
                              const ReceiverTrace& free_run, const Ball& B,
                              const Ball& B_prime,
                              const std::vector<double>& taus) {
  if (obstacle_run.n_receivers() != free_run.n_receivers() ||
      std::fabs(obstacle_run.dt - free_run.dt) > 1e-15 ||
      obstacle_run.n_samples != free_run.n_samples) {
    throw PreconditionError(
        "paired runs disagree in grid or sampling; rerun both on one grid");
  }
  const double margin = 2.0 * obstacle_run.h;
  const auto q_obst = receiver_functional(obstacle_run, taus, &B, margin);
  const auto q_free = receiver_functional(free_run, taus, &B, margin);
  IndicatorCurve curve;
  curve.source = "fdtd";
  curve.tau = taus;
  for (std::size_t i = 0; i < taus.size(); ++i) {
    curve.value.push_back(LogScaled::from_value(q_free[i] - q_obst[i]));
    // The two runs share grid, stencil, and source, so the direct wave and
    // its dispersion error cancel bitwise in the difference; what limits the
    // difference is the accumulated rounding of the two quadratures.
    curve.noise_floor.push_back(1e-12 *
                                (std::fabs(q_free[i]) + std::fabs(q_obst[i])));
  }
  return curve;
}

// ------------------------------------------------------------------ fits --

namespace {

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;
};

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y,
                 std::size_t begin, std::size_t end) {
  const std::size_t n = end - begin;
  double sx = 0.0, sy = 0.0;
  for (std::size_t i = begin; i < end; ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = begin; i < end; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  if (n > 2) {
    double ss = 0.0;
    for (std::size_t i = begin; i < end; ++i) {
      const double r = y[i] - (f.intercept + f.slope * x[i]);
      ss += r * r;
    }
    f.slope_stderr = std::sqrt(ss / ((n - 2.0) * sxx));
  }
  return f;
}

// Longest prefix of samples that are positive, above the noise floor, and
// log-decreasing.
std::size_t usable_prefix(const IndicatorCurve& curve) {
  std::size_t k = 0;
  double prev = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < curve.tau.size(); ++i) {
    const LogScaled& v = curve.value[i];
    if (v.sign <= 0) break;
    if (!curve.noise_floor.empty() && curve.noise_floor[i] > 0.0 &&
        v.log_abs < std::log(3.0 * curve.noise_floor[i])) {
      break;
    }
    if (!(v.log_abs < prev)) break;
    prev = v.log_abs;
    k = i + 1;
  }
  return k;
}

}  // namespace

DecayFit decay_fit(const IndicatorCurve& curve, double prefactor_power) {
  if (curve.tau.size() < 8) {
    throw NumericError("indicator fit needs at least 8 samples");
  }
  for (std::size_t i = 1; i < curve.tau.size(); ++i) {
    if (!(curve.tau[i] > curve.tau[i - 1])) {
      throw PreconditionError("tau grid must be strictly increasing");
    }
  }
  const std::size_t k = usable_prefix(curve);
  if (k < 8) {
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "only %zu usable indicator samples (need 8): data "
                  "non-positive, non-decreasing, or noise-dominated",
                  k);
    throw NumericError(buf);
  }
  std::vector<double> logv(k);
  for (std::size_t i = 0; i < k; ++i) {
    logv[i] = curve.value[i].log_abs +
              prefactor_power * std::log(curve.tau[i]);
  }

  const LineFit full = fit_line(curve.tau, logv, 0, k);
  const LineFit upper = fit_line(curve.tau, logv, k / 2, k);

  DecayFit fit;
  fit.rate = -full.slope;
  fit.intercept = full.intercept;
  fit.window_begin = 0;
  fit.window_end = static_cast<int>(k);
  fit.regression_stderr = full.slope_stderr;
  fit.drift = std::fabs(upper.slope - full.slope);

  double pmin = std::numeric_limits<double>::infinity(), pmax = -pmin;
  for (std::size_t i = 0; i < k; ++i) {
    const double p = -logv[i] / curve.tau[i];
    pmin = std::min(pmin, p);
    pmax = std::max(pmax, p);
  }
  fit.pointwise_spread = pmax - pmin;

  double smin = std::numeric_limits<double>::infinity(), smax = -smin;
  for (std::size_t i = 1; i < k; ++i) {
    const double s =
        -(logv[i] - logv[i - 1]) / (curve.tau[i] - curve.tau[i - 1]);
    smin = std::min(smin, s);
    smax = std::max(smax, s);
  }
  fit.pairwise_spread = smax - smin;

  fit.uncertainty = std::max(2.0 * std::max(fit.regression_stderr, fit.drift),
                             1e-2 * std::fabs(fit.rate));
  return fit;
}

DecayFit decay_fit_refined(const IndicatorCurve& curve,
                           double prefactor_power) {
  DecayFit fit = decay_fit(curve, prefactor_power);
  const std::size_t k = static_cast<std::size_t>(fit.window_end);

  struct Model {
    Eigen::Vector3d coef;
    double rate_stderr;
  };
  auto solve = [&](std::size_t begin, std::size_t end) {
    const Eigen::Index n = static_cast<Eigen::Index>(end - begin);
    Eigen::MatrixXd A(n, 3);
    Eigen::VectorXd y(n);
    for (std::size_t i = begin; i < end; ++i) {
      const double tau = curve.tau[i];
      const Eigen::Index row = static_cast<Eigen::Index>(i - begin);
      A(row, 0) = 1.0;
      A(row, 1) = -tau;
      A(row, 2) = 1.0 / tau;
      y(row) = curve.value[i].log_abs + prefactor_power * std::log(tau);
    }
    const Eigen::Vector3d c = A.colPivHouseholderQr().solve(y);
    double stderr_rate = 0.0;
    if (n > 3) {
      const double sigma2 = (y - A * c).squaredNorm() / double(n - 3);
      const Eigen::Matrix3d cov = (A.transpose() * A).inverse() * sigma2;
      stderr_rate = std::sqrt(std::max(0.0, cov(1, 1)));
    }
    return Model{c, stderr_rate};
  };

  const Model full = solve(0, k);
  const Model upper = solve(k / 2, k);
  fit.rate = full.coef(1);
  fit.intercept = full.coef(0);
  fit.regression_stderr = full.rate_stderr;
  fit.drift = std::fabs(upper.coef(1) - full.coef(1));
  fit.uncertainty = std::max(2.0 * std::max(fit.regression_stderr, fit.drift),
                             1e-3 * std::fabs(fit.rate));
  return fit;
}

ScaledLimit scaled_limit(const IndicatorCurve& curve, double kappa,
                         double power) {
  const std::size_t k = usable_prefix(curve);
  if (k < 4) {
    throw NumericError(
        "scaled limit needs at least 4 usable indicator samples");
  }
  std::vector<double> L(k), logL(k);
  for (std::size_t i = 0; i < k; ++i) {
    const double tau = curve.tau[i];
    const LogScaled scaled =
        log_exp(power * std::log(tau) + kappa * tau) * curve.value[i];
    L[i] = scaled.value();
    logL[i] = scaled.log_abs;
  }

  ScaledLimit out;
  out.window_begin = 0;
  out.window_end = static_cast<int>(k);

  // Plateau: longest window with relative max/min spread below 2%.
  std::size_t best_len = 0, best_i = 0, best_j = 0;
  for (std::size_t i = 0; i < k; ++i) {
    double lo = L[i], hi = L[i];
    for (std::size_t j = i + 1; j < k; ++j) {
      lo = std::min(lo, L[j]);
      hi = std::max(hi, L[j]);
      if (!(lo > 0.0) || hi / lo - 1.0 > 0.02) break;
      if (j - i + 1 > best_len) {
        best_len = j - i + 1;
        best_i = i;
        best_j = j;
      }
    }
  }
  if (best_len >= 4) {
    out.plateau_found = true;
    double sum = 0.0;
    for (std::size_t i = best_i; i <= best_j; ++i) sum += L[i];
    out.plateau_value = sum / best_len;
  }

  // Tail extrapolation L = A + B / tau over the upper half.
  const std::size_t half = k / 2;
  std::vector<double> inv_tau(k);
  for (std::size_t i = 0; i < k; ++i) inv_tau[i] = 1.0 / curve.tau[i];
  const LineFit tail = fit_line(inv_tau, L, half, k);
  out.extrapolated = tail.intercept;

  const LineFit drift = fit_line(curve.tau, logL, half, k);
  out.tail_slope = drift.slope;
  out.diverging = std::fabs(drift.slope) > 0.015;

  out.estimate = out.extrapolated;
  return out;
}

// -------------------------------------------------------------------- IO --

void write_indicator_csv(const std::string& path,
                         const IndicatorCurve& curve) {
  std::ofstream out(path);
  if (!out) throw PreconditionError("cannot write CSV: " + path);
  out << "tau,log_indicator,sign,source\n";
  char buf[128];
  for (std::size_t i = 0; i < curve.tau.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%d,%s\n", curve.tau[i],
                  curve.value[i].log_abs, curve.value[i].sign,
                  curve.source.c_str());
    out << buf;
  }
}

IndicatorCurve read_indicator_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw PreconditionError("cannot open CSV: " + path);
  std::string line;
  if (!std::getline(in, line) || line != "tau,log_indicator,sign,source") {
    throw PreconditionError("bad CSV header in " + path);
  }
  IndicatorCurve curve;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ss(line);
    double tau, logv;
    int sign;
    std::string source;
    if (!(ss >> tau >> logv >> sign >> source)) {
      throw PreconditionError("bad CSV row in " + path + ": " + line);
    }
    curve.tau.push_back(tau);
    curve.value.push_back(sign == 0 ? LogScaled::zero()
                                    : LogScaled::from_log(logv, sign));
    curve.noise_floor.push_back(0.0);
    curve.source = source;
  }
  return curve;
}

std::string fit_report_json(const DecayFit& fit, const IndicatorCurve& curve) {
  nlohmann::json j;
  j["rate"] = fit.rate;
  j["uncertainty"] = fit.uncertainty;
  j["intercept"] = fit.intercept;
  j["window"] = {
      {"begin", fit.window_begin},
      {"end", fit.window_end},
      {"tau_lo", curve.tau.empty() ? 0.0 : curve.tau[fit.window_begin]},
      {"tau_hi",
       curve.tau.empty() ? 0.0 : curve.tau[fit.window_end - 1]}};
  j["diagnostics"] = {{"pointwise_spread", fit.pointwise_spread},
                      {"pairwise_spread", fit.pairwise_spread},
                      {"regression_stderr", fit.regression_stderr},
                      {"drift", fit.drift}};
  j["source"] = curve.source;
  j["samples"] = curve.tau.size();
  return j.dump(2) + "\n";
}

}  // namespace enclosure
