#pragma once

#include <string>
#include <vector>

#include "enclosure/log_scaled.hpp"
#include "enclosure/obstacle.hpp"
#include "enclosure/potentials.hpp"
#include "enclosure/types.hpp"
#include "enclosure/wavesim.hpp"

namespace enclosure {

// Indicator samples I(tau); the value decays like C(tau) e^{-tau (c - eta -
// eta')} where c is the shortest broken path over the obstacle boundary.
struct IndicatorCurve {
  std::vector<double> tau;
  std::vector<LogScaled> value;
  std::vector<double> noise_floor;  // absolute scale of data noise (0: exact)
  std::string source;               // "semianalytic" | "fdtd" | ...
};

// Closed-data route: I := 2 J with the boundary representation of J.
IndicatorCurve semianalytic_indicator(const ObstacleShape& D, const Ball& B,
                                      const Ball& B_prime,
                                      const std::vector<double>& taus,
                                      const JOptions& opts = {});

// Wave-data route.  indicator_value compares the recorded field against the
// exact free-space pairing; the paired variant differences two runs on the
// same grid, cancelling the shared discretization error.
double indicator_value(const ReceiverTrace& obstacle_run, const Ball& B,
                       const Ball& B_prime, double tau);
IndicatorCurve fdtd_indicator(const ReceiverTrace& obstacle_run,
                              const ReceiverTrace& free_run, const Ball& B,
                              const Ball& B_prime,
                              const std::vector<double>& taus);

// Regression of -log I(tau) on tau over the longest usable prefix (positive,
// log-decreasing, above the noise floor).  Throws NumericError when fewer
// than 8 samples qualify.
struct DecayFit {
  double rate = 0.0;         // decay rate estimate (c - eta - eta')
  double uncertainty = 0.0;  // delta on the rate
  double intercept = 0.0;    // fitted log-prefactor
  int window_begin = 0;      // first sample used
  int window_end = 0;        // one past the last sample used
  double pointwise_spread = 0.0;   // spread of -log I / tau (diagnostic)
  double pairwise_spread = 0.0;    // spread of consecutive slopes (diagnostic)
  double regression_stderr = 0.0;  // slope standard error
  double drift = 0.0;              // upper-window slope drift
};
// prefactor_power compensates a known algebraic prefactor: the regression
// runs on log(tau^power I), removing the power/tau bias from the slope.
// Indicator curves of this method carry power 4.
DecayFit decay_fit(const IndicatorCurve& curve, double prefactor_power = 0.0);

// Rate fit with the leading finite-tau correction modeled explicitly:
// log(tau^power I) = intercept - rate tau + b / tau.  Removes the O(1/tau^2)
// slope bias of the plain fit; use when the rate feeds an exponential
// rescaling (curvature extraction) where ~1e-3 absolute matters.
DecayFit decay_fit_refined(const IndicatorCurve& curve,
                           double prefactor_power = 0.0);

// Scaled limit L(tau) = tau^power e^{tau kappa} I(tau) -> L*.  The estimate
// is the A of a least-squares A + B/tau tail fit; a plateau, when present,
// is reported as a cross-check.  The diverging flag fires when the tail of
// log L still has a significant slope (kappa off by ~1% is plainly visible).
struct ScaledLimit {
  double estimate = 0.0;
  double extrapolated = 0.0;
  double plateau_value = 0.0;
  bool plateau_found = false;
  bool diverging = false;
  double tail_slope = 0.0;
  int window_begin = 0;
  int window_end = 0;
};
ScaledLimit scaled_limit(const IndicatorCurve& curve, double kappa,
                         double power);

// CSV with the exact column set "tau,log_indicator,sign,source".
void write_indicator_csv(const std::string& path,
                         const IndicatorCurve& curve);
IndicatorCurve read_indicator_csv(const std::string& path);

// Deterministic JSON fit report (rate, uncertainty, window, diagnostics).
std::string fit_report_json(const DecayFit& fit, const IndicatorCurve& curve);

}  // namespace enclosure
