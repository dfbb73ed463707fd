#pragma once

#include <cstddef>

#include "enclosure/geometry.hpp"
#include "enclosure/log_scaled.hpp"
#include "enclosure/obstacle.hpp"
#include "enclosure/quadrature.hpp"
#include "enclosure/types.hpp"

namespace enclosure {

// All potentials here are Laplace transforms (parameter tau > 0) of free
// waves emitted by ball-shaped initial velocity profiles: v solves
// (Delta - tau^2) v = -chi_B on R^3, i.e.
//   v(x) = int_B e^{-tau|x-y|} / (4 pi |x-y|) dy.

// Shape factor M(a) = a cosh(a) - sinh(a) and its stable logarithm.
double yukawa_shape_factor(double a);
double log_yukawa_shape_factor(double a);

// Closed form of v (interior and exterior, C^1 across the ball boundary).
double yukawa_ball(const Vec3& x, const Ball& B, double tau);
Vec3 yukawa_ball_gradient(const Vec3& x, const Ball& B, double tau);
LogScaled yukawa_ball_log(const Vec3& x, const Ball& B, double tau);
// Directional derivative grad v . dir in log-scaled form (x outside B).
LogScaled yukawa_ball_dirderiv_log(const Vec3& x, const Vec3& dir,
                                   const Ball& B, double tau);

// int_{B'} v_B dx for disjoint balls (closed form, symmetric in B, B').
double ball_ball_integral(const Ball& B, const Ball& B_prime, double tau);
LogScaled ball_ball_integral_log(const Ball& B, const Ball& B_prime,
                                 double tau);

// int_B v_B dx (self pairing, used by monostatic data).
double ball_self_integral(const Ball& B, double tau);
LogScaled ball_self_integral_log(const Ball& B, double tau);

struct JOptions {
  double rel_tol = 1e-5;        // adaptive refinement target
  int base_level = 2;           // icosphere seed level for analytic shapes
  std::size_t max_leaves = 250000;
  int radial_cells = 6;         // pencil rule (volume route only)
  int radial_order = 8;
};

struct JResult {
  LogScaled value;
  double est_rel_error = 0.0;
  long long evaluations = 0;
  bool converged = false;
};

// Reflection functional J for ball sources f = chi_B, g = chi_{B'}:
// boundary route int_{dD} (dv_f/dnu) v_g dS and volume route
// int_D (grad v_f . grad v_g + tau^2 v_f v_g) dx.  They agree when both
// balls stay clear of the obstacle.
JResult j_boundary(const ObstacleShape& D, const Ball& B, const Ball& B_prime,
                   double tau, const JOptions& opts = {});
JResult j_volume(const ObstacleShape& D, const Ball& B, const Ball& B_prime,
                 double tau, const JOptions& opts = {});

// F(tau) = int_{dD} [(p-x).nu / (|x-p|^2 |x-p'|)] (1 + 1/(tau|x-p|))
//          e^{-tau phi(x; p, p')} dS,
// the surface integral whose scaled limit is the reflection sum.
JResult reflection_surface_integral(const ObstacleShape& D, const Vec3& p,
                                    const Vec3& p_prime, double tau,
                                    const JOptions& opts = {});

struct KernelExpansion {
  LogScaled leading;           // closed leading term of J for ball data
  LogScaled boundary_exact;    // exact boundary route (if requested)
  bool outside_regime = false; // tau <= 1/eta or 1/eta': expansion invalid
  double est_rel_error = 0.0;
};
KernelExpansion j_kernel_expansion(const ObstacleShape& D, const Ball& B,
                                   const Ball& B_prime, double tau,
                                   bool with_exact = false,
                                   const JOptions& opts = {});

// Angular positivity constants: infimum over the obstacle of
// 1 + cos(angle subtended at x by the two sources).  c_points uses the ball
// centers; c_balls the worst pair of points inside the balls.
struct CdConstants {
  double c_points = 0.0;
  double c_balls = 0.0;
  bool valid = false;  // false when a ball touches the obstacle
};
CdConstants c_d_constants(const ObstacleShape& D, const Ball& B,
                          const Ball& B_prime);

enum class AsymptoticKind {
  reflection_sum,    // lim tau e^{tau c_min} F(tau)
  scaled_indicator,  // lim tau^4 e^{tau kappa} 2J, kappa = c_min - eta - eta'
  monostatic,        // scaled_indicator with coincident source/receiver
  shifted,           // scaled_indicator for the shifted receiver sub-ball
};
double asymptotic_rhs(AsymptoticKind kind, const ObstacleShape& D,
                      const Ball& B, const Ball& B_prime, double s = 0.0);

// Invert the shifted-limit amplitude L = (pi/2)(eta/r)((eta'-s)/(r'-s)) /
// sqrt(det) for det.
double det_from_shifted_limit(double limit_value, double eta,
                              double eta_prime, double r, double r_prime,
                              double s);

}  // namespace enclosure
