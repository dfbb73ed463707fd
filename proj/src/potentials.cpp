#include "enclosure/potentials.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <vector>

namespace enclosure {

namespace {

void require_positive_tau(double tau) {
  if (!(tau > 0.0)) {
    throw PreconditionError("Laplace parameter tau must be positive");
  }
}

// Distance from the ball surface to the obstacle must stay positive for the
// closed exterior forms to apply on all of D.
void require_ball_clear(const ObstacleShape& D, const Ball& B,
                        const char* role) {
  const double gap = D.solid_distance(B.center) - B.radius;
  if (!(gap > 0.0)) {
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "%s ball touches the obstacle (clearance %.3g <= 0); the "
                  "exterior closed forms do not apply",
                  role, gap);
    throw PreconditionError(buf);
  }
}

double sinhc(double a) {  // sinh(a)/a
  if (std::fabs(a) < 1e-4) {
    const double a2 = a * a;
    return 1.0 + a2 / 6.0 * (1.0 + a2 / 20.0);
  }
  return std::sinh(a) / a;
}

}  // namespace

double yukawa_shape_factor(double a) {
  if (std::fabs(a) < 0.5) {
    // M(a) = sum_{k>=1} a^{2k+1} (2k) / (2k+1)!; term ratio
    // t_{k+1}/t_k = a^2 (k+1) / (k (2k+2)(2k+3)).
    const double a2 = a * a;
    double term = a * a2 / 3.0;
    double sum = 0.0;
    for (int k = 1; k <= 9; ++k) {
      sum += term;
      term *= a2 * (k + 1.0) / (k * (2.0 * k + 2.0) * (2.0 * k + 3.0));
    }
    return sum;
  }
  return a * std::cosh(a) - std::sinh(a);
}

double log_yukawa_shape_factor(double a) {
  a = std::fabs(a);
  if (a < 0.5) return std::log(yukawa_shape_factor(a));
  if (a > 30.0) {
    // M(a) = e^a (a-1)/2 + e^{-a}(a+1)/2; second term below 1e-26 relative.
    return a + std::log(0.5 * (a - 1.0));
  }
  return std::log(a * std::cosh(a) - std::sinh(a));
}

double yukawa_ball(const Vec3& x, const Ball& B, double tau) {
  require_positive_tau(tau);
  const double eta = B.radius;
  const double r = (x - B.center).norm();
  const double t3 = tau * tau * tau;
  if (r >= eta) {
    return std::exp(-tau * r) * yukawa_shape_factor(tau * eta) / (t3 * r);
  }
  const double damp = (1.0 + tau * eta) * std::exp(-tau * eta);
  return (1.0 - damp * sinhc(tau * r)) / (tau * tau);
}

Vec3 yukawa_ball_gradient(const Vec3& x, const Ball& B, double tau) {
  require_positive_tau(tau);
  const double eta = B.radius;
  const Vec3 dx = x - B.center;
  const double r = dx.norm();
  if (r < 1e-14 * std::max(eta, 1.0)) return Vec3::Zero();
  const double t3 = tau * tau * tau;
  double dvdr;
  if (r >= eta) {
    dvdr = -std::exp(-tau * r) * (1.0 + tau * r) *
           yukawa_shape_factor(tau * eta) / (t3 * r * r);
  } else {
    dvdr = -(1.0 + tau * eta) * std::exp(-tau * eta) *
           yukawa_shape_factor(tau * r) / (t3 * r * r);
  }
  return (dvdr / r) * dx;
}

LogScaled yukawa_ball_log(const Vec3& x, const Ball& B, double tau) {
  require_positive_tau(tau);
  const double eta = B.radius;
  const double r = (x - B.center).norm();
  if (r >= eta) {
    return LogScaled::from_log(-tau * r + log_yukawa_shape_factor(tau * eta) -
                               3.0 * std::log(tau) - std::log(r));
  }
  return LogScaled::from_value(yukawa_ball(x, B, tau));
}

LogScaled yukawa_ball_dirderiv_log(const Vec3& x, const Vec3& dir,
                                   const Ball& B, double tau) {
  require_positive_tau(tau);
  const double eta = B.radius;
  const Vec3 dx = x - B.center;
  const double r = dx.norm();
  if (r < eta) {
    return LogScaled::from_value(yukawa_ball_gradient(x, B, tau).dot(dir));
  }
  const double radial = dx.dot(dir) / r;  // carries the sign
  const LogScaled mag = LogScaled::from_log(
      -tau * r + std::log1p(tau * r) + log_yukawa_shape_factor(tau * eta) -
      3.0 * std::log(tau) - 2.0 * std::log(r));
  return LogScaled::from_value(-radial) * mag;
}

double ball_ball_integral(const Ball& B, const Ball& B_prime, double tau) {
  return ball_ball_integral_log(B, B_prime, tau).value();
}

LogScaled ball_ball_integral_log(const Ball& B, const Ball& B_prime,
                                 double tau) {
  require_positive_tau(tau);
  const double d = (B.center - B_prime.center).norm();
  if (!(d > B.radius + B_prime.radius)) {
    char buf[128];
    std::snprintf(buf, sizeof(buf),
                  "balls overlap: center distance %.6g <= radius sum %.6g",
                  d, B.radius + B_prime.radius);
    throw PreconditionError(buf);
  }
  return LogScaled::from_log(
      std::log(4.0 * kPi) + log_yukawa_shape_factor(tau * B.radius) +
      log_yukawa_shape_factor(tau * B_prime.radius) - tau * d -
      6.0 * std::log(tau) - std::log(d));
}

double ball_self_integral(const Ball& B, double tau) {
  require_positive_tau(tau);
  const double a = tau * B.radius;
  double bracket;
  if (a < 0.1) {
    const double c[] = {2.0 / 15.0, -1.0 / 9.0, 2.0 / 35.0, -1.0 / 45.0,
                        4.0 / 567.0, -1.0 / 525.0};
    double pw = a * a * a * a * a;
    bracket = 0.0;
    for (double ck : c) {
      bracket += ck * pw;
      pw *= a;
    }
  } else {
    // a^3/3 - (1+a) e^{-a} M(a) = a^3/3 - (a^2-1)/2 - (1+a)^2 e^{-2a}/2
    bracket = a * a * a / 3.0 - 0.5 * (a * a - 1.0) -
              0.5 * (1.0 + a) * (1.0 + a) * std::exp(-2.0 * a);
  }
  const double t5 = std::pow(tau, 5);
  return 4.0 * kPi * bracket / t5;
}

LogScaled ball_self_integral_log(const Ball& B, double tau) {
  return LogScaled::from_value(ball_self_integral(B, tau));
}

// ------------------------------------------------------------- J routes --

namespace {

JResult from_adaptive(const AdaptiveResult& r) {
  return JResult{r.value, r.est_rel_error, r.evaluations, r.converged};
}

AdaptiveOptions adaptive_options(const JOptions& opts) {
  AdaptiveOptions ao;
  ao.rel_tol = opts.rel_tol;
  ao.max_leaves = static_cast<int>(opts.max_leaves);
  return ao;
}

}  // namespace

JResult j_boundary(const ObstacleShape& D, const Ball& B, const Ball& B_prime,
                   double tau, const JOptions& opts) {
  require_positive_tau(tau);
  require_ball_clear(D, B, "source");
  require_ball_clear(D, B_prime, "receiver");
  const auto tris = D.param_triangles(opts.base_level);
  const PatchMap map = D.surface_map();
  const Ball Bf = B, Bg = B_prime;
  LogDensity f = [&Bf, &Bg, tau](const PatchSample& s) -> LogScaled {
    return yukawa_ball_dirderiv_log(s.x, s.nu, Bf, tau) *
           yukawa_ball_log(s.x, Bg, tau);
  };
  return from_adaptive(adaptive_patch_integrate(tris, map, f,
                                                adaptive_options(opts)));
}

JResult j_volume(const ObstacleShape& D, const Ball& B, const Ball& B_prime,
                 double tau, const JOptions& opts) {
  require_positive_tau(tau);
  require_ball_clear(D, B, "source");
  require_ball_clear(D, B_prime, "receiver");
  const auto tris = D.param_triangles(opts.base_level);
  const PatchMap map = D.pencil_map();
  const RadialRule rad = graded_radial_rule(opts.radial_cells,
                                            opts.radial_order);
  const Vec3 origin = D.center();
  const Vec3 pf = B.center, pg = B_prime.center;
  const double t2 = tau * tau;
  const Ball Bf = B, Bg = B_prime;

  LogDensity f = [&](const PatchSample& s) -> LogScaled {
    LogAccumulator acc;
    for (std::size_t i = 0; i < rad.rho.size(); ++i) {
      const double rho = rad.rho[i];
      const Vec3 x = origin + rho * s.x;
      const Vec3 df = x - pf, dg = x - pg;
      const double rf = df.norm(), rg = dg.norm();
      const LogScaled vf = yukawa_ball_log(x, Bf, tau);
      const LogScaled vg = yukawa_ball_log(x, Bg, tau);
      const LogScaled gf = yukawa_ball_dirderiv_log(x, df / rf, Bf, tau);
      const LogScaled gg = yukawa_ball_dirderiv_log(x, dg / rg, Bg, tau);
      const double cosang = (df.dot(dg)) / (rf * rg);
      const LogScaled term =
          gf * gg * LogScaled::from_value(cosang) + t2 * (vf * vg);
      acc.add(term * LogScaled::from_value(rad.w[i] * rho * rho));
    }
    return acc.total();
  };
  return from_adaptive(adaptive_patch_integrate(tris, map, f,
                                                adaptive_options(opts)));
}

JResult reflection_surface_integral(const ObstacleShape& D, const Vec3& p,
                                    const Vec3& p_prime, double tau,
                                    const JOptions& opts) {
  require_positive_tau(tau);
  const auto tris = D.param_triangles(opts.base_level);
  const PatchMap map = D.surface_map();
  LogDensity f = [&p, &p_prime, tau](const PatchSample& s) -> LogScaled {
    const Vec3 dxp = s.x - p;
    const double rf = dxp.norm();
    const double rg = (s.x - p_prime).norm();
    const double lit = (p - s.x).dot(s.nu);
    const double phi = rf + rg;
    return LogScaled::from_value(lit) *
           LogScaled::from_log(-tau * phi + std::log1p(1.0 / (tau * rf)) -
                               2.0 * std::log(rf) - std::log(rg));
  };
  return from_adaptive(adaptive_patch_integrate(tris, map, f,
                                                adaptive_options(opts)));
}

KernelExpansion j_kernel_expansion(const ObstacleShape& D, const Ball& B,
                                   const Ball& B_prime, double tau,
                                   bool with_exact, const JOptions& opts) {
  require_positive_tau(tau);
  KernelExpansion out;
  const double eta = B.radius, etap = B_prime.radius;
  out.outside_regime = (tau * eta <= 1.0) || (tau * etap <= 1.0);
  const JResult F =
      reflection_surface_integral(D, B.center, B_prime.center, tau, opts);
  const double coef =
      (eta - 1.0 / tau) * (etap - 1.0 / tau) / (4.0 * tau * tau * tau);
  out.leading =
      LogScaled::from_value(coef) * log_exp(tau * (eta + etap)) * F.value;
  out.est_rel_error = F.est_rel_error;
  if (with_exact) {
    out.boundary_exact = j_boundary(D, B, B_prime, tau, opts).value;
  }
  return out;
}

// ------------------------------------------------------ angular constants --

namespace {

double pattern_search_min(const ObstacleShape& D,
                          const std::function<double(const Vec3&)>& f,
                          Vec3 x0, double step0) {
  double best = f(x0);
  double step = step0;
  const Vec3 dirs[6] = {Vec3::UnitX(),  -Vec3::UnitX(), Vec3::UnitY(),
                        -Vec3::UnitY(), Vec3::UnitZ(),  -Vec3::UnitZ()};
  for (int it = 0; it < 200 && step > 1e-10 * step0; ++it) {
    bool improved = false;
    for (const Vec3& d : dirs) {
      const Vec3 cand = x0 + step * d;
      if (!D.contains(cand)) continue;
      const double v = f(cand);
      if (v < best - 1e-15) {
        best = v;
        x0 = cand;
        improved = true;
      }
    }
    if (!improved) step *= 0.5;
  }
  return best;
}

}  // namespace

CdConstants c_d_constants(const ObstacleShape& D, const Ball& B,
                          const Ball& B_prime) {
  CdConstants out;
  if (!(D.solid_distance(B.center) > B.radius) ||
      !(D.solid_distance(B_prime.center) > B_prime.radius)) {
    return out;  // valid = false, constants 0
  }
  out.valid = true;
  const Vec3 p = B.center, pp = B_prime.center;
  auto angle_at = [&](const Vec3& x) {
    const Vec3 af = p - x, ag = pp - x;
    return std::atan2(af.cross(ag).norm(), af.dot(ag));
  };
  auto f_points = [&](const Vec3& x) { return 1.0 + std::cos(angle_at(x)); };
  auto f_balls = [&](const Vec3& x) {
    const double rf = (p - x).norm(), rg = (pp - x).norm();
    const double widen = std::asin(std::min(1.0, B.radius / rf)) +
                         std::asin(std::min(1.0, B_prime.radius / rg));
    const double theta = std::min(kPi, angle_at(x) + widen);
    return 1.0 + std::cos(theta);
  };

  std::vector<Vec3> pool = D.surface_samples(4);
  const Vec3 c0 = D.center();
  const std::size_t nsurf = pool.size();
  for (std::size_t i = 0; i < nsurf; ++i) {
    for (double rho : {0.35, 0.7}) {
      const Vec3 x = c0 + rho * (pool[i] - c0);
      if (D.contains(x)) pool.push_back(x);
    }
  }
  if (D.contains(c0)) pool.push_back(c0);

  const double step0 = 0.05 * D.diameter();
  double bp = std::numeric_limits<double>::infinity();
  double bb = std::numeric_limits<double>::infinity();
  Vec3 xp = pool.front(), xb = pool.front();
  for (const auto& x : pool) {
    const double vp = f_points(x);
    if (vp < bp) {
      bp = vp;
      xp = x;
    }
    const double vb = f_balls(x);
    if (vb < bb) {
      bb = vb;
      xb = x;
    }
  }
  out.c_points = pattern_search_min(D, f_points, xp, step0);
  out.c_balls = pattern_search_min(D, f_balls, xb, step0);
  return out;
}

// ----------------------------------------------------- asymptotic limits --

double asymptotic_rhs(AsymptoticKind kind, const ObstacleShape& D,
                      const Ball& B, const Ball& B_prime, double s) {
  const Vec3 p = B.center, pp = B_prime.center;
  const double eta = B.radius, etap = B_prime.radius;
  if (kind == AsymptoticKind::shifted) {
    if (!(s >= 0.0 && s < etap)) {
      throw PreconditionError(
          "shift s must satisfy 0 <= s < receiver radius");
    }
  } else {
    s = 0.0;
  }
  const ReflectorSet refl = first_reflector(D, p, pp);
  if (refl.degenerate_band) {
    throw NumericError(
        "reflection set is a degenerate continuum; the discrete sum does not "
        "apply");
  }
  double sum = 0.0;
  for (const Reflector& R : refl.points) {
    const UnitPairGeometry g = unit_pair(R.q, p, pp);
    const double det = det_shape_diff(R.q, D, p, pp, s);
    if (!(det > 0.0)) {
      char buf[128];
      std::snprintf(buf, sizeof(buf),
                    "shape-difference determinant %.6g <= 0 at a reflection "
                    "point (tangential contact)",
                    det);
      throw NumericError(buf);
    }
    const double root = std::sqrt(det);
    switch (kind) {
      case AsymptoticKind::reflection_sum:
        sum += kPi / (g.r * g.r_prime * root);
        break;
      case AsymptoticKind::scaled_indicator:
      case AsymptoticKind::monostatic:
        sum += 0.5 * kPi * (eta / g.r) * (etap / g.r_prime) / root;
        break;
      case AsymptoticKind::shifted:
        sum += 0.5 * kPi * (eta / g.r) * ((etap - s) / (g.r_prime - s)) / root;
        break;
    }
  }
  return sum;
}

double det_from_shifted_limit(double limit_value, double eta,
                              double eta_prime, double r, double r_prime,
                              double s) {
  if (!(limit_value > 0.0)) {
    throw NumericError("shifted scaled limit must be positive to invert");
  }
  const double amp = 0.5 * kPi * (eta / r) * ((eta_prime - s) / (r_prime - s));
  const double root = amp / limit_value;
  return root * root;
}

}  // namespace enclosure
