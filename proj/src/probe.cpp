#include "enclosure/probe.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <memory>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "enclosure/geometry.hpp"
#include "enclosure/quadrature.hpp"

namespace enclosure {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_shift(const Ball& B_prime, double s) {
  if (!(s > 0.0) || !(s < B_prime.radius)) {
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "shift s = %g must lie strictly between 0 and the receiver "
                  "radius %g",
                  s, B_prime.radius);
    throw PreconditionError(buf);
  }
}

void check_two_shifts(const Ball& B_prime, double s1, double s2) {
  check_shift(B_prime, s1);
  check_shift(B_prime, s2);
  if (std::fabs(s1 - s2) < 1e-12 * B_prime.radius) {
    throw PreconditionError(
        "curvature extraction needs two distinct shifts s1 != s2");
  }
}

Ball sub_ball(const Ball& B_prime, const Vec3& omega, double s) {
  return Ball{B_prime.center + s * omega, B_prime.radius - s};
}

void check_tau_grid(const std::vector<double>& taus) {
  if (taus.size() < 8) {
    throw PreconditionError(
        "rate fits need at least 8 tau samples in the scan grid");
  }
}

// Same C^1 ramp the wave solver uses for ball indicators; the exact shape is
// uncritical because weights are rescaled to the ball volume below.
double mollified(double r, double eta, double h) {
  const double t = (eta + 0.5 * h - r) / h;
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  return t * t * (3.0 - 2.0 * t);
}

// Mollified sub-ball weights on the stored receiver lattice, rescaled so
// they sum to the sub-ball volume.  Indices into the point list are sparse.
struct SparseWeights {
  std::vector<int> idx;
  std::vector<double> w;
};

SparseWeights sub_ball_weights(const std::vector<Vec3>& points, double h,
                               const Ball& bs) {
  SparseWeights out;
  double wsum = 0.0;
  for (int i = 0; i < static_cast<int>(points.size()); ++i) {
    const double w = mollified((points[i] - bs.center).norm(), bs.radius, h);
    if (w > 0.0) {
      out.idx.push_back(i);
      out.w.push_back(w);
      wsum += w;
    }
  }
  if (out.idx.empty() || !(wsum > 0.0)) {
    throw PreconditionError(
        "shifted sub-ball covers no receiver lattice nodes; the shift is too "
        "large for the recorded grid");
  }
  const double scale = bs.volume() / wsum;
  for (auto& w : out.w) w *= scale;
  return out;
}

void check_paired(const ReceiverTrace& a, const ReceiverTrace& b) {
  if (a.n_receivers() != b.n_receivers() || a.n_samples != b.n_samples ||
      std::fabs(a.dt - b.dt) > 1e-15 + 1e-12 * std::fabs(a.dt) ||
      std::fabs(a.h - b.h) > 1e-15) {
    throw PreconditionError(
        "paired runs disagree in grid or sampling; rerun both on one grid");
  }
}

IndicatorCurve curve_from_laplace(const std::vector<Vec3>& points, double h,
                                  const std::vector<std::vector<double>>& lapO,
                                  const std::vector<std::vector<double>>& lapF,
                                  const std::vector<double>& taus,
                                  const Ball& B, const Ball& bs) {
  const SparseWeights sw = sub_ball_weights(points, h, bs);
  IndicatorCurve curve;
  curve.source = "fdtd";
  for (std::size_t j = 0; j < taus.size(); ++j) {
    double q_obst = 0.0, q_free = 0.0;
    for (std::size_t k = 0; k < sw.idx.size(); ++k) {
      q_obst += sw.w[k] * lapO[j][sw.idx[k]];
      q_free += sw.w[k] * lapF[j][sw.idx[k]];
    }
    curve.tau.push_back(taus[j]);
    curve.value.push_back(LogScaled::from_value(q_free - q_obst));
    curve.noise_floor.push_back(
        std::fabs(ball_ball_integral(B, bs, taus[j]) - q_free));
  }
  return curve;
}

// Per-tau boundary nodes shared across scan directions, with the
// direction-independent factor (quadrature weight times dv_f/dnu) baked in.
struct TauNodes {
  double tau = 0.0;
  std::vector<Vec3> x;
  std::vector<LogScaled> W;
};

std::vector<TauNodes> build_scan_nodes(const ObstacleShape& D, const Ball& B,
                                       const Ball& B_prime, double s,
                                       const std::vector<double>& taus,
                                       const JOptions& opts) {
  const auto tris = D.param_triangles(opts.base_level);
  const PatchMap map = D.surface_map();
  const Vec3 pp = B_prime.center;

  std::vector<TauNodes> plan;
  plan.reserve(taus.size());
  for (const double tau : taus) {
    // Envelope bounding the integrand of every shifted sub-ball pairing:
    // v_g(x) <= e^{-tau(|x-p'|-s)} M / (tau^3 (|x-p'|-s)) by the triangle
    // inequality, so nodes converged for the envelope serve all omega.
    LogDensity env = [&](const PatchSample& smp) -> LogScaled {
      const double reff = std::max((smp.x - pp).norm() - s, 1e-12);
      const LogScaled df = yukawa_ball_dirderiv_log(smp.x, smp.nu, B, tau);
      return LogScaled::from_log(df.log_abs - tau * reff - std::log(reff), 1);
    };
    AdaptiveOptions aopts;
    aopts.rel_tol = std::max(opts.rel_tol, 1e-4);
    aopts.max_leaves = static_cast<int>(opts.max_leaves);
    aopts.collect_nodes = true;
    const AdaptiveResult res = adaptive_patch_integrate(tris, map, env, aopts);
    if (!res.converged) {
      throw NumericError(
          "boundary quadrature for the direction scan did not converge");
    }
    TauNodes tn;
    tn.tau = tau;
    tn.x = res.nodes.x;
    tn.W.reserve(res.nodes.x.size());
    for (std::size_t k = 0; k < res.nodes.x.size(); ++k) {
      tn.W.push_back(
          LogScaled::from_log(res.nodes.log_w[k], 1) *
          yukawa_ball_dirderiv_log(res.nodes.x[k], res.nodes.nu[k], B, tau));
    }
    plan.push_back(std::move(tn));
  }
  return plan;
}

double rate_or_inf(const IndicatorCurve& curve, const Ball& B,
                   const Ball& B_prime, double s) {
  try {
    // refined fit: its residual bias matches the unshifted-curve fit that
    // anchors the scan target, so the acceptance band stays centered
    const DecayFit fit = decay_fit_refined(curve, 4.0);
    return fit.rate + B.radius + (B_prime.radius - s);
  } catch (const NumericError&) {
    return kInf;
  }
}

}  // namespace

ScanResult scan_reflector(const RateProbe& probe, const Ball& B,
                          const Ball& B_prime, const ScanOptions& opts) {
  if (!(opts.c_total > 0.0)) {
    throw PreconditionError(
        "total decay rate c is required for a direction scan: fit the "
        "unshifted indicator first");
  }
  check_shift(B_prime, opts.s);
  if (!(opts.delta_c > 0.0)) {
    throw PreconditionError(
        "rate acceptance band delta_c must be positive (use the fitted rate "
        "uncertainty)");
  }
  const double focal = (B.center - B_prime.center).norm();
  if (!(opts.c_total > focal)) {
    throw PreconditionError(
        "total rate does not exceed the source/receiver distance; no "
        "enclosing spheroid exists");
  }
  const SpheroidFrame spheroid(B.center, B_prime.center, opts.c_total);
  const double target = opts.c_total - opts.s;

  ScanResult out;
  out.delta_c = opts.delta_c;
  const auto dirs = icosphere_directions(opts.omega_level);
  double best = kInf;
  double best_miss = kInf;
  Vec3 omega_best = Vec3::UnitX();
  for (const auto& w : dirs) {
    const double cw = probe(w);
    ++out.evaluated;
    if (!std::isfinite(cw)) continue;
    const double miss = std::fabs(cw - target);
    if (miss <= opts.delta_c) {
      out.hits.push_back({w, cw, spheroid.point_from_second_focus(w)});
    }
    if (cw < best) {
      best = cw;
      omega_best = w;
    }
    best_miss = std::min(best_miss, miss);
  }
  if (out.hits.empty()) {
    char buf[200];
    std::snprintf(buf, sizeof(buf),
                  "no scan direction matched the shifted rate within delta_c "
                  "= %g (best mismatch %g); rate or geometry hypothesis off",
                  opts.delta_c, best_miss);
    throw NumericError(buf);
  }

  // Local refinement of the best direction on shrinking tangent grids.
  double half = std::sqrt(4.0 * kPi / static_cast<double>(dirs.size()));
  for (int round = 0; round < opts.refine_rounds; ++round) {
    const TangentFrame tf = tangent_frame(Vec3::Zero(), omega_best);
    Vec3 improved = omega_best;
    double improved_c = best;
    for (int a = -2; a <= 2; ++a) {
      for (int b = -2; b <= 2; ++b) {
        if (a == 0 && b == 0) continue;
        const Vec3 w = (omega_best + (0.5 * half * a) * tf.e1 +
                        (0.5 * half * b) * tf.e2)
                           .normalized();
        const double cw = probe(w);
        ++out.evaluated;
        if (cw < improved_c) {
          improved_c = cw;
          improved = w;
        }
      }
    }
    omega_best = improved;
    best = improved_c;
    half *= 0.35;
  }
  out.omega_best = omega_best;
  out.c_omega_best = best;
  out.q = spheroid.point_from_second_focus(omega_best);

  // Greedy clustering of hit points, seeded from the best-matching hits.
  std::vector<int> order(out.hits.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return std::fabs(out.hits[a].c_omega - target) <
           std::fabs(out.hits[b].c_omega - target);
  });
  const double cluster_radius =
      2.5 * std::sqrt(4.0 * kPi / static_cast<double>(dirs.size())) *
      spheroid.semi_major();
  for (const int i : order) {
    const Vec3& hq = out.hits[i].q;
    bool close = false;
    for (const auto& rep : out.clusters) {
      if ((rep - hq).norm() < cluster_radius) {
        close = true;
        break;
      }
    }
    if (!close) out.clusters.push_back(hq);
  }
  return out;
}

Vec3 refine_direction_quadratic(const RateProbe& probe, const Vec3& omega,
                                double halfwidth, int grid) {
  if (!(halfwidth > 0.0) || grid < 3) {
    throw PreconditionError(
        "quadratic refinement needs halfwidth > 0 and a grid of at least 3");
  }
  const Vec3 w0 = omega.normalized();
  const TangentFrame tf = tangent_frame(Vec3::Zero(), w0);
  std::vector<double> as, bs, cs;
  double best = kInf;
  Vec3 best_w = w0;
  for (int i = 0; i < grid; ++i) {
    for (int j = 0; j < grid; ++j) {
      const double a = halfwidth * (2.0 * i / (grid - 1.0) - 1.0);
      const double b = halfwidth * (2.0 * j / (grid - 1.0) - 1.0);
      const Vec3 w = (w0 + a * tf.e1 + b * tf.e2).normalized();
      const double cw = probe(w);
      if (!std::isfinite(cw)) continue;
      as.push_back(a);
      bs.push_back(b);
      cs.push_back(cw);
      if (cw < best) {
        best = cw;
        best_w = w;
      }
    }
  }
  const int n = static_cast<int>(cs.size());
  if (n < 6 || n < grid * grid * 4 / 5) {
    throw NumericError(
        "too many unfittable directions in the quadratic refinement stencil");
  }
  Eigen::MatrixXd A(n, 6);
  Eigen::VectorXd y(n);
  for (int k = 0; k < n; ++k) {
    const double a = as[k], b = bs[k];
    A(k, 0) = 1.0;
    A(k, 1) = a;
    A(k, 2) = b;
    A(k, 3) = a * a;
    A(k, 4) = a * b;
    A(k, 5) = b * b;
    y(k) = cs[k];
  }
  const Eigen::VectorXd c = A.colPivHouseholderQr().solve(y);
  Eigen::Matrix2d H;
  H << 2.0 * c(3), c(4), c(4), 2.0 * c(5);
  const Eigen::Vector2d g(c(1), c(2));
  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(H);
  if (es.eigenvalues()(0) > 0.0) {
    const Eigen::Vector2d v = -H.inverse() * g;
    if (v.norm() <= 1.5 * halfwidth) {
      return (w0 + v(0) * tf.e1 + v(1) * tf.e2).normalized();
    }
  }
  // Indefinite or runaway vertex: fall back to the sampled arg-min.
  return best_w;
}

RateProbe geometry_rate_probe(const ObstacleShape& D, const Ball& B,
                              const Ball& B_prime, double s) {
  check_shift(B_prime, s);
  auto obst = std::make_shared<ObstacleShape>(D);
  auto samples =
      std::make_shared<std::vector<Vec3>>(obst->surface_samples(4));
  const Vec3 p = B.center, pp = B_prime.center;
  return [obst, samples, p, pp, s](const Vec3& omega) {
    return min_broken_path_value(*obst, p, pp + s * omega, *samples);
  };
}

RateProbe semianalytic_rate_probe(const ObstacleShape& D, const Ball& B,
                                  const Ball& B_prime, double s,
                                  const std::vector<double>& taus,
                                  const JOptions& opts) {
  check_shift(B_prime, s);
  check_tau_grid(taus);
  auto plan = std::make_shared<std::vector<TauNodes>>(
      build_scan_nodes(D, B, B_prime, s, taus, opts));
  const Ball Bf = B, Bp = B_prime;
  return [plan, Bf, Bp, s](const Vec3& omega) {
    const Ball bs = sub_ball(Bp, omega, s);
    IndicatorCurve curve;
    curve.source = "semianalytic";
    for (const auto& tn : *plan) {
      LogAccumulator acc;
      for (std::size_t k = 0; k < tn.x.size(); ++k) {
        acc.add(tn.W[k] * yukawa_ball_log(tn.x[k], bs, tn.tau));
      }
      curve.tau.push_back(tn.tau);
      curve.value.push_back(LogScaled::from_value(2.0) * acc.total());
      curve.noise_floor.push_back(0.0);
    }
    return rate_or_inf(curve, Bf, Bp, s);
  };
}

RateProbe fdtd_rate_probe(const ReceiverTrace& obstacle_run,
                          const ReceiverTrace& free_run, const Ball& B,
                          const Ball& B_prime, double s,
                          const std::vector<double>& taus) {
  check_shift(B_prime, s);
  check_tau_grid(taus);
  check_paired(obstacle_run, free_run);
  auto points = std::make_shared<std::vector<Vec3>>(obstacle_run.points);
  const double h = obstacle_run.h;
  auto lapO = std::make_shared<std::vector<std::vector<double>>>(
      accumulate_laplace(obstacle_run, taus, &B, 2.0 * h));
  auto lapF = std::make_shared<std::vector<std::vector<double>>>(
      accumulate_laplace(free_run, taus, &B, 2.0 * h));
  auto tau_copy = std::make_shared<std::vector<double>>(taus);
  const Ball Bf = B, Bp = B_prime;
  return [points, h, lapO, lapF, tau_copy, Bf, Bp, s](const Vec3& omega) {
    const Ball bs = sub_ball(Bp, omega, s);
    IndicatorCurve curve;
    try {
      curve = curve_from_laplace(*points, h, *lapO, *lapF, *tau_copy, Bf, bs);
    } catch (const PreconditionError&) {
      return kInf;
    }
    return rate_or_inf(curve, Bf, Bp, s);
  };
}

Vec3 extract_normal(const Vec3& q, const Vec3& p, const Vec3& p_prime) {
  return spheroid_inward_normal(unit_pair(q, p, p_prime));
}

CurvatureExtraction curvature_extract_geometry(const ObstacleShape& D,
                                               const Vec3& q, const Ball& B,
                                               const Ball& B_prime, double s1,
                                               double s2) {
  check_two_shifts(B_prime, s1, s2);
  const Vec3 p = B.center, pp = B_prime.center;
  CurvatureExtraction out;
  out.det1 = det_shape_diff(q, D, p, pp, s1);
  out.det2 = det_shape_diff(q, D, p, pp, s2);
  const UnitPairGeometry g = unit_pair(q, p, pp);
  const double l1 = 1.0 / g.r + 1.0 / (g.r_prime - s1);
  const double l2 = 1.0 / g.r + 1.0 / (g.r_prime - s2);
  const CurvatureSolve sol =
      solve_curvature_system(l1, out.det1, l2, out.det2, g.d);
  out.X1 = sol.X1;
  out.K = sol.K;
  out.cond = sol.cond;
  return out;
}

CurvatureExtraction curvature_extract_curves(const IndicatorCurve& curve1,
                                             const IndicatorCurve& curve2,
                                             const Vec3& q, const Ball& B,
                                             const Ball& B_prime, double kappa,
                                             double s1, double s2) {
  check_two_shifts(B_prime, s1, s2);
  CurvatureExtraction out;
  out.lim1 = scaled_limit(curve1, kappa, 4.0);
  out.lim2 = scaled_limit(curve2, kappa, 4.0);
  for (const ScaledLimit* lim : {&out.lim1, &out.lim2}) {
    if (lim->diverging) {
      throw NumericError(
          "scaled limit of a shifted indicator diverges: the supplied decay "
          "rate kappa disagrees with the data");
    }
    if (!(lim->estimate > 0.0)) {
      throw NumericError(
          "scaled limit of a shifted indicator is not positive; the contact "
          "amplitude cannot be inverted");
    }
  }
  const UnitPairGeometry g = unit_pair(q, B.center, B_prime.center);
  out.det1 = det_from_shifted_limit(out.lim1.estimate, B.radius,
                                    B_prime.radius, g.r, g.r_prime, s1);
  out.det2 = det_from_shifted_limit(out.lim2.estimate, B.radius,
                                    B_prime.radius, g.r, g.r_prime, s2);
  const double l1 = 1.0 / g.r + 1.0 / (g.r_prime - s1);
  const double l2 = 1.0 / g.r + 1.0 / (g.r_prime - s2);
  const CurvatureSolve sol =
      solve_curvature_system(l1, out.det1, l2, out.det2, g.d);
  out.X1 = sol.X1;
  out.K = sol.K;
  out.cond = sol.cond;
  return out;
}

IndicatorCurve shifted_indicator_semianalytic(const ObstacleShape& D,
                                              const Ball& B,
                                              const Ball& B_prime,
                                              const Vec3& omega, double s,
                                              const std::vector<double>& taus,
                                              const JOptions& opts) {
  check_shift(B_prime, s);
  const Ball bs = sub_ball(B_prime, omega.normalized(), s);
  IndicatorCurve curve;
  curve.source = "semianalytic";
  for (const double tau : taus) {
    const JResult j = j_boundary(D, B, bs, tau, opts);
    curve.tau.push_back(tau);
    curve.value.push_back(LogScaled::from_value(2.0) * j.value);
    curve.noise_floor.push_back(0.0);
  }
  return curve;
}

IndicatorCurve shifted_indicator_fdtd(const ReceiverTrace& obstacle_run,
                                      const ReceiverTrace& free_run,
                                      const Ball& B, const Ball& B_prime,
                                      const Vec3& omega, double s,
                                      const std::vector<double>& taus) {
  check_shift(B_prime, s);
  check_paired(obstacle_run, free_run);
  const double h = obstacle_run.h;
  const auto lapO = accumulate_laplace(obstacle_run, taus, &B, 2.0 * h);
  const auto lapF = accumulate_laplace(free_run, taus, &B, 2.0 * h);
  const Ball bs = sub_ball(B_prime, omega.normalized(), s);
  return curve_from_laplace(obstacle_run.points, h, lapO, lapF, taus, B, bs);
}

BallReconstruction reconstruct_ball(const Vec3& q, const Vec3& normal,
                                    const CurvatureExtraction& curv, double c,
                                    double kappa) {
  if (!(curv.K > 0.0)) {
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "recovered Gauss curvature K = %g is not positive; ball "
                  "recovery needs a convex sphere-like contact",
                  curv.K);
    throw NumericError(buf);
  }
  BallReconstruction out;
  out.q = q;
  out.normal = normal.normalized();
  out.radius = 1.0 / std::sqrt(curv.K);
  out.center = q - out.radius * out.normal;
  out.c = c;
  out.kappa = kappa;
  out.curvature = curv;
  return out;
}

PrincipalResult principal_directions(const X1Probe& probe, const Vec3& q,
                                     const Vec3& p, const Vec3& p_prime,
                                     int theta_count, double isotropy_tol) {
  if (theta_count < 5) {
    throw PreconditionError("rotation scan needs at least 5 angles");
  }
  const UnitPairGeometry g = unit_pair(q, p, p_prime);
  if (g.cross.norm() < 1e-8) {
    throw PreconditionError(
        "source pair is collinear with the contact normal (monostatic "
        "geometry); principal directions are unresolved");
  }
  const Vec3 nu = spheroid_inward_normal(g);
  const Vec3 V0 = g.cross.normalized();

  PrincipalResult out;
  out.d = g.d;
  Eigen::MatrixXd M(theta_count, 3);
  Eigen::VectorXd rhs(theta_count);
  for (int j = 0; j < theta_count; ++j) {
    const double theta = kPi * j / theta_count;
    const double x1 = probe(theta);
    out.theta.push_back(theta);
    out.X1.push_back(x1);
    M(j, 0) = 1.0;
    M(j, 1) = std::cos(2.0 * theta);
    M(j, 2) = std::sin(2.0 * theta);
    rhs(j) = x1;
  }
  const Eigen::Vector3d coef = M.colPivHouseholderQr().solve(rhs);
  out.A0 = coef(0);
  out.A2 = coef(1);
  out.B2 = coef(2);
  const double C = std::hypot(out.A2, out.B2);
  out.H = 4.0 * out.A0 / (3.0 + g.d);

  if (C <= isotropy_tol * std::max(std::fabs(out.A0), 1e-12)) {
    out.isotropic = true;
    out.k1 = out.k2 = out.H;
    const TangentFrame tf = tangent_frame(q, nu);
    out.dir1 = tf.e1;
    out.dir2 = tf.e2;
    return out;
  }
  const double psi = std::atan2(out.B2, out.A2);
  const double theta_min = 0.5 * (psi + kPi);  // X1 minimum: larger curvature
  const double theta_max = 0.5 * psi;
  const double spread = 4.0 * C / (1.0 - g.d);
  out.k1 = out.H + spread;
  out.k2 = out.H - spread;
  out.dir1 = (Eigen::AngleAxisd(theta_min, nu) * V0).normalized();
  out.dir2 = (Eigen::AngleAxisd(theta_max, nu) * V0).normalized();
  return out;
}

X1Probe geometry_x1_probe(const ObstacleShape& D, const Vec3& q,
                          const Ball& B, const Ball& B_prime, double s1,
                          double s2) {
  check_two_shifts(B_prime, s1, s2);
  auto obst = std::make_shared<ObstacleShape>(D);
  const Vec3 p = B.center, pp = B_prime.center;
  const Vec3 nu = extract_normal(q, p, pp);
  return [obst, q, p, pp, nu, s1, s2](double theta) {
    const Eigen::AngleAxisd rot(theta, nu);
    const Vec3 pt = q + rot * (p - q);
    const Vec3 ppt = q + rot * (pp - q);
    const double d1 = det_shape_diff(q, *obst, pt, ppt, s1);
    const double d2 = det_shape_diff(q, *obst, pt, ppt, s2);
    const UnitPairGeometry g = unit_pair(q, pt, ppt);
    const double l1 = 1.0 / g.r + 1.0 / (g.r_prime - s1);
    const double l2 = 1.0 / g.r + 1.0 / (g.r_prime - s2);
    return solve_curvature_system(l1, d1, l2, d2, g.d).X1;
  };
}

X1Probe semianalytic_x1_probe(const ObstacleShape& D, const Vec3& q,
                              const Ball& B, const Ball& B_prime, double s1,
                              double s2, const std::vector<double>& taus,
                              const JOptions& opts) {
  check_two_shifts(B_prime, s1, s2);
  check_tau_grid(taus);
  auto obst = std::make_shared<ObstacleShape>(D);
  auto tau_copy = std::make_shared<std::vector<double>>(taus);
  auto jopts = std::make_shared<JOptions>(opts);
  const Ball Bf = B, Bp = B_prime;
  const Vec3 nu = extract_normal(q, Bf.center, Bp.center);
  const UnitPairGeometry g0 = unit_pair(q, Bf.center, Bp.center);
  const double kappa = g0.r + g0.r_prime - Bf.radius - Bp.radius;
  return [obst, q, nu, Bf, Bp, s1, s2, tau_copy, jopts, kappa](double theta) {
    const Eigen::AngleAxisd rot(theta, nu);
    const Ball Bt{q + rot * (Bf.center - q), Bf.radius};
    const Ball Bpt{q + rot * (Bp.center - q), Bp.radius};
    const Vec3 omega = (q - Bpt.center).normalized();
    const IndicatorCurve c1 = shifted_indicator_semianalytic(
        *obst, Bt, Bpt, omega, s1, *tau_copy, *jopts);
    const IndicatorCurve c2 = shifted_indicator_semianalytic(
        *obst, Bt, Bpt, omega, s2, *tau_copy, *jopts);
    return curvature_extract_curves(c1, c2, q, Bt, Bpt, kappa, s1, s2).X1;
  };
}

}  // namespace enclosure
