// Reflector scan, curvature extraction, ball reconstruction, and the
// rotation scan, all driven by the exact geometry probe (the data-driven
// probes are exercised end to end by the acceptance suite).

#include <cmath>
#include <vector>

#include "doctest.h"
#include "enclosure/obstacle.hpp"
#include "enclosure/probe.hpp"
#include "enclosure/types.hpp"

using namespace enclosure;

namespace {
Ball ball(const Vec3& c, double r) {
  Ball b;
  b.center = c;
  b.radius = r;
  return b;
}
const Vec3 kP(4.0, 0.0, 0.0);
const Vec3 kPp(0.0, 4.0, 0.0);
const double kCRef = 2.0 * std::sqrt(17.0 - 4.0 * std::sqrt(2.0));
const double kS2 = std::sqrt(2.0) / 2.0;

std::vector<double> log_grid(double lo, double hi, int n) {
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) {
    out[i] = lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1));
  }
  return out;
}
}  // namespace

TEST_CASE("geometry probe: shifted rate minimal along the reflector ray") {
  const ObstacleShape D = ObstacleShape::make_sphere(Vec3::Zero(), 1.0);
  const Ball B = ball(kP, 0.5), Bp = ball(kPp, 0.5);
  const double s = 0.15;
  const RateProbe probe = geometry_rate_probe(D, B, Bp, s);
  const Vec3 q(kS2, kS2, 0.0);
  const Vec3 omega_star = (q - kPp).normalized();
  const double c_at_star = probe(omega_star);
  CHECK(c_at_star == doctest::Approx(kCRef - s).epsilon(1e-9));
  // any other direction gives a strictly larger shifted rate
  for (const Vec3& w :
       {Vec3(1.0, 0.0, 0.0), Vec3(0.0, -1.0, 0.0), Vec3(0.3, -0.8, 0.5)}) {
    CHECK(probe(w.normalized()) > c_at_star + 1e-4);
  }
}

TEST_CASE("reflector scan pins the contact point from exact rates") {
  const ObstacleShape D = ObstacleShape::make_sphere(Vec3::Zero(), 1.0);
  const Ball B = ball(kP, 0.5), Bp = ball(kPp, 0.5);
  ScanOptions opts;
  opts.c_total = kCRef;
  opts.s = 0.15;
  opts.omega_level = 4;
  opts.delta_c = 5e-4;
  opts.refine_rounds = 4;
  const RateProbe probe = geometry_rate_probe(D, B, Bp, opts.s);
  const ScanResult res = scan_reflector(probe, B, Bp, opts);
  CHECK(res.clusters.size() == 1);
  CHECK(!res.hits.empty());
  CHECK(res.evaluated > 2000);
  const Vec3 q(kS2, kS2, 0.0);
  CHECK((res.q - q).norm() < 5e-3);

  // quadratic refinement sharpens the direction further
  const Vec3 omega = refine_direction_quadratic(probe, res.omega_best, 0.05);
  const Vec3 omega_star = (q - kPp).normalized();
  CHECK(std::acos(std::min(1.0, omega.dot(omega_star))) < 2e-4);

  // recovered normal at the refined point matches the obstacle normal
  const SpheroidFrame E(kP, kPp, kCRef);
  const Vec3 q_ref = E.point_from_second_focus(omega);
  const Vec3 nu = extract_normal(q_ref, kP, kPp);
  CHECK((nu - D.outward_normal(D.project(q_ref))).norm() < 1e-3);
}

TEST_CASE("scan options are validated with named hypotheses") {
  const ObstacleShape D = ObstacleShape::make_sphere(Vec3::Zero(), 1.0);
  const Ball B = ball(kP, 0.5), Bp = ball(kPp, 0.5);
  const RateProbe probe = geometry_rate_probe(D, B, Bp, 0.15);
  ScanOptions opts;  // c_total missing
  opts.s = 0.15;
  opts.delta_c = 1e-3;
  CHECK_THROWS_AS(scan_reflector(probe, B, Bp, opts), PreconditionError);
  opts.c_total = kCRef;
  opts.delta_c = 0.0;
  CHECK_THROWS_AS(scan_reflector(probe, B, Bp, opts), PreconditionError);
  opts.delta_c = 1e-3;
  opts.s = 0.7;  // >= receiver radius
  CHECK_THROWS_AS(scan_reflector(probe, B, Bp, opts), PreconditionError);
  // a hopeless acceptance band reports the best mismatch
  opts.s = 0.15;
  opts.c_total = kCRef + 0.5;
  opts.delta_c = 1e-6;
  CHECK_THROWS_AS(scan_reflector(probe, B, Bp, opts), NumericError);
}

TEST_CASE("two-shift curvature extraction recovers the unit sphere") {
  const ObstacleShape D = ObstacleShape::make_sphere(Vec3::Zero(), 1.0);
  const Ball B = ball(kP, 0.5), Bp = ball(kPp, 0.5);
  const Vec3 q(kS2, kS2, 0.0);
  const CurvatureExtraction curv =
      curvature_extract_geometry(D, q, B, Bp, 0.1, 0.3);
  CHECK(curv.K == doctest::Approx(1.0).epsilon(1e-8));
  // shifted determinant frozen from a finite-difference second-fundamental-
  // form oracle (shift moves the receiver focus toward q by s1 = 0.1)
  CHECK(curv.det1 == doctest::Approx(1.8098218).epsilon(1e-6));
  CHECK(curv.det2 == doctest::Approx(1.8397220).epsilon(1e-6));
  CHECK(curv.cond > 1.0);

  const Vec3 nu = extract_normal(q, kP, kPp);
  const BallReconstruction rec =
      reconstruct_ball(q, nu, curv, kCRef, kCRef - 1.0);
  CHECK(rec.radius == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(rec.center.norm() < 1e-7);
  CHECK(rec.q == q);
}

TEST_CASE("curvature from semianalytic shifted curves matches geometry") {
  const ObstacleShape D = ObstacleShape::make_sphere(Vec3::Zero(), 1.0);
  const Ball B = ball(kP, 0.5), Bp = ball(kPp, 0.5);
  const Vec3 q(kS2, kS2, 0.0);
  const Vec3 omega = (q - kPp).normalized();
  const double kappa = kCRef - 1.0;
  // the two-shift solve amplifies the O(1/tau^2) fit residual by the system
  // condition number (~124 for shifts 0.1/0.3), so the window sits high
  const auto taus = log_grid(60.0, 240.0, 12);
  const IndicatorCurve c1 =
      shifted_indicator_semianalytic(D, B, Bp, omega, 0.1, taus);
  const IndicatorCurve c2 =
      shifted_indicator_semianalytic(D, B, Bp, omega, 0.3, taus);
  const CurvatureExtraction curv =
      curvature_extract_curves(c1, c2, q, B, Bp, kappa, 0.1, 0.3);
  const CurvatureExtraction exact =
      curvature_extract_geometry(D, q, B, Bp, 0.1, 0.3);
  CHECK(std::fabs(curv.det1 - exact.det1) / exact.det1 < 5e-3);
  CHECK(std::fabs(curv.det2 - exact.det2) / exact.det2 < 5e-3);
  CHECK(std::fabs(curv.K - exact.K) < 0.05);
  const Vec3 nu = extract_normal(q, kP, kPp);
  const BallReconstruction rec =
      reconstruct_ball(q, nu, curv, kCRef, kappa);
  CHECK(std::fabs(rec.radius - 1.0) < 0.03);
}

TEST_CASE("rotation scan: principal directions of an ellipsoid contact") {
  // ellipsoid (2, 1, 1), contact at the y-pole (0, 1, 0); source pair
  // placed symmetrically about the contact normal (30 degrees off-normal)
  const ObstacleShape D =
      ObstacleShape::make_ellipsoid(Vec3::Zero(), Vec3(2.0, 1.0, 1.0));
  const Vec3 q(0.0, 1.0, 0.0);
  const double beta = kPi / 6.0, dist = 3.0;
  const Vec3 p = q + dist * Vec3(std::sin(beta), std::cos(beta), 0.0);
  const Vec3 pp = q + dist * Vec3(-std::sin(beta), std::cos(beta), 0.0);
  const Ball B = ball(p, 0.5), Bp = ball(pp, 0.5);

  const X1Probe probe = geometry_x1_probe(D, q, B, Bp, 0.1, 0.2);
  const PrincipalResult pr =
      principal_directions(probe, q, p, pp, 16);
  CHECK(!pr.isotropic);
  // outward-chart curvatures at the pole: -1/4 along x, -1 along z
  CHECK(pr.H == doctest::Approx(-0.625).epsilon(0.02));
  CHECK(pr.k1 == doctest::Approx(-0.25).epsilon(0.05));
  CHECK(pr.k2 == doctest::Approx(-1.0).epsilon(0.05));
  CHECK(std::fabs(pr.dir1.dot(Vec3::UnitX())) > 0.999);
  CHECK(std::fabs(pr.dir2.dot(Vec3::UnitZ())) > 0.999);

  // a sphere contact is reported isotropic with H = -1/R
  const ObstacleShape S = ObstacleShape::make_sphere(Vec3::Zero(), 1.0);
  const Vec3 qs(kS2, kS2, 0.0);
  const Ball Bs = ball(kP, 0.5), Bps = ball(kPp, 0.5);
  const X1Probe sphere_probe = geometry_x1_probe(S, qs, Bs, Bps, 0.1, 0.2);
  const PrincipalResult ps =
      principal_directions(sphere_probe, qs, kP, kPp, 16);
  CHECK(ps.isotropic);
  CHECK(ps.H == doctest::Approx(-1.0).epsilon(0.02));
}
