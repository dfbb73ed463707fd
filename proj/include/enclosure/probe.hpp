#pragma once

#include <functional>
#include <string>
#include <vector>

#include "enclosure/indicator.hpp"
#include "enclosure/obstacle.hpp"
#include "enclosure/potentials.hpp"
#include "enclosure/types.hpp"
#include "enclosure/wavesim.hpp"

namespace enclosure {

// Total decay rate c(omega) = min_x (|x-p| + |x - (p' + s omega)|) measured
// for a shifted receiver sub-ball; each data mode supplies one.  Probes
// return +infinity for directions whose data cannot be fit.
using RateProbe = std::function<double(const Vec3& omega)>;

struct ScanOptions {
  double c_total = 0.0;  // measured unshifted rate c (required)
  double s = 0.0;        // sub-ball shift, 0 < s < eta'
  int omega_level = 4;   // icosphere direction grid
  double delta_c = 0.0;  // acceptance half-band on the rate (required)
  int refine_rounds = 3;
  std::vector<double> taus;  // tau grid for data-driven rate fits
};

struct ScanHit {
  Vec3 omega;
  double c_omega = 0.0;  // measured shifted total rate
  Vec3 q;                // spheroid radial point p' + s(omega; c) omega
};

struct ScanResult {
  std::vector<ScanHit> hits;
  std::vector<Vec3> clusters;  // greedy-clustered hit points
  Vec3 omega_best = Vec3::Zero();
  double c_omega_best = 0.0;
  Vec3 q = Vec3::Zero();  // refined contact point estimate
  double delta_c = 0.0;
  int evaluated = 0;
  std::string mode;
};

// Direction scan: classify each omega by |c(omega) - (c - s)| <= delta_c,
// then refine the best direction on shrinking tangent grids and map it to
// the enclosing spheroid via the radial map from the second focus.
ScanResult scan_reflector(const RateProbe& probe, const Ball& B,
                          const Ball& B_prime, const ScanOptions& opts);

// Least-squares parabola refinement of a rate minimum: fits a quadratic in
// tangent offsets over a (grid x grid) stencil of half-width `halfwidth`
// radians around `omega` and returns the fitted vertex direction.  Robust to
// smooth per-direction measurement error, which defeats pure arg-min
// refinement on noisy (e.g. wave-data) probes.
Vec3 refine_direction_quadratic(const RateProbe& probe, const Vec3& omega,
                                double halfwidth, int grid = 5);

RateProbe geometry_rate_probe(const ObstacleShape& D, const Ball& B,
                              const Ball& B_prime, double s);
// Shares per-tau boundary quadrature nodes across all directions.
RateProbe semianalytic_rate_probe(const ObstacleShape& D, const Ball& B,
                                  const Ball& B_prime, double s,
                                  const std::vector<double>& taus,
                                  const JOptions& opts = {});
RateProbe fdtd_rate_probe(const ReceiverTrace& obstacle_run,
                          const ReceiverTrace& free_run, const Ball& B,
                          const Ball& B_prime, double s,
                          const std::vector<double>& taus);

// Outward obstacle normal at a recovered contact point (equals the inward
// spheroid normal): -(A + A') / sqrt(2 (1 + A.A')).
Vec3 extract_normal(const Vec3& q, const Vec3& p, const Vec3& p_prime);

// ---- curvature from two shifted scaled limits ----

struct CurvatureExtraction {
  double det1 = 0.0, det2 = 0.0;  // shape-difference determinants
  double X1 = 0.0;  // H_D minus the weighted normal curvature along A x A'
  double K = 0.0;   // Gauss curvature of the obstacle at q
  double cond = 0.0;
  ScaledLimit lim1, lim2;  // data-mode diagnostics (empty in geometry mode)
};

// Oracle route: determinants from the closed-form shape difference.
CurvatureExtraction curvature_extract_geometry(const ObstacleShape& D,
                                               const Vec3& q, const Ball& B,
                                               const Ball& B_prime, double s1,
                                               double s2);
// Data route: scaled limits of two shifted sub-ball indicator curves.
CurvatureExtraction curvature_extract_curves(const IndicatorCurve& curve1,
                                             const IndicatorCurve& curve2,
                                             const Vec3& q, const Ball& B,
                                             const Ball& B_prime,
                                             double kappa, double s1,
                                             double s2);

// Shifted sub-ball indicator curves (receiver chi over B_{eta'-s}(p'+s w)).
IndicatorCurve shifted_indicator_semianalytic(const ObstacleShape& D,
                                              const Ball& B,
                                              const Ball& B_prime,
                                              const Vec3& omega, double s,
                                              const std::vector<double>& taus,
                                              const JOptions& opts = {});
IndicatorCurve shifted_indicator_fdtd(const ReceiverTrace& obstacle_run,
                                      const ReceiverTrace& free_run,
                                      const Ball& B, const Ball& B_prime,
                                      const Vec3& omega, double s,
                                      const std::vector<double>& taus);

// ---- ball recovery from contact data ----

struct BallReconstruction {
  Vec3 q = Vec3::Zero();
  Vec3 normal = Vec3::Zero();  // outward obstacle normal at q
  double radius = 0.0;         // 1 / sqrt(K)
  Vec3 center = Vec3::Zero();
  double c = 0.0;      // measured broken-path minimum
  double kappa = 0.0;  // c - eta - eta'
  CurvatureExtraction curvature;
};
BallReconstruction reconstruct_ball(const Vec3& q, const Vec3& normal,
                                    const CurvatureExtraction& curv, double c,
                                    double kappa);

// ---- rotation scan for principal directions ----

// X1 measured after rotating the source pair by theta about the contact
// normal; X1(theta) = A0 + A2 cos 2 theta + B2 sin 2 theta.
using X1Probe = std::function<double(double theta)>;

struct PrincipalResult {
  double H = 0.0;
  double k1 = 0.0, k2 = 0.0;  // principal curvatures, k1 >= k2
  Vec3 dir1 = Vec3::Zero(), dir2 = Vec3::Zero();
  bool isotropic = false;
  double A0 = 0.0, A2 = 0.0, B2 = 0.0;
  std::vector<double> theta;
  std::vector<double> X1;
  double d = 0.0;  // A . A', constant over the rotation
};

PrincipalResult principal_directions(const X1Probe& probe, const Vec3& q,
                                     const Vec3& p, const Vec3& p_prime,
                                     int theta_count,
                                     double isotropy_tol = 0.02);

X1Probe geometry_x1_probe(const ObstacleShape& D, const Vec3& q,
                          const Ball& B, const Ball& B_prime, double s1,
                          double s2);
X1Probe semianalytic_x1_probe(const ObstacleShape& D, const Vec3& q,
                              const Ball& B, const Ball& B_prime, double s1,
                              double s2, const std::vector<double>& taus,
                              const JOptions& opts = {});

}  // namespace enclosure
