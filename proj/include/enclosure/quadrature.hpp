#pragma once
// Quadrature: Gauss-Legendre rules, product rules over balls, and an
// adaptive integrator over triangulated parameter domains built for
// integrands of the form (smooth) * exp(-tau * path), which concentrate in
// O(1/sqrt(tau)) neighborhoods of path minimizers.  All accumulation is
// log-scaled so tau * path >> 700 is fine.

#include <array>
#include <functional>
#include <vector>

#include "enclosure/log_scaled.hpp"
#include "enclosure/types.hpp"

namespace enclosure {

// Nodes and weights on [-1, 1]; cached per order, thread-safe after warmup.
const std::pair<std::vector<double>, std::vector<double>>& gauss_legendre(
    int n);

// Product rule over a ball: Gauss-Legendre in radius (r^2 folded into the
// weights) and polar cosine, trapezoid in azimuth.
struct BallRule {
  std::vector<Vec3> points;
  std::vector<double> weights;
};
BallRule ball_rule(const Ball& ball, int n_radial, int n_polar,
                   int n_azimuthal);
// Orders chosen so exp(-tau |x - y|) integrates to ~1e-12 over the ball.
BallRule ball_rule_for(const Ball& ball, double tau);

// --- adaptive integration over curved patches ------------------------------
//
// The domain is a set of flat triangles in a parameter space (unit-sphere
// chords for analytic surfaces, the triangles themselves for meshes).  `map`
// turns a parameter point into a surface/space sample carrying the full
// area-density jacobian relative to flat parameter area; `f` is the
// integrand value at a sample.  Leaves are refined while they contribute
// more than a fraction of the running total.

struct PatchSample {
  Vec3 x = Vec3::Zero();   // evaluation point (or unit direction for pencils)
  Vec3 nu = Vec3::Zero();  // outward surface normal where meaningful
  double jac = 0.0;        // d(measure) / d(flat parameter area)
};

using PatchMap =
    std::function<PatchSample(const Vec3& sigma, const Vec3& tri_normal)>;
using LogDensity = std::function<LogScaled(const PatchSample&)>;

struct AdaptiveOptions {
  double rel_tol = 1e-5;
  int max_leaves = 300000;
  int min_rounds = 3;
  int max_rounds = 60;
  bool collect_nodes = false;
};

// Flattened converged rule: caller re-evaluates its own integrand at x with
// weight exp(log_w) (log_w excludes the driving integrand).
struct SurfaceNodes {
  std::vector<Vec3> x;
  std::vector<Vec3> nu;
  std::vector<double> log_w;
};

struct AdaptiveResult {
  LogScaled value;
  double est_rel_error = 0.0;
  long evaluations = 0;
  int leaves = 0;
  bool converged = false;
  SurfaceNodes nodes;  // filled iff collect_nodes
};

AdaptiveResult adaptive_patch_integrate(
    const std::vector<std::array<Vec3, 3>>& base, const PatchMap& map,
    const LogDensity& f, const AdaptiveOptions& opts = {});

// Radial rule on [0, 1] graded toward 1 (cells halving in width), for
// boundary-concentrated volume pencils.  Weights do NOT include rho^2.
struct RadialRule {
  std::vector<double> rho;
  std::vector<double> w;
};
RadialRule graded_radial_rule(int cells, int order);

}  // namespace enclosure
