#include "enclosure/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>

namespace enclosure {

const std::pair<std::vector<double>, std::vector<double>>& gauss_legendre(
    int n) {
  static std::mutex mu;
  static std::map<int, std::pair<std::vector<double>, std::vector<double>>>
      cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;

  std::vector<double> x(n), w(n);
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    double z = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
      }
      pp = n * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / pp;
      z -= dz;
      if (std::fabs(dz) < 1e-15) break;
    }
    x[i] = -z;
    x[n - 1 - i] = z;
    w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
    w[n - 1 - i] = w[i];
  }
  return cache.emplace(n, std::make_pair(std::move(x), std::move(w)))
      .first->second;
}

BallRule ball_rule(const Ball& ball, int n_radial, int n_polar,
                   int n_azimuthal) {
  const auto& [xr, wr] = gauss_legendre(n_radial);
  const auto& [xc, wc] = gauss_legendre(n_polar);
  BallRule rule;
  rule.points.reserve(n_radial * n_polar * n_azimuthal);
  rule.weights.reserve(rule.points.capacity());
  const double R = ball.radius;
  for (int i = 0; i < n_radial; ++i) {
    const double r = 0.5 * R * (xr[i] + 1.0);
    const double wrad = 0.5 * R * wr[i] * r * r;
    for (int j = 0; j < n_polar; ++j) {
      const double ct = xc[j];
      const double st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
      for (int k = 0; k < n_azimuthal; ++k) {
        const double ph = 2.0 * kPi * k / n_azimuthal;
        rule.points.push_back(ball.center +
                              r * Vec3(st * std::cos(ph), st * std::sin(ph),
                                       ct));
        rule.weights.push_back(wrad * wc[j] * (2.0 * kPi / n_azimuthal));
      }
    }
  }
  return rule;
}

BallRule ball_rule_for(const Ball& ball, double tau) {
  const double a = std::max(0.0, tau) * ball.radius;
  const int n = std::max(16, static_cast<int>(std::ceil(0.6 * a)) + 10);
  return ball_rule(ball, n, n, 2 * n);
}

RadialRule graded_radial_rule(int cells, int order) {
  const auto& [xg, wg] = gauss_legendre(order);
  RadialRule rule;
  rule.rho.reserve(cells * order);
  rule.w.reserve(cells * order);
  double lo = 0.0;
  for (int c = 0; c < cells; ++c) {
    const double hi = (c + 1 == cells) ? 1.0 : 1.0 - std::pow(2.0, -(c + 1));
    const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
    for (int i = 0; i < order; ++i) {
      rule.rho.push_back(mid + half * xg[i]);
      rule.w.push_back(half * wg[i]);
    }
    lo = hi;
  }
  return rule;
}

namespace {

struct Leaf {
  std::array<Vec3, 3> v;
  LogScaled val;
};

// 3-point edge-midpoint rule on one flat parameter triangle.
LogScaled leaf_value(const std::array<Vec3, 3>& v, const PatchMap& map,
                     const LogDensity& f, long& evals, SurfaceNodes* nodes) {
  const Vec3 n_raw = (v[1] - v[0]).cross(v[2] - v[0]);
  const double area2 = n_raw.norm();
  if (area2 <= 0.0) return LogScaled::zero();
  const Vec3 tri_n = n_raw / area2;
  const double wpt = 0.5 * area2 / 3.0;  // area / 3
  LogAccumulator acc;
  for (int e = 0; e < 3; ++e) {
    const Vec3 mid = 0.5 * (v[e] + v[(e + 1) % 3]);
    const PatchSample s = map(mid, tri_n);
    ++evals;
    if (s.jac == 0.0) continue;
    const LogScaled fx = f(s);
    acc.add(LogScaled::from_value(wpt * s.jac) * fx);
    if (nodes != nullptr) {
      nodes->x.push_back(s.x);
      nodes->nu.push_back(s.nu);
      nodes->log_w.push_back(std::log(wpt * s.jac));
    }
  }
  return acc.total();
}

LogScaled sum_leaves(const std::vector<Leaf>& leaves) {
  LogAccumulator acc;
  for (const auto& l : leaves) acc.add(l.val);
  return acc.total();
}

}  // namespace

AdaptiveResult adaptive_patch_integrate(
    const std::vector<std::array<Vec3, 3>>& base, const PatchMap& map,
    const LogDensity& f, const AdaptiveOptions& opts) {
  AdaptiveResult out;
  std::vector<Leaf> leaves;
  leaves.reserve(base.size());
  for (const auto& tri : base) {
    leaves.push_back({tri, leaf_value(tri, map, f, out.evaluations, nullptr)});
  }

  LogScaled total = sum_leaves(leaves);
  LogScaled prev = total;
  const double log_tol = std::log(opts.rel_tol);
  int stable_rounds = 0;
  for (int round = 0; round < opts.max_rounds; ++round) {
    // Refine every leaf whose magnitude could still move the total.  With a
    // zero running total (integrand not yet located, or exact cancellation)
    // probe uniformly for a couple of rounds.
    const bool probe_all = total.is_zero() && round < 2;
    const double cut = total.is_zero()
                           ? std::numeric_limits<double>::infinity()
                           : total.log_abs + log_tol + std::log(0.25);
    std::vector<Leaf> next;
    next.reserve(leaves.size());
    int refined = 0;
    for (const auto& l : leaves) {
      const bool worth_splitting =
          probe_all || (!l.val.is_zero() && l.val.log_abs > cut);
      if (!worth_splitting ||
          static_cast<int>(next.size()) + 4 > opts.max_leaves) {
        next.push_back(l);
        continue;
      }
      ++refined;
      const Vec3 m01 = 0.5 * (l.v[0] + l.v[1]);
      const Vec3 m12 = 0.5 * (l.v[1] + l.v[2]);
      const Vec3 m20 = 0.5 * (l.v[2] + l.v[0]);
      const std::array<std::array<Vec3, 3>, 4> kids = {
          std::array<Vec3, 3>{l.v[0], m01, m20},
          std::array<Vec3, 3>{l.v[1], m12, m01},
          std::array<Vec3, 3>{l.v[2], m20, m12},
          std::array<Vec3, 3>{m01, m12, m20}};
      for (const auto& k : kids) {
        next.push_back({k, leaf_value(k, map, f, out.evaluations, nullptr)});
      }
    }
    leaves.swap(next);
    total = sum_leaves(leaves);

    const LogScaled diff = total - prev;
    const bool small_change =
        diff.is_zero() ||
        (!total.is_zero() && diff.log_abs <= total.log_abs + log_tol);
    stable_rounds = small_change ? stable_rounds + 1 : 0;
    if (diff.is_zero()) {
      out.est_rel_error = 0.0;
    } else if (!total.is_zero()) {
      out.est_rel_error = std::exp(diff.log_abs - total.log_abs);
    }
    prev = total;
    if (refined == 0 || (stable_rounds >= 2 && round + 1 >= opts.min_rounds)) {
      out.converged = true;
      break;
    }
    if (static_cast<int>(leaves.size()) >= opts.max_leaves) break;
  }

  out.value = total;
  out.leaves = static_cast<int>(leaves.size());
  if (opts.collect_nodes) {
    long dummy = 0;
    for (const auto& l : leaves) {
      leaf_value(l.v, map, f, dummy, &out.nodes);
    }
  }
  return out;
}

}  // namespace enclosure
