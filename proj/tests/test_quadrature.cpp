#include <cmath>

#include "doctest.h"
#include "enclosure/geometry.hpp"
#include "enclosure/quadrature.hpp"
#include "enclosure/types.hpp"

using namespace enclosure;

TEST_CASE("gauss-legendre: exactness and weight sum") {
  const auto& [x, w] = gauss_legendre(16);
  REQUIRE(x.size() == 16);
  double sum = 0.0, m2 = 0.0, m10 = 0.0, m30 = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sum += w[i];
    m2 += w[i] * std::pow(x[i], 2);
    m10 += w[i] * std::pow(x[i], 10);
    m30 += w[i] * std::pow(x[i], 30);
  }
  CHECK(sum == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(m2 == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
  CHECK(m10 == doctest::Approx(2.0 / 11.0).epsilon(1e-13));
  CHECK(m30 == doctest::Approx(2.0 / 31.0).epsilon(1e-12));  // degree 31 rule
}

TEST_CASE("ball rule integrates polynomials exactly") {
  Ball B;
  B.center = Vec3(0.3, -0.2, 0.5);
  B.radius = 1.7;
  const BallRule rule = ball_rule(B, 8, 8, 16);
  double vol = 0.0, x2 = 0.0;
  for (std::size_t i = 0; i < rule.points.size(); ++i) {
    vol += rule.weights[i];
    const Vec3 y = rule.points[i] - B.center;
    x2 += rule.weights[i] * y.x() * y.x();
  }
  CHECK(vol == doctest::Approx(B.volume()).epsilon(1e-13));
  // int x^2 over ball = 4 pi R^5 / 15
  CHECK(x2 == doctest::Approx(4.0 * kPi * std::pow(B.radius, 5) / 15.0)
                  .epsilon(1e-12));
}

TEST_CASE("tau-adapted ball rule resolves the exponential kernel") {
  Ball B;
  B.center = Vec3::Zero();
  B.radius = 0.5;
  const Vec3 x(2.0, 1.0, 0.0);
  for (const double tau : {1.0, 10.0, 40.0}) {
    const BallRule rule = ball_rule_for(B, tau);
    // reference: radial closed form int_B e^{-tau|x-y|}/(4 pi |x-y|) dy
    // computed by a fine 1-D rule on the radial representation
    const auto& [gx, gw] = gauss_legendre(200);
    const double r = x.norm();
    double ref = 0.0;
    for (int i = 0; i < 200; ++i) {
      const double s = 0.5 * B.radius * (gx[i] + 1.0);
      const double w = 0.5 * B.radius * gw[i];
      // shell integral: s/(2 tau r) (e^{-tau(r-s)} - e^{-tau(r+s)})
      ref += w * s / (2.0 * tau * r) *
             (std::exp(-tau * (r - s)) - std::exp(-tau * (r + s)));
    }
    double num = 0.0;
    for (std::size_t i = 0; i < rule.points.size(); ++i) {
      const double d = (x - rule.points[i]).norm();
      num += rule.weights[i] * std::exp(-tau * d) / (4.0 * kPi * d);
    }
    CHECK(num == doctest::Approx(ref).epsilon(1e-11));
  }
}

TEST_CASE("graded radial rule: exact on smooth moments, graded to 1") {
  const RadialRule rr = graded_radial_rule(6, 8);
  double m0 = 0.0, m2 = 0.0, m7 = 0.0;
  for (std::size_t i = 0; i < rr.rho.size(); ++i) {
    m0 += rr.w[i];
    m2 += rr.w[i] * rr.rho[i] * rr.rho[i];
    m7 += rr.w[i] * std::pow(rr.rho[i], 7);
  }
  CHECK(m0 == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(m2 == doctest::Approx(1.0 / 3.0).epsilon(1e-13));
  CHECK(m7 == doctest::Approx(1.0 / 8.0).epsilon(1e-12));
}

TEST_CASE("adaptive patch integration: sphere area and concentration") {
  // flat-parameter icosphere triangles mapped to the unit sphere
  const DirMesh mesh = icosphere_mesh(2);
  std::vector<std::array<Vec3, 3>> base;
  for (const auto& f : mesh.faces) {
    base.push_back(
        {mesh.vertices[f[0]], mesh.vertices[f[1]], mesh.vertices[f[2]]});
  }
  const PatchMap map = [](const Vec3& sigma, const Vec3& tri_n) {
    PatchSample s;
    const double n = sigma.norm();
    s.x = sigma / n;
    s.nu = s.x;
    // radial chord -> sphere projection: dA = |sigma . n_flat| / |sigma|^3
    s.jac = std::fabs(sigma.dot(tri_n)) / (n * n * n);
    return s;
  };

  SUBCASE("area") {
    AdaptiveOptions opts;
    // 1e-8 would exhaust the leaf budget on a globally smooth integrand;
    // 1e-6 converges with measured error below 1e-9
    opts.rel_tol = 1e-6;
    const auto res = adaptive_patch_integrate(
        base, map, [](const PatchSample&) { return LogScaled::from_value(1.0); },
        opts);
    CHECK(res.converged);
    CHECK(res.value.value() == doctest::Approx(4.0 * kPi).epsilon(1e-7));
  }

  SUBCASE("concentrated integrand near a path minimum") {
    // e^{-tau phi} with phi the broken path of the reference pair: the
    // integral concentrates near q; compare two tolerance levels.
    const Vec3 p(4.0, 0.0, 0.0), pp(0.0, 4.0, 0.0);
    const double tau = 60.0;
    const LogDensity f = [&](const PatchSample& s) {
      return log_exp(-tau * broken_path(s.x, p, pp));
    };
    AdaptiveOptions loose, tight;
    loose.rel_tol = 1e-4;
    tight.rel_tol = 1e-8;
    const auto a = adaptive_patch_integrate(base, map, f, loose);
    const auto b = adaptive_patch_integrate(base, map, f, tight);
    REQUIRE(b.converged);
    const double rel = std::fabs((a.value / b.value).value() - 1.0);
    CHECK(rel < 1e-3);
    CHECK(b.evaluations > a.evaluations);
  }
}
