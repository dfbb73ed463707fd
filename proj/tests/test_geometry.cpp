// Broken-path geometry oracles.  Reference configuration throughout: unit
// sphere at the origin, p = (4,0,0), p' = (0,4,0), for which the closed
// forms are frozen below (recomputed from first principles, not copied).

#include <cmath>
#include <random>

#include "doctest.h"
#include "enclosure/geometry.hpp"
#include "enclosure/types.hpp"

using namespace enclosure;

namespace {
const Vec3 kP(4.0, 0.0, 0.0);
const Vec3 kPp(0.0, 4.0, 0.0);
const double kS2 = std::sqrt(2.0) / 2.0;
const Vec3 kQ(kS2, kS2, 0.0);
// r = |q - p| = sqrt(17 - 4 sqrt(2)); c = 2 r
const double kR = std::sqrt(17.0 - 4.0 * std::sqrt(2.0));
const double kC = 2.0 * kR;
}  // namespace

TEST_CASE("spheroid frame closed forms on the reference pair") {
  const SpheroidFrame E(kP, kPp, kC);
  CHECK(E.focal_distance() == doctest::Approx(4.0 * std::sqrt(2.0)));
  CHECK(E.semi_major() == doctest::Approx(kC / 2.0));
  const double b = std::sqrt(kC * kC / 4.0 - 8.0);
  CHECK(E.semi_minor() == doctest::Approx(b).epsilon(1e-14));
  CHECK((E.center() - Vec3(2.0, 2.0, 0.0)).norm() < 1e-15);

  // frozen: r = 3.367958691924178
  CHECK(kR == doctest::Approx(3.367958691924178).epsilon(1e-15));
  const Vec3 omega = (kQ - kPp).normalized();
  CHECK(E.radius_from_second_focus(omega) ==
        doctest::Approx(kR).epsilon(1e-13));
  CHECK((E.point_from_second_focus(omega) - kQ).norm() < 1e-12);
  CHECK(E.contains(kQ));
  CHECK(E.contains(Vec3(2.0, 2.0, 0.0)));
  CHECK(!E.contains(Vec3(2.0, 2.0, 10.0)));
}

TEST_CASE("spheroid points satisfy the defining equation in random frames") {
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 50; ++i) {
    const Vec3 p(u(rng), u(rng), u(rng));
    const Vec3 pp = p + Vec3(1.5 + u(rng), u(rng), u(rng));
    const double L = (p - pp).norm();
    const double c = L * (1.0 + 0.1 + 2.0 * std::fabs(u(rng)));
    const SpheroidFrame E(p, pp, c);
    Vec3 w(u(rng), u(rng), u(rng));
    if (w.norm() < 1e-3) w = Vec3::UnitZ();
    w.normalize();
    const Vec3 x = E.point_from_second_focus(w);
    CHECK(broken_path(x, p, pp) == doctest::Approx(c).epsilon(1e-12));
  }
}

TEST_CASE("unit pair scalars at the reference reflection point") {
  const UnitPairGeometry g = unit_pair(kQ, kP, kPp);
  CHECK(g.r == doctest::Approx(kR).epsilon(1e-15));
  CHECK(g.r_prime == doctest::Approx(kR).epsilon(1e-15));
  // frozen: d = A.A' = -0.41054345522131547
  CHECK(g.d == doctest::Approx(-0.41054345522131547).epsilon(1e-13));
  CHECK(g.lambda == doctest::Approx(0.593831511293674).epsilon(1e-13));
  CHECK(g.A.dot(g.A) == doctest::Approx(1.0));
  CHECK((g.A.cross(g.A_prime) - g.cross).norm() < 1e-15);
}

TEST_CASE("spheroid inward normal equals the obstacle outward normal") {
  // At a contact point of the enclosing spheroid with the obstacle the
  // inward spheroid normal is the outward obstacle normal (here: radial).
  const UnitPairGeometry g = unit_pair(kQ, kP, kPp);
  const Vec3 nu = spheroid_inward_normal(g);
  CHECK((nu - kQ.normalized()).norm() < 1e-13);
  CHECK(snell_residual(g, nu) < 1e-14);
}

TEST_CASE("tangent frames are right-handed and orthonormal") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 30; ++i) {
    Vec3 nu(u(rng), u(rng), u(rng));
    if (nu.norm() < 1e-3) nu = Vec3::UnitX();
    nu.normalize();
    const TangentFrame tf = tangent_frame(Vec3::Zero(), nu);
    CHECK(tf.e1.dot(tf.e2) == doctest::Approx(0.0).epsilon(1e-13));
    CHECK(tf.e1.dot(tf.nu) == doctest::Approx(0.0).epsilon(1e-13));
    CHECK(tf.e1.norm() == doctest::Approx(1.0));
    CHECK((tf.e1.cross(tf.e2) - tf.nu).norm() < 1e-12);
  }
  const TangentFrame ta =
      tangent_frame_along(Vec3::Zero(), Vec3::UnitZ(), Vec3(3.0, 4.0, 7.0));
  CHECK(ta.e1.dot(Vec3(3.0, 4.0, 0.0).normalized()) ==
        doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("spheroid shape operator: frozen principal curvatures") {
  const UnitPairGeometry g = unit_pair(kQ, kP, kPp);
  const Vec3 nu = spheroid_inward_normal(g);
  const TangentFrame tf = tangent_frame_along(kQ, nu, g.cross);
  const ShapeOperator2 S = spheroid_shape_operator(g, tf);

  CHECK(S.gauss() ==
        doctest::Approx(g.lambda * g.lambda / 4.0).epsilon(1e-13));
  const auto pr = S.principal();
  // frozen eigenvalues of the reference spheroid at q
  CHECK(pr.k1 == doctest::Approx(0.546918160678027).epsilon(1e-12));
  CHECK(pr.k2 == doctest::Approx(0.16119224463499165).epsilon(1e-12));
  // mean curvature identity: H = (lambda/8)(3 + d) sqrt(2/(1+d))
  const double H_id =
      g.lambda / 8.0 * (3.0 + g.d) * std::sqrt(2.0 / (1.0 + g.d));
  CHECK(S.mean() == doctest::Approx(H_id).epsilon(1e-13));

  const SpheroidCurvature sc = spheroid_principal_curvatures(g);
  CHECK(sc.k1 == doctest::Approx(pr.k1).epsilon(1e-12));
  CHECK(sc.k2 == doctest::Approx(pr.k2).epsilon(1e-12));
  CHECK(sc.gauss == doctest::Approx(S.gauss()).epsilon(1e-12));
  CHECK(sc.mean == doctest::Approx(S.mean()).epsilon(1e-12));
}

TEST_CASE("assembled path hessian matches finite differences (sphere)") {
  const UnitPairGeometry g = unit_pair(kQ, kP, kPp);
  const Vec3 nu = kQ.normalized();  // outward obstacle normal
  const TangentFrame tf = tangent_frame_along(kQ, nu, g.cross);
  // unit-sphere chart height above the tangent plane at q
  const auto height = [&](const Vec2& s) {
    return std::sqrt(std::max(0.0, 1.0 - s.squaredNorm())) - 1.0;
  };
  Mat2 hess_D;
  hess_D << -1.0, 0.0, 0.0, -1.0;  // outward chart of the unit sphere
  const Mat2 assembled = path_hessian_assembled(g, tf, hess_D);
  const Mat2 fd = path_hessian_fd(kP, kPp, tf, height, 1e-4);
  CHECK((assembled - fd).cwiseAbs().maxCoeff() < 1e-6);

  // det(path hessian) = 2 (1 + d) det(S_E - S_D); frozen det value
  const double det_ref = 1.796269371264351;  // (k1 + 1)(k2 + 1)
  CHECK(assembled.determinant() ==
        doctest::Approx(2.0 * (1.0 + g.d) * det_ref).epsilon(1e-12));
}

TEST_CASE("closed-form determinant: variant values on the reference pair") {
  const UnitPairGeometry g = unit_pair(kQ, kP, kPp);
  const Vec3 nu = kQ.normalized();
  const TangentFrame tf = tangent_frame_along(kQ, nu, g.cross);
  ShapeOperator2 S_D;
  S_D.m << -1.0, 0.0, 0.0, -1.0;
  const double quarter =
      det_shape_diff_closed_form(g, S_D, tf, 0.0, CorrectionWeight::quarter);
  const double half =
      det_shape_diff_closed_form(g, S_D, tf, 0.0, CorrectionWeight::half);
  // the rederived (quarter) weight reproduces the eigenvalue product
  CHECK(quarter == doctest::Approx(1.796269371264351).epsilon(1e-12));
  // the printed (half) weight disagrees markedly for this geometry
  CHECK(std::fabs(half - quarter) > 0.3);
}

TEST_CASE("curvature system solve round-trips") {
  std::mt19937_64 rng(37);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 40; ++i) {
    const double r = 2.0 + 3.0 * u(rng);
    const double rp = 2.0 + 3.0 * u(rng);
    const double d = -0.8 + 1.6 * u(rng);
    const double s1 = 0.05 + 0.1 * u(rng);
    const double s2 = s1 + 0.1 + 0.1 * u(rng);
    const double X1 = -1.0 + 2.0 * u(rng);
    const double K = 0.2 + 2.0 * u(rng);
    const double l1 = 1.0 / r + 1.0 / (rp - s1);
    const double l2 = 1.0 / r + 1.0 / (rp - s2);
    const double det1 =
        l1 * l1 / 4.0 - std::sqrt(2.0 / (1.0 + d)) * l1 * X1 + K;
    const double det2 =
        l2 * l2 / 4.0 - std::sqrt(2.0 / (1.0 + d)) * l2 * X1 + K;
    const CurvatureSolve cs = solve_curvature_system(l1, det1, l2, det2, d);
    CHECK(cs.X1 == doctest::Approx(X1).epsilon(1e-9));
    CHECK(cs.K == doctest::Approx(K).epsilon(1e-8));
    CHECK(cs.cond > 1.0);
  }
}

TEST_CASE("icosphere meshes: counts, unit norms, determinism") {
  for (int level = 0; level <= 3; ++level) {
    const DirMesh mesh = icosphere_mesh(level);
    const int expect_v = 10 * (1 << (2 * level)) + 2;
    const int expect_f = 20 * (1 << (2 * level));
    CHECK(static_cast<int>(mesh.vertices.size()) == expect_v);
    CHECK(static_cast<int>(mesh.faces.size()) == expect_f);
    for (const auto& v : mesh.vertices) {
      CHECK(v.norm() == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
  const auto a = icosphere_directions(2);
  const auto b = icosphere_directions(2);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) CHECK((a[i] - b[i]).norm() == 0.0);
}

TEST_CASE("degenerate inputs raise named precondition errors") {
  CHECK_THROWS_AS(SpheroidFrame(kP, kPp, 1.0), PreconditionError);
  CHECK_THROWS_AS(unit_pair(kP, kP, kPp), PreconditionError);
  const UnitPairGeometry g = unit_pair(Vec3(2.0, 0.0, 0.0), Vec3(0.0, 0.0, 0.0),
                                       Vec3(4.0, 0.0, 0.0));
  // point on the focal segment: d = -1, no normal
  CHECK_THROWS_AS(spheroid_inward_normal(g), PreconditionError);
}
