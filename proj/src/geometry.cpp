#include "enclosure/geometry.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <cstdio>
#include <map>
#include <utility>

namespace enclosure {

SpheroidFrame::SpheroidFrame(const Vec3& p_, const Vec3& p_prime_, double c_)
    : p(p_), p_prime(p_prime_), c(c_) {
  const double L = focal_distance();
  if (!(c > L) || !(c > 0.0)) {
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "spheroid level c=%.6g must exceed the focal distance %.6g",
                  c, L);
    throw PreconditionError(buf);
  }
}

double SpheroidFrame::semi_minor() const {
  const double L = focal_distance();
  return 0.5 * std::sqrt(c * c - L * L);
}

double SpheroidFrame::radius_from_second_focus(const Vec3& omega) const {
  const Vec3 w = omega.normalized();
  const Vec3 pq = p - p_prime;
  const double L2 = pq.squaredNorm();
  return (c * c - L2) / (2.0 * (c - w.dot(pq)));
}

Vec3 SpheroidFrame::point_from_second_focus(const Vec3& omega) const {
  const Vec3 w = omega.normalized();
  return p_prime + radius_from_second_focus(w) * w;
}

UnitPairGeometry unit_pair(const Vec3& q, const Vec3& p, const Vec3& p_prime) {
  UnitPairGeometry g;
  g.q = q;
  g.p = p;
  g.p_prime = p_prime;
  g.r = (q - p).norm();
  g.r_prime = (q - p_prime).norm();
  const double scale = std::max({g.r, g.r_prime, 1e-300});
  if (g.r <= 1e-14 * scale || g.r_prime <= 1e-14 * scale) {
    throw PreconditionError("unit_pair: point coincides with a focus");
  }
  g.A = (q - p) / g.r;
  g.A_prime = (q - p_prime) / g.r_prime;
  g.d = g.A.dot(g.A_prime);
  g.lambda = 1.0 / g.r + 1.0 / g.r_prime;
  g.cross = g.A.cross(g.A_prime);
  return g;
}

Vec3 spheroid_inward_normal(const UnitPairGeometry& g) {
  const double s = 2.0 * (1.0 + g.d);
  if (s <= 1e-12) {
    throw PreconditionError(
        "spheroid normal undefined: point lies on the focal segment");
  }
  return -(g.A + g.A_prime) / std::sqrt(s);
}

TangentFrame tangent_frame(const Vec3& origin, const Vec3& nu) {
  const Vec3 n = nu.normalized();
  int axis = 0;
  double best = std::fabs(n.x());
  if (std::fabs(n.y()) < best) {
    axis = 1;
    best = std::fabs(n.y());
  }
  if (std::fabs(n.z()) < best) axis = 2;
  return tangent_frame_along(origin, n, Vec3::Unit(axis));
}

TangentFrame tangent_frame_along(const Vec3& origin, const Vec3& nu,
                                 const Vec3& e1_hint) {
  TangentFrame tf;
  tf.origin = origin;
  tf.nu = nu.normalized();
  Vec3 t = e1_hint - e1_hint.dot(tf.nu) * tf.nu;
  const double tn = t.norm();
  if (tn <= 1e-12 * std::max(1.0, e1_hint.norm())) {
    throw PreconditionError("tangent frame hint is parallel to the normal");
  }
  tf.e1 = t / tn;
  tf.e2 = tf.nu.cross(tf.e1);
  return tf;
}

ShapeOperator2::Principal ShapeOperator2::principal() const {
  Principal out;
  const double a = m(0, 0), b = 0.5 * (m(0, 1) + m(1, 0)), c = m(1, 1);
  const double half_tr = 0.5 * (a + c);
  const double disc = std::sqrt(0.25 * (a - c) * (a - c) + b * b);
  out.k1 = half_tr + disc;
  out.k2 = half_tr - disc;
  if (disc <= 1e-14 * (std::fabs(a) + std::fabs(c) + 1e-300)) {
    out.dir1 = Vec2::UnitX();
    out.dir2 = Vec2::UnitY();
    return out;
  }
  // Eigenvector for k1 of [[a b],[b c]]: pick the better-conditioned column.
  Vec2 v1(b, out.k1 - a);
  Vec2 v2(out.k1 - c, b);
  out.dir1 = (v1.norm() >= v2.norm() ? v1 : v2).normalized();
  out.dir2 = Vec2(-out.dir1.y(), out.dir1.x());
  return out;
}

ShapeOperator2 spheroid_shape_operator(const UnitPairGeometry& g,
                                       const TangentFrame& tf) {
  const Vec3 nu = spheroid_inward_normal(g);
  if (nu.dot(tf.nu) < 1.0 - 1e-8) {
    throw PreconditionError(
        "spheroid_shape_operator: frame normal is not the inward spheroid "
        "normal at q");
  }
  const double k = g.lambda / std::sqrt(2.0 * (1.0 + g.d));
  const Vec2 a = tf.tangential(g.A);
  const Vec2 ap = tf.tangential(g.A_prime);
  ShapeOperator2 S;
  S.m = k * (Mat2::Identity() - 0.5 * a * a.transpose() -
             0.5 * ap * ap.transpose());
  return S;
}

SpheroidCurvature spheroid_principal_curvatures(const UnitPairGeometry& g) {
  SpheroidCurvature out;
  const double opd = 1.0 + g.d;
  if (opd <= 1e-12) {
    throw PreconditionError(
        "spheroid curvature undefined on the focal segment");
  }
  out.k1 = g.lambda / std::sqrt(2.0 * opd);
  out.k2 = g.lambda * std::sqrt(opd) / (2.0 * std::sqrt(2.0));
  out.gauss = 0.25 * g.lambda * g.lambda;
  out.mean = 0.5 * (out.k1 + out.k2);
  return out;
}

Mat2 path_hessian_assembled(const UnitPairGeometry& g, const TangentFrame& tf,
                            const Mat2& height_hessian) {
  const Vec2 a = tf.tangential(g.A);
  const Vec2 ap = tf.tangential(g.A_prime);
  const double root = std::sqrt(2.0 * (1.0 + g.d));
  Mat2 H = g.lambda * Mat2::Identity();
  H -= (a * a.transpose()) / g.r;
  H -= (ap * ap.transpose()) / g.r_prime;
  H -= root * height_hessian;
  return H;
}

Mat2 path_hessian_fd(const Vec3& p, const Vec3& p_prime,
                     const TangentFrame& tf,
                     const std::function<double(const Vec2&)>& height,
                     double step) {
  auto phi = [&](double s1, double s2) {
    const Vec2 sg(s1, s2);
    return broken_path(tf.chart_point(sg, height(sg)), p, p_prime);
  };
  const double h = step;
  Mat2 H;
  const double p00 = phi(0, 0);
  H(0, 0) = (phi(h, 0) - 2.0 * p00 + phi(-h, 0)) / (h * h);
  H(1, 1) = (phi(0, h) - 2.0 * p00 + phi(0, -h)) / (h * h);
  H(0, 1) = (phi(h, h) - phi(h, -h) - phi(-h, h) + phi(-h, -h)) / (4 * h * h);
  H(1, 0) = H(0, 1);
  return H;
}

double snell_residual(const UnitPairGeometry& g, const Vec3& nu) {
  const Vec3 s = g.A + g.A_prime;
  return (s - s.dot(nu) * nu).norm();
}

double det_shape_diff_closed_form(const UnitPairGeometry& g,
                                  const ShapeOperator2& obstacle_shape,
                                  const TangentFrame& tf, double s,
                                  CorrectionWeight w) {
  const double rp = g.r_prime - s;
  if (!(rp > 0.0)) {
    throw PreconditionError("shift s places the focus past the reflector");
  }
  const double lambda_s = 1.0 / g.r + 1.0 / rp;
  const double opd = 1.0 + g.d;
  const double H_D = obstacle_shape.mean();
  const double K_D = obstacle_shape.gauss();
  // Normal-curvature correction along A x A'; the |A x A'|^2 factor is
  // carried by the unnormalized tangential projection.
  const Vec2 vt = tf.tangential(g.cross);
  const double quad = vt.dot(obstacle_shape.m * vt);
  const double denom = (w == CorrectionWeight::quarter) ? 4.0 * opd : 2.0 * opd;
  const double corr = quad / denom;
  return 0.25 * lambda_s * lambda_s -
         std::sqrt(2.0 / opd) * lambda_s * (H_D - corr) + K_D;
}

CurvatureSolve solve_curvature_system(double lambda1, double det1,
                                      double lambda2, double det2, double d) {
  const double root = std::sqrt(2.0 / (1.0 + d));
  Mat2 M;
  M << -root * lambda1, 1.0, -root * lambda2, 1.0;
  Vec2 rhs(det1 - 0.25 * lambda1 * lambda1, det2 - 0.25 * lambda2 * lambda2);
  Eigen::JacobiSVD<Mat2> svd(M, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const double smin = svd.singularValues()(1);
  if (smin <= 1e-14 * svd.singularValues()(0)) {
    throw NumericError(
        "curvature system is singular: the two shifts give the same "
        "spheroid curvature scale");
  }
  Vec2 x = svd.solve(rhs);
  CurvatureSolve out;
  out.X1 = x(0);
  out.K = x(1);
  out.cond = svd.singularValues()(0) / smin;
  return out;
}

DirMesh icosphere_mesh(int level) {
  DirMesh m;
  const double t = 0.5 * (1.0 + std::sqrt(5.0));
  const double v[12][3] = {{-1, t, 0},  {1, t, 0},  {-1, -t, 0}, {1, -t, 0},
                           {0, -1, t},  {0, 1, t},  {0, -1, -t}, {0, 1, -t},
                           {t, 0, -1},  {t, 0, 1},  {-t, 0, -1}, {-t, 0, 1}};
  for (const auto& row : v) {
    m.vertices.push_back(Vec3(row[0], row[1], row[2]).normalized());
  }
  m.faces = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
             {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
             {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
             {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};
  for (int lev = 0; lev < level; ++lev) {
    std::map<std::pair<int, int>, int> midpoint;
    auto mid = [&](int a, int b) {
      auto key = std::minmax(a, b);
      auto it = midpoint.find(key);
      if (it != midpoint.end()) return it->second;
      const int idx = static_cast<int>(m.vertices.size());
      m.vertices.push_back((m.vertices[a] + m.vertices[b]).normalized());
      midpoint.emplace(key, idx);
      return idx;
    };
    std::vector<std::array<int, 3>> next;
    next.reserve(m.faces.size() * 4);
    for (const auto& f : m.faces) {
      const int ab = mid(f[0], f[1]);
      const int bc = mid(f[1], f[2]);
      const int ca = mid(f[2], f[0]);
      next.push_back({f[0], ab, ca});
      next.push_back({f[1], bc, ab});
      next.push_back({f[2], ca, bc});
      next.push_back({ab, bc, ca});
    }
    m.faces = std::move(next);
  }
  return m;
}

std::vector<Vec3> icosphere_directions(int level) {
  return icosphere_mesh(level).vertices;
}

}  // namespace enclosure
