#pragma once
// Broken-path geometry: confocal spheroids of a source/receiver pair,
// reflection-point frames, shape operators, and the small linear system that
// turns two shifted determinants into (curvature combination, Gauss curvature).

#include <functional>
#include <vector>

#include "enclosure/types.hpp"

namespace enclosure {

// |p - x| + |x - p'|.
inline double broken_path(const Vec3& x, const Vec3& p, const Vec3& p_prime) {
  return (x - p).norm() + (x - p_prime).norm();
}

// Level set { x : broken_path(x; p, p') = c }, a prolate spheroid with foci
// p and p'.  Requires c > |p - p'|.
struct SpheroidFrame {
  Vec3 p = Vec3::Zero();
  Vec3 p_prime = Vec3::Zero();
  double c = 0.0;

  SpheroidFrame() = default;
  SpheroidFrame(const Vec3& p_, const Vec3& p_prime_, double c_);

  double focal_distance() const { return (p - p_prime).norm(); }
  Vec3 center() const { return 0.5 * (p + p_prime); }
  double semi_major() const { return 0.5 * c; }
  double semi_minor() const;

  // Distance from p' to the surface along unit direction omega.
  double radius_from_second_focus(const Vec3& omega) const;
  Vec3 point_from_second_focus(const Vec3& omega) const;

  bool contains(const Vec3& x) const { return broken_path(x, p, p_prime) <= c; }
};

// Unit vectors from the two foci to a point q, and derived scalars.
struct UnitPairGeometry {
  Vec3 q, p, p_prime;
  Vec3 A;        // (q - p) / r
  Vec3 A_prime;  // (q - p') / r'
  double r = 0.0, r_prime = 0.0;
  double d = 0.0;       // A . A'
  double lambda = 0.0;  // 1/r + 1/r'
  Vec3 cross;           // A x A'
};

UnitPairGeometry unit_pair(const Vec3& q, const Vec3& p, const Vec3& p_prime);

// Normal of the spheroid through q pointing toward its interior,
// -(A + A') / sqrt(2 (1 + d)).  Requires d > -1 (q off the focal segment).
Vec3 spheroid_inward_normal(const UnitPairGeometry& g);

// Orthonormal right-handed frame (e1, e2, nu) at a surface point.
struct TangentFrame {
  Vec3 origin = Vec3::Zero();
  Vec3 e1 = Vec3::UnitX();
  Vec3 e2 = Vec3::UnitY();
  Vec3 nu = Vec3::UnitZ();

  Vec3 chart_point(const Vec2& sigma, double height) const {
    return origin + sigma.x() * e1 + sigma.y() * e2 + height * nu;
  }
  Vec2 tangential(const Vec3& v) const { return Vec2(v.dot(e1), v.dot(e2)); }
};

// Deterministic frame: e1 is the projection of the least-aligned coordinate
// axis onto the tangent plane.
TangentFrame tangent_frame(const Vec3& origin, const Vec3& nu);
// Frame with e1 along the tangential part of a given direction.
TangentFrame tangent_frame_along(const Vec3& origin, const Vec3& nu,
                                 const Vec3& e1_hint);

// Symmetric 2x2 shape operator expressed in a tangent frame.  Sign
// convention: the matrix is the chart-height Hessian for the chart whose
// normal is the frame's nu (so a unit sphere with outward nu has -identity;
// the spheroid with inward nu has a positive definite operator).
struct ShapeOperator2 {
  Mat2 m = Mat2::Zero();

  double gauss() const { return m.determinant(); }
  double mean() const { return 0.5 * m.trace(); }

  struct Principal {
    double k1 = 0.0, k2 = 0.0;  // k1 >= k2
    Vec2 dir1 = Vec2::UnitX(), dir2 = Vec2::UnitY();
  };
  Principal principal() const;
};

// Shape operator of the spheroid through q in the given tangent frame whose
// nu must be the inward spheroid normal:
//   S v = lambda / sqrt(2(1+d)) * (v - A (A.v)/2 - A'(A'.v)/2).
ShapeOperator2 spheroid_shape_operator(const UnitPairGeometry& g,
                                       const TangentFrame& tf);

// Closed-form principal curvatures of the spheroid through q.
// k1 (along A x A') >= k2 (along A - A'); gauss = lambda^2 / 4 exactly.
struct SpheroidCurvature {
  double k1 = 0.0, k2 = 0.0;
  double gauss = 0.0;
  double mean = 0.0;
};
SpheroidCurvature spheroid_principal_curvatures(const UnitPairGeometry& g);

// Hessian of sigma -> broken_path(chart(sigma)) at sigma = 0, assembled from
// the pair geometry and the chart-height Hessian of the reflecting surface
// (frame nu = outward surface normal):
//   H_kj = lambda delta_kj - (A.e_k)(A.e_j)/r - (A'.e_k)(A'.e_j)/r'
//          - sqrt(2(1+d)) f''_kj.
Mat2 path_hessian_assembled(const UnitPairGeometry& g, const TangentFrame& tf,
                            const Mat2& height_hessian);

// Same by central finite differences over the chart; test oracle and the
// fallback for surfaces given only as a height function.
Mat2 path_hessian_fd(const Vec3& p, const Vec3& p_prime,
                     const TangentFrame& tf,
                     const std::function<double(const Vec2&)>& height,
                     double step);

// Norm of the tangential part of A + A'; zero exactly at reflection
// (generalized Snell) points.
double snell_residual(const UnitPairGeometry& g, const Vec3& nu);

// Two evaluation conventions for the curvature correction term in the
// closed-form determinant below (they differ in the weight of the
// normal-curvature term along A x A').
enum class CorrectionWeight { half, quarter };

// Closed form for det(path hessian) / (2 (1 + d)) at a reflection point,
// from the obstacle shape operator (outward chart) and the pair geometry;
// `s` shifts the second focus toward q by s (r' -> r' - s).
double det_shape_diff_closed_form(const UnitPairGeometry& g,
                                  const ShapeOperator2& obstacle_shape,
                                  const TangentFrame& tf, double s,
                                  CorrectionWeight w);

// 2x2 solve for (X1, K) from two shifted determinants:
//   det_i = lambda_i^2/4 - sqrt(2/(1+d)) lambda_i X1 + K,  lambda_i = 1/r + 1/(r'-s_i).
struct CurvatureSolve {
  double X1 = 0.0;  // mean curvature combination (weight-dependent meaning)
  double K = 0.0;   // Gauss curvature of the obstacle at q
  double cond = 0.0;
};
CurvatureSolve solve_curvature_system(double lambda1, double det1,
                                      double lambda2, double det2, double d);

// Unit-sphere triangulation from subdividing an icosahedron `level` times
// (10 * 4^level + 2 vertices, 20 * 4^level faces), deterministic order.
struct DirMesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 3>> faces;
};
DirMesh icosphere_mesh(int level);
std::vector<Vec3> icosphere_directions(int level);

}  // namespace enclosure
