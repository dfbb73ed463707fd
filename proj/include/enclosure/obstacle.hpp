#pragma once
// Obstacle shapes (sphere / ellipsoid / triangle mesh): containment,
// projection, normals, shape operators, surface sampling, and global
// minimization of the broken path over the boundary (first reflectors).

#include <array>
#include <string>
#include <vector>

#include "enclosure/geometry.hpp"
#include "enclosure/quadrature.hpp"
#include "enclosure/types.hpp"

namespace enclosure {

enum class ObstacleKind { sphere, ellipsoid, mesh };

struct TriMesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 3>> faces;  // 0-based, outward winding
};

// ASCII triangle format: lines `v x y z` and `f i j k` (1-based indices).
TriMesh load_mesh_ascii(const std::string& path);
void save_mesh_ascii(const std::string& path, const TriMesh& mesh);
// Icosphere triangulation of a sphere, for tests and mesh-mode fixtures.
TriMesh make_sphere_mesh(const Vec3& center, double radius, int level);

class ObstacleShape {
 public:
  static ObstacleShape make_sphere(const Vec3& center, double radius);
  static ObstacleShape make_ellipsoid(const Vec3& center, const Vec3& semiaxes,
                                      const Mat3& orientation =
                                          Mat3::Identity());
  // Validates watertightness, consistent outward winding, positive volume.
  static ObstacleShape make_mesh(TriMesh mesh);

  ObstacleKind kind() const { return kind_; }
  const Vec3& center() const { return center_; }
  // Semiaxes/orientation of the analytic kinds (all equal for spheres).
  const Vec3& semiaxes() const { return semiaxes_; }
  const Mat3& orientation() const { return orient_; }
  double volume() const;
  double diameter() const;
  double mesh_resolution() const { return h_mesh_; }  // 0 for analytic kinds
  std::pair<Vec3, Vec3> bounding_box() const;

  bool contains(const Vec3& x) const;  // closed solid
  // Nearest boundary point and unsigned distance to the boundary.
  Vec3 project(const Vec3& x) const;
  double surface_distance(const Vec3& x) const;
  // Distance to the closed solid (0 inside).
  double solid_distance(const Vec3& x) const;
  Vec3 outward_normal(const Vec3& q) const;

  // Chart-height Hessian of the boundary at q in the given frame, whose nu
  // must be the outward normal (convex bodies give negative semidefinite
  // operators).  Mesh kind: local quadric fit, accuracy O(h_mesh).
  ShapeOperator2 shape_operator(const Vec3& q, const TangentFrame& tf) const;
  struct CurvatureInfo {
    ShapeOperator2 op;
    TangentFrame frame;
    double gauss = 0.0;
    double mean = 0.0;
  };
  CurvatureInfo curvature_at(const Vec3& q) const;

  // Surface sampling (icosphere image for analytic kinds; vertices plus face
  // centroids for meshes).
  std::vector<Vec3> surface_samples(int level) const;

  // Quadrature support: flat parameter triangles plus the measure-carrying
  // maps consumed by adaptive_patch_integrate.
  std::vector<std::array<Vec3, 3>> param_triangles(int level) const;
  PatchMap surface_map() const;
  // Volume pencils from the star center: the returned sample's x holds the
  // ray vector g(sigma) (boundary minus center), jac the cone jacobian;
  // volume points are center + rho * g, rho in [0,1], measure rho^2 jac.
  PatchMap pencil_map() const;

  const TriMesh& mesh_data() const;

 private:
  ObstacleShape() = default;
  ObstacleKind kind_ = ObstacleKind::sphere;
  Vec3 center_ = Vec3::Zero();
  double radius_ = 1.0;       // sphere
  Vec3 semiaxes_ = Vec3::Ones();
  Mat3 orient_ = Mat3::Identity();   // columns = body axes
  Mat3 M_ = Mat3::Identity();        // unit-sphere image map (ellipsoid)
  Mat3 Q_ = Mat3::Identity();        // implicit quadratic form
  TriMesh mesh_;
  double h_mesh_ = 0.0;
  double volume_ = 0.0;
  std::vector<Vec3> vertex_normals_;  // mesh: area-weighted
};

struct Reflector {
  Vec3 q = Vec3::Zero();
  Vec3 nu = Vec3::Zero();
  double phi = 0.0;
};

struct ReflectorSet {
  std::vector<Reflector> points;
  double cluster_tolerance = 0.0;
  bool degenerate_band = false;  // more clusters than the cap: continuum-like
};

struct MinBrokenPath {
  double c_min = 0.0;
  ReflectorSet reflectors;
};

// Global minimum of the broken path over the boundary: dense sampling at the
// given icosphere level followed by local second-order refinement.  Requires
// p, p' outside the solid and segment [p,p'] clear of it.
MinBrokenPath min_broken_path(const ObstacleShape& obstacle, const Vec3& p,
                              const Vec3& p_prime, int sample_level = 4);

// Cheap variant for scans: seed from a caller-cached boundary sample set and
// refine only the best seed.  Returns the minimal path value.
double min_broken_path_value(const ObstacleShape& obstacle, const Vec3& p,
                             const Vec3& p_prime,
                             const std::vector<Vec3>& samples);

// Clustered global minimizers; phi_tol <= 0 picks a scale-based default.
ReflectorSet first_reflector(const ObstacleShape& obstacle, const Vec3& p,
                             const Vec3& p_prime, double phi_tol = -1.0);

// Brute-force min over boundary x (sampled + refined) of
// dist(x, ball B) + dist(x, ball B'); ball distances are exact.
double min_over_triple_surfaces(const ObstacleShape& obstacle, const Ball& B,
                                const Ball& B_prime, int sample_level = 5);

// Minimal recording times: first = c_min - (eta + eta'), second = sup over an
// omega grid of min_x phi(x; p, p' + s*omega) - (eta + eta' - s).
struct TimeThresholds {
  double rate_extraction = 0.0;
  double reflector_scan = 0.0;
};
TimeThresholds t_thresholds(const ObstacleShape& obstacle, const Ball& B,
                            const Ball& B_prime, double s,
                            int omega_level = 3);

// det(S_E(shifted) - S_D) at a reflection point q: spheroid through q with
// foci p and p' + s*A', minus the obstacle operator, in a shared frame.
double det_shape_diff(const Vec3& q, const ObstacleShape& obstacle,
                      const Vec3& p, const Vec3& p_prime, double s);

// Configuration validation helpers.
bool segment_clear(const ObstacleShape& obstacle, const Vec3& a,
                   const Vec3& b, double margin = 0.0);
// Convex hull of the two balls (a capsule with lerped radius) disjoint from
// the solid.
bool hull_disjoint(const ObstacleShape& obstacle, const Ball& B,
                   const Ball& B_prime);

}  // namespace enclosure
