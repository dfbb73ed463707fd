#include "enclosure/obstacle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

namespace enclosure {

namespace {

Vec3 face_normal_raw(const Vec3& a, const Vec3& b, const Vec3& c) {
  return (b - a).cross(c - a);
}

// Closest point on triangle abc to point x (Ericson, Real-Time Collision
// Detection, 5.1.5).
Vec3 closest_point_on_triangle(const Vec3& x, const Vec3& a, const Vec3& b,
                               const Vec3& c) {
  const Vec3 ab = b - a, ac = c - a, ax = x - a;
  const double d1 = ab.dot(ax), d2 = ac.dot(ax);
  if (d1 <= 0.0 && d2 <= 0.0) return a;
  const Vec3 bx = x - b;
  const double d3 = ab.dot(bx), d4 = ac.dot(bx);
  if (d3 >= 0.0 && d4 <= d3) return b;
  const double vc = d1 * d4 - d3 * d2;
  if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) return a + (d1 / (d1 - d3)) * ab;
  const Vec3 cx = x - c;
  const double d5 = ab.dot(cx), d6 = ac.dot(cx);
  if (d6 >= 0.0 && d5 <= d6) return c;
  const double vb = d5 * d2 - d1 * d6;
  if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) return a + (d2 / (d2 - d6)) * ac;
  const double va = d3 * d6 - d5 * d4;
  if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0) {
    return b + ((d4 - d3) / ((d4 - d3) + (d5 - d6))) * (c - b);
  }
  const double denom = 1.0 / (va + vb + vc);
  return a + ab * (vb * denom) + ac * (vc * denom);
}

// Solid angle of triangle abc seen from the origin (van Oosterom-Strackee).
double solid_angle(const Vec3& a, const Vec3& b, const Vec3& c) {
  const double la = a.norm(), lb = b.norm(), lc = c.norm();
  const double num = a.dot(b.cross(c));
  const double den =
      la * lb * lc + a.dot(b) * lc + b.dot(c) * la + c.dot(a) * lb;
  return 2.0 * std::atan2(num, den);
}

double golden_min(const std::function<double(double)>& f, double lo,
                  double hi, int iters) {
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = lo, b = hi;
  double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
  double f1 = f(x1), f2 = f(x2);
  for (int i = 0; i < iters; ++i) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - gr * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + gr * (b - a);
      f2 = f(x2);
    }
  }
  return std::min(f1, f2);
}

}  // namespace

// ---------------------------------------------------------------- mesh IO --

TriMesh load_mesh_ascii(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw PreconditionError("cannot open mesh file: " + path);
  TriMesh mesh;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ss(line);
    std::string tag;
    if (!(ss >> tag) || tag.empty() || tag[0] == '#') continue;
    if (tag == "v") {
      double x, y, z;
      if (!(ss >> x >> y >> z)) {
        throw PreconditionError("bad vertex line " + std::to_string(lineno) +
                                " in " + path);
      }
      mesh.vertices.emplace_back(x, y, z);
    } else if (tag == "f") {
      int i, j, k;
      if (!(ss >> i >> j >> k)) {
        throw PreconditionError("bad face line " + std::to_string(lineno) +
                                " in " + path);
      }
      const int n = static_cast<int>(mesh.vertices.size());
      if (i < 1 || j < 1 || k < 1 || i > n || j > n || k > n) {
        throw PreconditionError("face index out of range at line " +
                                std::to_string(lineno) + " in " + path);
      }
      mesh.faces.push_back({i - 1, j - 1, k - 1});
    }
  }
  return mesh;
}

void save_mesh_ascii(const std::string& path, const TriMesh& mesh) {
  std::ofstream out(path);
  if (!out) throw PreconditionError("cannot write mesh file: " + path);
  char buf[128];
  for (const auto& v : mesh.vertices) {
    std::snprintf(buf, sizeof(buf), "v %.17g %.17g %.17g\n", v.x(), v.y(),
                  v.z());
    out << buf;
  }
  for (const auto& f : mesh.faces) {
    out << "f " << f[0] + 1 << ' ' << f[1] + 1 << ' ' << f[2] + 1 << '\n';
  }
}

TriMesh make_sphere_mesh(const Vec3& center, double radius, int level) {
  const DirMesh dm = icosphere_mesh(level);
  TriMesh mesh;
  mesh.vertices.reserve(dm.vertices.size());
  for (const auto& u : dm.vertices) mesh.vertices.push_back(center + radius * u);
  mesh.faces = dm.faces;
  return mesh;
}

// ---------------------------------------------------------- constructors --

ObstacleShape ObstacleShape::make_sphere(const Vec3& center, double radius) {
  if (!(radius > 0.0)) throw PreconditionError("sphere radius must be > 0");
  ObstacleShape o;
  o.kind_ = ObstacleKind::sphere;
  o.center_ = center;
  o.radius_ = radius;
  o.semiaxes_ = Vec3::Constant(radius);
  o.M_ = radius * Mat3::Identity();
  o.Q_ = Mat3::Identity() / (radius * radius);
  o.volume_ = 4.0 / 3.0 * kPi * radius * radius * radius;
  return o;
}

ObstacleShape ObstacleShape::make_ellipsoid(const Vec3& center,
                                            const Vec3& semiaxes,
                                            const Mat3& orientation) {
  if (!(semiaxes.minCoeff() > 0.0)) {
    throw PreconditionError("ellipsoid semiaxes must be > 0");
  }
  const Mat3 RtR = orientation.transpose() * orientation;
  if ((RtR - Mat3::Identity()).norm() > 1e-10) {
    throw PreconditionError("ellipsoid orientation must be orthonormal");
  }
  ObstacleShape o;
  o.kind_ = ObstacleKind::ellipsoid;
  o.center_ = center;
  o.semiaxes_ = semiaxes;
  o.orient_ = orientation;
  o.M_ = orientation * semiaxes.asDiagonal();
  o.Q_ = orientation * semiaxes.cwiseAbs2().cwiseInverse().asDiagonal() *
         orientation.transpose();
  o.volume_ = 4.0 / 3.0 * kPi * semiaxes.prod();
  return o;
}

ObstacleShape ObstacleShape::make_mesh(TriMesh mesh) {
  if (mesh.vertices.size() < 4 || mesh.faces.empty()) {
    throw PreconditionError("mesh needs at least 4 vertices and 1 face");
  }
  // Watertight + consistent winding: every directed edge appears exactly once
  // and its reverse exactly once.
  std::map<std::pair<int, int>, int> edge_count;
  for (const auto& f : mesh.faces) {
    for (int e = 0; e < 3; ++e) {
      const int a = f[e], b = f[(e + 1) % 3];
      if (a == b) throw PreconditionError("mesh face with repeated vertex");
      ++edge_count[{a, b}];
    }
  }
  for (const auto& [edge, count] : edge_count) {
    auto rev = edge_count.find({edge.second, edge.first});
    if (count != 1 || rev == edge_count.end() || rev->second != 1) {
      throw PreconditionError(
          "mesh is not watertight with consistent winding (directed edge "
          "multiplicity != 1)");
    }
  }
  double vol6 = 0.0;
  for (const auto& f : mesh.faces) {
    vol6 += mesh.vertices[f[0]].dot(
        mesh.vertices[f[1]].cross(mesh.vertices[f[2]]));
  }
  if (!(vol6 > 0.0)) {
    throw PreconditionError(
        "mesh signed volume is not positive (inward winding?)");
  }

  ObstacleShape o;
  o.kind_ = ObstacleKind::mesh;
  o.mesh_ = std::move(mesh);
  o.volume_ = vol6 / 6.0;
  Vec3 c = Vec3::Zero();
  for (const auto& v : o.mesh_.vertices) c += v;
  o.center_ = c / static_cast<double>(o.mesh_.vertices.size());
  double hmax = 0.0;
  for (const auto& f : o.mesh_.faces) {
    for (int e = 0; e < 3; ++e) {
      hmax = std::max(hmax, (o.mesh_.vertices[f[e]] -
                             o.mesh_.vertices[f[(e + 1) % 3]])
                                .norm());
    }
  }
  o.h_mesh_ = hmax;
  o.vertex_normals_.assign(o.mesh_.vertices.size(), Vec3::Zero());
  for (const auto& f : o.mesh_.faces) {
    const Vec3 n = face_normal_raw(o.mesh_.vertices[f[0]],
                                   o.mesh_.vertices[f[1]],
                                   o.mesh_.vertices[f[2]]);
    for (int e = 0; e < 3; ++e) o.vertex_normals_[f[e]] += n;
  }
  for (auto& n : o.vertex_normals_) {
    const double len = n.norm();
    if (len > 0.0) n /= len;
  }
  return o;
}

const TriMesh& ObstacleShape::mesh_data() const {
  if (kind_ != ObstacleKind::mesh) {
    throw PreconditionError("mesh_data() on analytic shape");
  }
  return mesh_;
}

double ObstacleShape::volume() const { return volume_; }

double ObstacleShape::diameter() const {
  switch (kind_) {
    case ObstacleKind::sphere:
      return 2.0 * radius_;
    case ObstacleKind::ellipsoid:
      return 2.0 * semiaxes_.maxCoeff();
    case ObstacleKind::mesh: {
      double r = 0.0;
      for (const auto& v : mesh_.vertices) r = std::max(r, (v - center_).norm());
      return 2.0 * r;
    }
  }
  return 0.0;
}

std::pair<Vec3, Vec3> ObstacleShape::bounding_box() const {
  if (kind_ == ObstacleKind::mesh) {
    Vec3 lo = mesh_.vertices.front(), hi = lo;
    for (const auto& v : mesh_.vertices) {
      lo = lo.cwiseMin(v);
      hi = hi.cwiseMax(v);
    }
    return {lo, hi};
  }
  // Image of the unit sphere under M: half-width per axis = row norm of M.
  Vec3 half(M_.row(0).norm(), M_.row(1).norm(), M_.row(2).norm());
  return {center_ - half, center_ + half};
}

// ------------------------------------------------- containment / distance --

bool ObstacleShape::contains(const Vec3& x) const {
  switch (kind_) {
    case ObstacleKind::sphere:
      return (x - center_).squaredNorm() <= radius_ * radius_;
    case ObstacleKind::ellipsoid: {
      const Vec3 y = x - center_;
      return y.dot(Q_ * y) <= 1.0;
    }
    case ObstacleKind::mesh: {
      double w = 0.0;
      for (const auto& f : mesh_.faces) {
        w += solid_angle(mesh_.vertices[f[0]] - x, mesh_.vertices[f[1]] - x,
                         mesh_.vertices[f[2]] - x);
      }
      return w > 2.0 * kPi;  // winding number > 1/2
    }
  }
  return false;
}

Vec3 ObstacleShape::project(const Vec3& x) const {
  switch (kind_) {
    case ObstacleKind::sphere: {
      const Vec3 d = x - center_;
      const double len = d.norm();
      if (len < 1e-14 * radius_) return center_ + Vec3(radius_, 0, 0);
      return center_ + (radius_ / len) * d;
    }
    case ObstacleKind::ellipsoid: {
      // Body frame: minimize |z - y| subject to sum z_i^2/a_i^2 = 1 via the
      // Lagrange parameter t: z_i = a_i^2 y_i / (a_i^2 + t), g(t) strictly
      // decreasing on (-min a_i^2, inf).
      const Vec3 y = orient_.transpose() * (x - center_);
      const Vec3 a2 = semiaxes_.cwiseAbs2();
      auto g = [&](double t) {
        double s = 0.0;
        for (int i = 0; i < 3; ++i) {
          const double d = a2[i] + t;
          s += a2[i] * y[i] * y[i] / (d * d);
        }
        return s - 1.0;
      };
      const double amin2 = a2.minCoeff();
      double lo = -amin2 * (1.0 - 1e-12);
      if (g(lo) <= 0.0) {
        // Degenerate near-axis interior point: snap to the nearest vertex of
        // the shortest axis.
        int k = 0;
        a2.minCoeff(&k);
        Vec3 z = Vec3::Zero();
        z[k] = (y[k] >= 0.0 ? 1.0 : -1.0) * semiaxes_[k];
        return center_ + orient_ * z;
      }
      double hi = semiaxes_.maxCoeff() * y.norm() + a2.maxCoeff();
      while (g(hi) > 0.0) hi *= 2.0;
      for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        (g(mid) > 0.0 ? lo : hi) = mid;
      }
      const double t = 0.5 * (lo + hi);
      Vec3 z;
      for (int i = 0; i < 3; ++i) z[i] = a2[i] * y[i] / (a2[i] + t);
      return center_ + orient_ * z;
    }
    case ObstacleKind::mesh: {
      double best = std::numeric_limits<double>::infinity();
      Vec3 bp = mesh_.vertices.front();
      for (const auto& f : mesh_.faces) {
        const Vec3 cp =
            closest_point_on_triangle(x, mesh_.vertices[f[0]],
                                      mesh_.vertices[f[1]],
                                      mesh_.vertices[f[2]]);
        const double d2 = (cp - x).squaredNorm();
        if (d2 < best) {
          best = d2;
          bp = cp;
        }
      }
      return bp;
    }
  }
  return x;
}

double ObstacleShape::surface_distance(const Vec3& x) const {
  return (x - project(x)).norm();
}

double ObstacleShape::solid_distance(const Vec3& x) const {
  if (contains(x)) return 0.0;
  return surface_distance(x);
}

Vec3 ObstacleShape::outward_normal(const Vec3& q) const {
  switch (kind_) {
    case ObstacleKind::sphere:
      return (q - center_).normalized();
    case ObstacleKind::ellipsoid:
      return (Q_ * (q - center_)).normalized();
    case ObstacleKind::mesh: {
      double best = std::numeric_limits<double>::infinity();
      Vec3 n = Vec3::UnitZ();
      for (const auto& f : mesh_.faces) {
        const Vec3 cp =
            closest_point_on_triangle(q, mesh_.vertices[f[0]],
                                      mesh_.vertices[f[1]],
                                      mesh_.vertices[f[2]]);
        const double d2 = (cp - q).squaredNorm();
        if (d2 < best) {
          best = d2;
          n = face_normal_raw(mesh_.vertices[f[0]], mesh_.vertices[f[1]],
                              mesh_.vertices[f[2]]);
        }
      }
      return n.normalized();
    }
  }
  return Vec3::UnitZ();
}

// -------------------------------------------------------- shape operators --

ShapeOperator2 ObstacleShape::shape_operator(const Vec3& q,
                                             const TangentFrame& tf) const {
  if (kind_ != ObstacleKind::mesh) {
    // Implicit chart: height Hessian h_ij = -e_i^T HessF e_j / (gradF . nu)
    // with F = (x-c)^T Q (x-c) - 1 (HessF = 2Q, gradF = 2Q(x-c)).
    const Vec3 gradF = Q_ * (q - center_);
    const double gn = gradF.dot(tf.nu);
    if (std::fabs(gn) < 1e-14) {
      throw PreconditionError(
          "shape_operator: frame normal tangent to the surface");
    }
    ShapeOperator2 S;
    S.m(0, 0) = -tf.e1.dot(Q_ * tf.e1) / gn;
    S.m(0, 1) = -tf.e1.dot(Q_ * tf.e2) / gn;
    S.m(1, 0) = S.m(0, 1);
    S.m(1, 1) = -tf.e2.dot(Q_ * tf.e2) / gn;
    return S;
  }
  // Mesh: local least-squares quadric fit f(sigma) = c0 + b.sigma +
  // sigma^T A sigma / 2 over nearby vertices, in the given frame.
  std::vector<std::pair<double, int>> by_dist;
  by_dist.reserve(mesh_.vertices.size());
  for (int i = 0; i < static_cast<int>(mesh_.vertices.size()); ++i) {
    by_dist.push_back({(mesh_.vertices[i] - q).squaredNorm(), i});
  }
  std::sort(by_dist.begin(), by_dist.end());
  const int want = std::min<int>(30, static_cast<int>(by_dist.size()));
  if (want < 8) {
    throw PreconditionError("mesh curvature fit needs at least 8 neighbors");
  }
  Eigen::MatrixXd Amat(want, 6);
  Eigen::VectorXd rhs(want);
  for (int r = 0; r < want; ++r) {
    const Vec3 dv = mesh_.vertices[by_dist[r].second] - q;
    const double s1 = dv.dot(tf.e1), s2 = dv.dot(tf.e2);
    Amat.row(r) << 1.0, s1, s2, 0.5 * s1 * s1, s1 * s2, 0.5 * s2 * s2;
    rhs(r) = dv.dot(tf.nu);
  }
  Eigen::MatrixXd N = Amat.transpose() * Amat;
  N.diagonal().array() += 1e-10;
  const Eigen::VectorXd coef = N.ldlt().solve(Amat.transpose() * rhs);
  ShapeOperator2 S;
  S.m << coef(3), coef(4), coef(4), coef(5);
  return S;
}

ObstacleShape::CurvatureInfo ObstacleShape::curvature_at(const Vec3& q) const {
  CurvatureInfo info;
  info.frame = tangent_frame(q, outward_normal(q));
  info.op = shape_operator(q, info.frame);
  info.gauss = info.op.gauss();
  info.mean = info.op.mean();
  return info;
}

// --------------------------------------------------------------- sampling --

std::vector<Vec3> ObstacleShape::surface_samples(int level) const {
  std::vector<Vec3> out;
  if (kind_ != ObstacleKind::mesh) {
    const auto dirs = icosphere_directions(level);
    out.reserve(dirs.size());
    for (const auto& u : dirs) out.push_back(center_ + M_ * u);
    return out;
  }
  out.reserve(mesh_.vertices.size() + mesh_.faces.size());
  out.insert(out.end(), mesh_.vertices.begin(), mesh_.vertices.end());
  for (const auto& f : mesh_.faces) {
    out.push_back((mesh_.vertices[f[0]] + mesh_.vertices[f[1]] +
                   mesh_.vertices[f[2]]) /
                  3.0);
  }
  return out;
}

std::vector<std::array<Vec3, 3>> ObstacleShape::param_triangles(
    int level) const {
  std::vector<std::array<Vec3, 3>> tris;
  if (kind_ != ObstacleKind::mesh) {
    const DirMesh dm = icosphere_mesh(level);
    tris.reserve(dm.faces.size());
    for (const auto& f : dm.faces) {
      tris.push_back({dm.vertices[f[0]], dm.vertices[f[1]], dm.vertices[f[2]]});
    }
    return tris;
  }
  tris.reserve(mesh_.faces.size());
  for (const auto& f : mesh_.faces) {
    tris.push_back({mesh_.vertices[f[0]], mesh_.vertices[f[1]],
                    mesh_.vertices[f[2]]});
  }
  return tris;
}

PatchMap ObstacleShape::surface_map() const {
  if (kind_ != ObstacleKind::mesh) {
    const Vec3 c = center_;
    const Mat3 M = M_;
    const Mat3 MinvT = M_.inverse().transpose();
    const double detM = std::fabs(M_.determinant());
    return [c, M, MinvT, detM](const Vec3& sigma,
                               const Vec3& tri_n) -> PatchSample {
      PatchSample s;
      const double len = sigma.norm();
      if (len <= 0.0) return s;
      const Vec3 u = sigma / len;
      s.x = c + M * u;
      const Vec3 nn = MinvT * u;
      const double nlen = nn.norm();
      s.nu = nn / nlen;
      // flat area -> solid angle -> surface area
      s.jac = std::fabs(sigma.dot(tri_n)) / (len * len * len) * detM * nlen;
      return s;
    };
  }
  return [](const Vec3& sigma, const Vec3& tri_n) -> PatchSample {
    return PatchSample{sigma, tri_n, 1.0};
  };
}

PatchMap ObstacleShape::pencil_map() const {
  if (kind_ != ObstacleKind::mesh) {
    const Mat3 M = M_;
    const double detM = std::fabs(M_.determinant());
    return [M, detM](const Vec3& sigma, const Vec3& tri_n) -> PatchSample {
      PatchSample s;
      const double len = sigma.norm();
      if (len <= 0.0) return s;
      const Vec3 u = sigma / len;
      s.x = M * u;  // ray vector from the center
      s.jac = sigma.dot(tri_n) / (len * len * len) * detM;
      return s;
    };
  }
  const Vec3 c0 = center_;
  return [c0](const Vec3& sigma, const Vec3& tri_n) -> PatchSample {
    PatchSample s;
    s.x = sigma - c0;
    s.jac = s.x.dot(tri_n);  // signed cone jacobian: exact for any shape
    return s;
  };
}

// --------------------------------------------------- broken-path minimums --

namespace {

struct RefineResult {
  Vec3 q;
  double phi;
  double grad_norm;
};

// Second-order local refinement of phi(.; p, p') restricted to the surface.
RefineResult refine_minimizer(const ObstacleShape& obst, Vec3 q, const Vec3& p,
                              const Vec3& pp, int max_iter = 120) {
  const double diam = obst.diameter();
  double phi = broken_path(q, p, pp);
  double gnorm = std::numeric_limits<double>::infinity();
  for (int it = 0; it < max_iter; ++it) {
    const Vec3 nu = obst.outward_normal(q);
    TangentFrame tf;
    try {
      tf = tangent_frame(q, nu);
    } catch (const PreconditionError&) {
      break;
    }
    const UnitPairGeometry g = unit_pair(q, p, pp);
    const Vec2 grad = tf.tangential(g.A + g.A_prime);
    gnorm = grad.norm();
    if (gnorm < 1e-13) break;
    Mat2 H;
    bool have_h = true;
    try {
      H = path_hessian_assembled(g, tf, obst.shape_operator(q, tf).m);
    } catch (const PreconditionError&) {
      have_h = false;
    }
    Vec2 step;
    if (have_h) {
      const double tr = H.trace(), det = H.determinant();
      const bool pd = det > 1e-14 * tr * tr && tr > 0.0;
      step = pd ? Vec2(-H.inverse() * grad) : Vec2(-grad / g.lambda);
    } else {
      step = -grad / g.lambda;
    }
    const double max_step = 0.2 * diam;
    if (step.norm() > max_step) step *= max_step / step.norm();
    // Backtracking on the projected step.
    double alpha = 1.0;
    bool moved = false;
    for (int ls = 0; ls < 25; ++ls) {
      const Vec3 cand =
          obst.project(q + alpha * (step.x() * tf.e1 + step.y() * tf.e2));
      const double cphi = broken_path(cand, p, pp);
      if (cphi <= phi + 1e-15 * std::fabs(phi)) {
        const bool converged = (cand - q).norm() < 1e-15 * diam;
        q = cand;
        phi = cphi;
        moved = true;
        if (converged) it = max_iter;  // fixed point
        break;
      }
      alpha *= 0.5;
    }
    if (!moved) break;
  }
  // Final gradient for reporting.
  try {
    const UnitPairGeometry g = unit_pair(q, p, pp);
    gnorm = snell_residual(g, obst.outward_normal(q));
  } catch (const PreconditionError&) {
  }
  return {q, phi, gnorm};
}

}  // namespace

MinBrokenPath min_broken_path(const ObstacleShape& obstacle, const Vec3& p,
                              const Vec3& p_prime, int sample_level) {
  if (obstacle.contains(p) || obstacle.contains(p_prime)) {
    throw PreconditionError("source/receiver point lies inside the obstacle");
  }
  if (!segment_clear(obstacle, p, p_prime)) {
    throw PreconditionError(
        "segment between the source and receiver points meets the obstacle "
        "(shadow configuration is out of scope)");
  }
  const double diam = obstacle.diameter();
  const auto samples = obstacle.surface_samples(sample_level);
  std::vector<std::pair<double, int>> ranked;
  ranked.reserve(samples.size());
  for (int i = 0; i < static_cast<int>(samples.size()); ++i) {
    ranked.push_back({broken_path(samples[i], p, p_prime), i});
  }
  std::sort(ranked.begin(), ranked.end());

  // Spatially deduplicated seeds (enough to expose degenerate continua).
  const double seed_sep = 0.02 * diam;
  std::vector<Vec3> seeds;
  for (const auto& [phi, idx] : ranked) {
    (void)phi;
    const Vec3& cand = samples[idx];
    bool close = false;
    for (const auto& s : seeds) {
      if ((s - cand).norm() < seed_sep) {
        close = true;
        break;
      }
    }
    if (!close) seeds.push_back(cand);
    if (seeds.size() >= 128) break;
  }

  std::vector<RefineResult> refined;
  refined.reserve(seeds.size());
  for (const auto& s : seeds) {
    refined.push_back(refine_minimizer(obstacle, s, p, p_prime));
  }
  double c_min = std::numeric_limits<double>::infinity();
  for (const auto& r : refined) c_min = std::min(c_min, r.phi);

  const double phi_band = 1e-7 * c_min;
  const double cluster_radius = 1e-3 * diam;
  std::vector<RefineResult> kept;
  for (const auto& r : refined) {
    if (r.phi <= c_min + phi_band) kept.push_back(r);
  }
  std::sort(kept.begin(), kept.end(),
            [](const RefineResult& a, const RefineResult& b) {
              return a.phi < b.phi;
            });

  MinBrokenPath out;
  out.c_min = c_min;
  out.reflectors.cluster_tolerance = cluster_radius;
  constexpr int kDegenerateCap = 64;
  int clusters = 0;
  for (const auto& r : kept) {
    bool close = false;
    for (const auto& rep : out.reflectors.points) {
      if ((rep.q - r.q).norm() < cluster_radius) {
        close = true;
        break;
      }
    }
    if (close) continue;
    ++clusters;
    if (clusters > kDegenerateCap) {
      out.reflectors.degenerate_band = true;
      break;
    }
    out.reflectors.points.push_back(
        {r.q, obstacle.outward_normal(r.q), r.phi});
  }
  return out;
}

double min_broken_path_value(const ObstacleShape& obstacle, const Vec3& p,
                             const Vec3& p_prime,
                             const std::vector<Vec3>& samples) {
  if (samples.empty()) {
    throw PreconditionError("empty boundary sample set");
  }
  int best = 0;
  double best_phi = std::numeric_limits<double>::infinity();
  for (int i = 0; i < static_cast<int>(samples.size()); ++i) {
    const double phi = broken_path(samples[i], p, p_prime);
    if (phi < best_phi) {
      best_phi = phi;
      best = i;
    }
  }
  const RefineResult r =
      refine_minimizer(obstacle, samples[best], p, p_prime, 60);
  return std::min(best_phi, r.phi);
}

ReflectorSet first_reflector(const ObstacleShape& obstacle, const Vec3& p,
                             const Vec3& p_prime, double phi_tol) {
  MinBrokenPath mbp = min_broken_path(obstacle, p, p_prime);
  if (phi_tol > 0.0) {
    auto& pts = mbp.reflectors.points;
    pts.erase(std::remove_if(pts.begin(), pts.end(),
                             [&](const Reflector& r) {
                               return r.phi > mbp.c_min + phi_tol;
                             }),
              pts.end());
  }
  return mbp.reflectors;
}

double min_over_triple_surfaces(const ObstacleShape& obstacle, const Ball& B,
                                const Ball& B_prime, int sample_level) {
  auto value = [&](const Vec3& x) {
    return ((x - B.center).norm() - B.radius) +
           ((x - B_prime.center).norm() - B_prime.radius);
  };
  const auto samples = obstacle.surface_samples(sample_level);
  double best = std::numeric_limits<double>::infinity();
  Vec3 bx = samples.front();
  for (const auto& x : samples) {
    const double v = value(x);
    if (v < best) {
      best = v;
      bx = x;
    }
  }
  // Same stationary problem as the broken path; refine with the same descent.
  const RefineResult r = refine_minimizer(obstacle, bx, B.center,
                                          B_prime.center);
  return std::min(best, value(r.q));
}

TimeThresholds t_thresholds(const ObstacleShape& obstacle, const Ball& B,
                            const Ball& B_prime, double s, int omega_level) {
  if (!(s >= 0.0 && s < B_prime.radius)) {
    throw PreconditionError("shift s must satisfy 0 <= s < receiver radius");
  }
  TimeThresholds out;
  const MinBrokenPath base =
      min_broken_path(obstacle, B.center, B_prime.center);
  out.rate_extraction = base.c_min - (B.radius + B_prime.radius);
  double sup = -std::numeric_limits<double>::infinity();
  for (const auto& omega : icosphere_directions(omega_level)) {
    const Vec3 pp = B_prime.center + s * omega;
    // Shifted center stays outside D because s < eta' and the hull condition
    // holds for valid configurations; sample coarsely, refine the best seed.
    const auto samples = obstacle.surface_samples(3);
    double best = std::numeric_limits<double>::infinity();
    Vec3 bx = samples.front();
    for (const auto& x : samples) {
      const double v = broken_path(x, B.center, pp);
      if (v < best) {
        best = v;
        bx = x;
      }
    }
    const RefineResult r = refine_minimizer(obstacle, bx, B.center, pp, 40);
    sup = std::max(sup, std::min(best, r.phi) -
                            (B.radius + B_prime.radius - s));
  }
  out.reflector_scan = sup;
  return out;
}

double det_shape_diff(const Vec3& q, const ObstacleShape& obstacle,
                      const Vec3& p, const Vec3& p_prime, double s) {
  const UnitPairGeometry g = unit_pair(q, p, p_prime);
  const double c = g.r + g.r_prime;
  const double focal = (p - p_prime).norm();
  if (!(s >= 0.0 && s < 0.5 * (c - focal))) {
    throw PreconditionError(
        "shift s out of range: need 0 <= s < (c - |p-p'|)/2");
  }
  const Vec3 nu = spheroid_inward_normal(g);
  const double snell = snell_residual(g, obstacle.outward_normal(q));
  if (snell > 1e-3) {
    char buf[128];
    std::snprintf(buf, sizeof(buf),
                  "q is not a reflection point (stationarity residual %.3g)",
                  snell);
    throw PreconditionError(buf);
  }
  TangentFrame tf = (g.cross.norm() > 1e-8)
                        ? tangent_frame_along(q, nu, g.cross)
                        : tangent_frame(q, nu);
  const ShapeOperator2 S_D = obstacle.shape_operator(q, tf);
  const UnitPairGeometry gs =
      unit_pair(q, p, p_prime + s * g.A_prime);
  const ShapeOperator2 S_E = spheroid_shape_operator(gs, tf);
  return (S_E.m - S_D.m).determinant();
}

bool segment_clear(const ObstacleShape& obstacle, const Vec3& a, const Vec3& b,
                   double margin) {
  auto d = [&](double t) {
    return obstacle.solid_distance(a + t * (b - a));
  };
  const int n = 256;
  double best = std::numeric_limits<double>::infinity();
  int bi = 0;
  for (int i = 0; i <= n; ++i) {
    const double v = d(static_cast<double>(i) / n);
    if (v < best) {
      best = v;
      bi = i;
    }
  }
  if (best <= margin) return false;
  const double lo = std::max(0.0, (bi - 1.0) / n);
  const double hi = std::min(1.0, (bi + 1.0) / n);
  return golden_min(d, lo, hi, 60) > margin;
}

bool hull_disjoint(const ObstacleShape& obstacle, const Ball& B,
                   const Ball& B_prime) {
  auto f = [&](double t) {
    const Vec3 x = B.center + t * (B_prime.center - B.center);
    const double rad = (1.0 - t) * B.radius + t * B_prime.radius;
    return obstacle.solid_distance(x) - rad;
  };
  const int n = 256;
  double best = std::numeric_limits<double>::infinity();
  int bi = 0;
  for (int i = 0; i <= n; ++i) {
    const double v = f(static_cast<double>(i) / n);
    if (v < best) {
      best = v;
      bi = i;
    }
  }
  if (best <= 0.0) return false;
  const double lo = std::max(0.0, (bi - 1.0) / n);
  const double hi = std::min(1.0, (bi + 1.0) / n);
  return golden_min(f, lo, hi, 60) > 0.0;
}

}  // namespace enclosure
