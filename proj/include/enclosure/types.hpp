#pragma once
// Shared small types and error categories used across the library.

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace enclosure {

using Vec3 = Eigen::Vector3d;
using Vec2 = Eigen::Vector2d;
using Mat3 = Eigen::Matrix3d;
using Mat2 = Eigen::Matrix2d;

constexpr double kPi = 3.14159265358979323846;

// Ball with center and radius; the sources/receivers of the method are
// characteristic functions of such balls.
struct Ball {
  Vec3 center = Vec3::Zero();
  double radius = 0.0;

  double volume() const { return 4.0 / 3.0 * kPi * radius * radius * radius; }
  bool contains(const Vec3& x) const {
    return (x - center).squaredNorm() <= radius * radius;
  }
};

// A named hypothesis of the method does not hold for the given inputs
// (e.g. source ball intersects the obstacle, wavefront reaches the
// computational boundary within the recording window).
class PreconditionError : public std::runtime_error {
 public:
  explicit PreconditionError(const std::string& what)
      : std::runtime_error(what) {}
};

// A numerical routine failed to reach its accuracy target (quadrature
// non-convergence, ill-conditioned fit, ...).
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace enclosure
