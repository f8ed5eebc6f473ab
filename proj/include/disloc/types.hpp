#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace disloc {

using Vec2 = Eigen::Vector2d;
using Matrix2 = Eigen::Matrix2d;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Invalid configuration or input data (CLI exit code 2).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Numerical failure: non-convergence, unresolvable mesh, rejected extrapolation (CLI exit code 3).
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline Matrix2 sym(const Matrix2& m) { return 0.5 * (m + m.transpose()); }
inline Matrix2 skew(const Matrix2& m) { return 0.5 * (m - m.transpose()); }

/// (a ⊗ b)_ij = a_i b_j
inline Matrix2 outer(const Vec2& a, const Vec2& b) { return a * b.transpose(); }

/// Counterclockwise rotation by 90 degrees. This is the J of the singular fields:
/// J x / |x| is the counterclockwise unit tangent at x.
inline Vec2 rot90(const Vec2& v) { return {-v.y(), v.x()}; }

inline Vec2 unit_direction(double theta) { return {std::cos(theta), std::sin(theta)}; }

inline double frob2(const Matrix2& m) { return m.squaredNorm(); }

}  // namespace disloc
