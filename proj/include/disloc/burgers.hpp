#pragma once

#include "disloc/types.hpp"

#include <cstddef>
#include <vector>

namespace disloc {

/// A point of the integer span of S together with one witness combination.
struct LatticeVector {
  Vec2 value;
  std::vector<int> coeffs;  // one integer per generator in S
  int l1() const;
};

/// The finite set S of admissible Burgers vectors (lattice-spacing units).
/// Requires 0 not in S and Span_R S = R^2.
class BurgersSystem {
 public:
  explicit BurgersSystem(std::vector<Vec2> vectors);

  static BurgersSystem square();     // {±e1, ±e2}
  static BurgersSystem hexagonal();  // {±e1, ±h, ±(h - e1)}, h = (1/2, sqrt(3)/2)

  const std::vector<Vec2>& vectors() const { return s_; }
  std::size_t size() const { return s_.size(); }
  double max_norm() const { return max_norm_; }
  double min_norm() const { return min_norm_; }

  /// All xi in Span_Z S with 0 < |xi| <= radius, sorted lexicographically by
  /// (x, y). Each carries the witness combination with smallest l1 coefficient
  /// sum. Throws ConfigError if radius < max|b| and SolverError when the
  /// search visits more than `cap` lattice points.
  std::vector<LatticeVector> lattice_ball(double radius, std::size_t cap = 200000) const;

 private:
  std::vector<Vec2> s_;
  double max_norm_ = 0.0;
  double min_norm_ = 0.0;
};

}  // namespace disloc
