#pragma once

#include "disloc/types.hpp"

#include <vector>

namespace disloc {

struct DensityRegion {
  std::vector<Vec2> polygon;  // counterclockwise
  Vec2 xi;
};

struct DiracMass {
  Vec2 x;
  Vec2 xi;
};

/// Limit dislocation density: either a piecewise-constant vector density
/// sum_l chi_{A_l} xi_l dx on disjoint polygons, or a finite Dirac sum.
class LimitMeasure {
 public:
  static LimitMeasure zero() { return LimitMeasure(); }
  static LimitMeasure density(std::vector<DensityRegion> regions);
  static LimitMeasure dirac(std::vector<DiracMass> masses);
  /// xi dx on an axis-aligned rectangle.
  static LimitMeasure uniform_rectangle(const Vec2& xi, const Vec2& lo, const Vec2& hi);

  bool is_density() const { return !is_dirac_; }
  bool is_dirac() const { return is_dirac_; }
  bool empty() const { return regions_.empty() && masses_.empty(); }
  const std::vector<DensityRegion>& regions() const { return regions_; }
  const std::vector<DiracMass>& masses() const { return masses_; }

  /// Density value at x (zero outside all regions; zero for Dirac sums).
  Vec2 density_at(const Vec2& x) const;
  /// |mu|(Omega): sum |xi_l| area(A_l) or sum |xi_i|.
  double total_variation() const;
  /// Same measure with every vector multiplied by s.
  LimitMeasure scaled(double s) const;

 private:
  bool is_dirac_ = false;
  std::vector<DensityRegion> regions_;
  std::vector<DiracMass> masses_;
};

}  // namespace disloc
