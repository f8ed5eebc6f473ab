#include "disloc/limit_measure.hpp"

#include "disloc/mesh.hpp"

#include <algorithm>

namespace disloc {

LimitMeasure LimitMeasure::density(std::vector<DensityRegion> regions) {
  LimitMeasure m;
  for (DensityRegion& r : regions) {
    if (r.polygon.size() < 3) throw ConfigError("density region needs a polygon with >= 3 vertices");
    if (polygon_area(r.polygon) < 0.0) std::reverse(r.polygon.begin(), r.polygon.end());
    if (!(polygon_area(r.polygon) > 0.0)) throw ConfigError("density region has zero area");
  }
  m.regions_ = std::move(regions);
  return m;
}

LimitMeasure LimitMeasure::dirac(std::vector<DiracMass> masses) {
  LimitMeasure m;
  m.is_dirac_ = true;
  m.masses_ = std::move(masses);
  return m;
}

LimitMeasure LimitMeasure::uniform_rectangle(const Vec2& xi, const Vec2& lo, const Vec2& hi) {
  return density({{{lo, Vec2(hi.x(), lo.y()), hi, Vec2(lo.x(), hi.y())}, xi}});
}

Vec2 LimitMeasure::density_at(const Vec2& x) const {
  for (const DensityRegion& r : regions_)
    if (point_in_polygon(x, r.polygon)) return r.xi;
  return Vec2::Zero();
}

double LimitMeasure::total_variation() const {
  double s = 0.0;
  for (const DensityRegion& r : regions_) s += r.xi.norm() * polygon_area(r.polygon);
  for (const DiracMass& d : masses_) s += d.xi.norm();
  return s;
}

LimitMeasure LimitMeasure::scaled(double s) const {
  LimitMeasure m = *this;
  for (DensityRegion& r : m.regions_) r.xi *= s;
  for (DiracMass& d : m.masses_) d.xi *= s;
  return m;
}

}  // namespace disloc
