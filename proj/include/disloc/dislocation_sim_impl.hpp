#pragma once

// Template members of StrainField; included from dislocation_sim.hpp.

#include "disloc/quadrature.hpp"

namespace disloc {

template <class Callback>
void StrainField::integrate(const SimParams& p, double mask_radius, Callback&& cb) const {
  const quad::MaskedOptions opt{p.rule_order, p.max_depth, p.min_size_ratio, p.point_ratio};
  const std::vector<Vec2> cs = centers();
  std::vector<quad::Disc> discs;
  std::vector<Vec2> points;
  for (std::size_t t = 0; t < mesh_->n_triangles(); ++t) {
    const auto c = mesh_->corners(static_cast<int>(t));
    const quad::Triangle tri = {c[0], c[1], c[2]};
    const double diam = mesh_->diameter(static_cast<int>(t));
    discs.clear();
    points.clear();
    for (const Vec2& x : cs) {
      const double d = quad::distance_to_triangle(x, tri);
      if (d < mask_radius + diam) discs.push_back({x, mask_radius});
      if (d < p.point_ratio * diam) points.push_back(x);
    }
    const int ti = static_cast<int>(t);
    quad::integrate_masked(tri, discs, points, opt, [&](const Vec2& x, double w) { cb(x, w, ti); });
  }
}

}  // namespace disloc
