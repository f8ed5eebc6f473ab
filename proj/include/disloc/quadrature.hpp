#pragma once

#include "disloc/types.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <span>
#include <vector>

namespace disloc::quad {

/// Gauss-Legendre rule on [0, 1].
struct Rule1D {
  std::vector<double> x;
  std::vector<double> w;
};
const Rule1D& gauss01(int n);

/// Rule on the reference triangle (0,0),(1,0),(0,1); weights sum to 1/2.
/// Conical product of Gauss-Legendre rules, exact for degree 2n-2.
struct TriRule {
  std::vector<double> a;
  std::vector<double> b;
  std::vector<double> w;
};
const TriRule& triangle_rule(int n);

struct Disc {
  Vec2 center;
  double radius;
};

using Triangle = std::array<Vec2, 3>;

double distance_to_triangle(const Vec2& p, const Triangle& t);
double triangle_area(const Triangle& t);

/// Options for integrating over a triangle minus a union of discs, refining
/// near discs' boundaries and near integrable singular points.
struct MaskedOptions {
  int rule_order = 3;
  int max_depth = 24;
  double min_size_ratio = 0.125;  // disc refinement stops once diam < ratio * radius
  double point_ratio = 2.0;       // point refinement stops once dist >= ratio * diam
};

namespace detail {

inline bool inside_any(const Vec2& x, std::span<const Disc> discs) {
  for (const Disc& d : discs)
    if ((x - d.center).squaredNorm() < d.radius * d.radius) return true;
  return false;
}

template <class Callback>
void integrate_leaf(const Triangle& t, std::span<const Disc> discs, const TriRule& rule, Callback& cb) {
  const double jac = 2.0 * triangle_area(t);
  const Vec2 e1 = t[1] - t[0];
  const Vec2 e2 = t[2] - t[0];
  for (std::size_t q = 0; q < rule.w.size(); ++q) {
    const Vec2 x = t[0] + rule.a[q] * e1 + rule.b[q] * e2;
    if (!discs.empty() && inside_any(x, discs)) continue;
    cb(x, rule.w[q] * jac);
  }
}

template <class Callback>
void integrate_rec(const Triangle& t, std::span<const Disc> discs, std::span<const Vec2> points,
                   const MaskedOptions& opt, int depth, Callback& cb) {
  const double diam = std::max({(t[1] - t[0]).norm(), (t[2] - t[1]).norm(), (t[0] - t[2]).norm()});
  bool split = false;
  for (const Disc& d : discs) {
    double far = 0.0;
    for (const Vec2& v : t) far = std::max(far, (v - d.center).norm());
    if (far <= d.radius) return;  // entirely inside a masked disc
    const double near = distance_to_triangle(d.center, t);
    if (near < d.radius + diam && depth < opt.max_depth && diam > opt.min_size_ratio * d.radius) split = true;
  }
  if (!split && depth < opt.max_depth) {
    for (const Vec2& p : points)
      if (distance_to_triangle(p, t) < opt.point_ratio * diam) {
        split = true;
        break;
      }
  }
  if (!split) {
    integrate_leaf(t, discs, triangle_rule(opt.rule_order), cb);
    return;
  }
  const Vec2 m01 = 0.5 * (t[0] + t[1]);
  const Vec2 m12 = 0.5 * (t[1] + t[2]);
  const Vec2 m20 = 0.5 * (t[2] + t[0]);
  const std::array<Triangle, 4> kids = {Triangle{t[0], m01, m20}, Triangle{m01, t[1], m12},
                                        Triangle{m20, m12, t[2]}, Triangle{m01, m12, m20}};
  for (const Triangle& k : kids) integrate_rec(k, discs, points, opt, depth + 1, cb);
}

}  // namespace detail

/// Calls cb(x, weight) for quadrature points of t \ (union of discs). Only
/// discs and points relevant to t should be passed; callers pre-filter.
template <class Callback>
void integrate_masked(const Triangle& t, std::span<const Disc> discs, std::span<const Vec2> singular_points,
                      const MaskedOptions& opt, Callback&& cb) {
  detail::integrate_rec(t, discs, singular_points, opt, 0, cb);
}

/// Log-polar tensor rule on the annulus r1 < |x - c| < r2: s = log r is split
/// into panels of width <= ds, theta into n_theta panels, with n-point Gauss in
/// each direction. cb(x, weight) with weight including the r^2 Jacobian.
template <class Callback>
void integrate_annulus(const Vec2& c, double r1, double r2, double ds, int n_theta, int n, Callback&& cb) {
  if (!(r2 > r1)) return;
  const double s0 = std::log(r1), s1 = std::log(r2);
  const int ns = std::max(1, static_cast<int>(std::ceil((s1 - s0) / ds)));
  const double hs = (s1 - s0) / ns;
  const double ht = kTwoPi / n_theta;
  const Rule1D& g = gauss01(n);
  for (int i = 0; i < ns; ++i)
    for (std::size_t a = 0; a < g.x.size(); ++a) {
      const double s = s0 + (i + g.x[a]) * hs;
      const double r = std::exp(s);
      for (int j = 0; j < n_theta; ++j)
        for (std::size_t b = 0; b < g.x.size(); ++b) {
          const double th = (j + g.x[b]) * ht;
          cb(Vec2(c.x() + r * std::cos(th), c.y() + r * std::sin(th)), g.w[a] * hs * g.w[b] * ht * r * r);
        }
    }
}

}  // namespace disloc::quad
