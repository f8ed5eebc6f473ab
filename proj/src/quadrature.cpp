#include "disloc/quadrature.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <map>
#include <mutex>

namespace disloc::quad {

namespace {

template <int N>
Rule1D make_gauss() {
  using G = boost::math::quadrature::gauss<double, N>;
  const auto& xs = G::abscissa();
  const auto& ws = G::weights();
  Rule1D r;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (xs[i] == 0.0) {
      r.x.push_back(0.5);
      r.w.push_back(0.5 * ws[i]);
      continue;
    }
    r.x.push_back(0.5 - 0.5 * xs[i]);
    r.w.push_back(0.5 * ws[i]);
    r.x.push_back(0.5 + 0.5 * xs[i]);
    r.w.push_back(0.5 * ws[i]);
  }
  return r;
}

Rule1D build_gauss(int n) {
  switch (n) {
    case 1: return {{0.5}, {1.0}};
    case 2: return make_gauss<2>();
    case 3: return make_gauss<3>();
    case 4: return make_gauss<4>();
    case 5: return make_gauss<5>();
    case 6: return make_gauss<6>();
    case 7: return make_gauss<7>();
    case 8: return make_gauss<8>();
    case 9: return make_gauss<9>();
    case 10: return make_gauss<10>();
    default: throw std::invalid_argument("gauss01: supported orders are 1..10");
  }
}

std::mutex cache_mutex;

}  // namespace

const Rule1D& gauss01(int n) {
  static std::map<int, Rule1D> cache;
  std::lock_guard lock(cache_mutex);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, build_gauss(n)).first;
  return it->second;
}

const TriRule& triangle_rule(int n) {
  static std::map<int, TriRule> cache;
  {
    std::lock_guard lock(cache_mutex);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
  }
  const Rule1D& g = gauss01(n);
  TriRule t;
  for (std::size_t i = 0; i < g.x.size(); ++i)
    for (std::size_t j = 0; j < g.x.size(); ++j) {
      const double u = g.x[i];
      t.a.push_back(u);
      t.b.push_back(g.x[j] * (1.0 - u));
      t.w.push_back(g.w[i] * g.w[j] * (1.0 - u));
    }
  std::lock_guard lock(cache_mutex);
  return cache.emplace(n, std::move(t)).first->second;
}

double triangle_area(const Triangle& t) {
  const Vec2 a = t[1] - t[0], b = t[2] - t[0];
  return 0.5 * std::abs(a.x() * b.y() - a.y() * b.x());
}

namespace {

double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 ab = b - a;
  const double len2 = ab.squaredNorm();
  double t = len2 > 0.0 ? (p - a).dot(ab) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return (p - (a + t * ab)).norm();
}

}  // namespace

double distance_to_triangle(const Vec2& p, const Triangle& t) {
  auto cross = [](const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); };
  const double d0 = cross(t[1] - t[0], p - t[0]);
  const double d1 = cross(t[2] - t[1], p - t[1]);
  const double d2 = cross(t[0] - t[2], p - t[2]);
  const bool has_neg = d0 < 0 || d1 < 0 || d2 < 0;
  const bool has_pos = d0 > 0 || d1 > 0 || d2 > 0;
  if (!(has_neg && has_pos)) return 0.0;
  return std::min({point_segment_distance(p, t[0], t[1]), point_segment_distance(p, t[1], t[2]),
                   point_segment_distance(p, t[2], t[0])});
}

}  // namespace disloc::quad
