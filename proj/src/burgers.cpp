#include "disloc/burgers.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <limits>
#include <map>
#include <numeric>
#include <utility>

namespace disloc {

int LatticeVector::l1() const {
  return std::accumulate(coeffs.begin(), coeffs.end(), 0, [](int a, int c) { return a + std::abs(c); });
}

BurgersSystem::BurgersSystem(std::vector<Vec2> vectors) : s_(std::move(vectors)) {
  if (s_.empty()) throw ConfigError("Burgers system is empty");
  max_norm_ = 0.0;
  min_norm_ = std::numeric_limits<double>::infinity();
  for (const Vec2& b : s_) {
    if (!std::isfinite(b.x()) || !std::isfinite(b.y())) throw ConfigError("non-finite Burgers vector");
    max_norm_ = std::max(max_norm_, b.norm());
    min_norm_ = std::min(min_norm_, b.norm());
  }
  if (!(min_norm_ > 0.0)) throw ConfigError("Burgers system contains the zero vector");
  bool spans = false;
  for (std::size_t i = 0; i < s_.size() && !spans; ++i)
    for (std::size_t j = i + 1; j < s_.size() && !spans; ++j) {
      const double det = s_[i].x() * s_[j].y() - s_[i].y() * s_[j].x();
      if (std::abs(det) > 1e-12 * s_[i].norm() * s_[j].norm()) spans = true;
    }
  if (!spans) throw ConfigError("Burgers vectors do not span R^2");
}

BurgersSystem BurgersSystem::square() {
  return BurgersSystem({Vec2(1, 0), Vec2(0, 1), Vec2(-1, 0), Vec2(0, -1)});
}

BurgersSystem BurgersSystem::hexagonal() {
  const Vec2 e1(1, 0);
  const Vec2 h(0.5, 0.5 * std::sqrt(3.0));
  return BurgersSystem({e1, h, h - e1, -e1, -h, e1 - h});
}

namespace {

using Key = std::pair<std::int64_t, std::int64_t>;

Key key_of(const Vec2& v, double unit) {
  return {std::llround(v.x() / unit), std::llround(v.y() / unit)};
}

}  // namespace

std::vector<LatticeVector> BurgersSystem::lattice_ball(double radius, std::size_t cap) const {
  if (radius < max_norm_ * (1.0 - 1e-12))
    throw ConfigError("lattice_ball radius must be at least max |b|");

  // Breadth-first search over +-b steps. BFS depth is the l1 size of the
  // witness; the search region is padded so that minimal combinations can be
  // ordered with partial sums staying near the segment [0, xi].
  const double unit = 1e-9 * max_norm_;
  const double search_radius = radius + 3.0 * max_norm_;
  std::map<Key, LatticeVector> seen;
  std::deque<Key> queue;
  const Key origin = key_of(Vec2::Zero(), unit);
  seen.emplace(origin, LatticeVector{Vec2::Zero(), std::vector<int>(s_.size(), 0)});
  queue.push_back(origin);

  while (!queue.empty()) {
    const LatticeVector cur = seen.at(queue.front());
    queue.pop_front();
    for (std::size_t i = 0; i < s_.size(); ++i) {
      for (int sign : {1, -1}) {
        Vec2 next = cur.value + sign * s_[i];
        if (next.norm() > search_radius) continue;
        const Key k = key_of(next, unit);
        if (seen.count(k)) continue;
        LatticeVector lv{next, cur.coeffs};
        lv.coeffs[i] += sign;
        seen.emplace(k, std::move(lv));
        queue.push_back(k);
        if (seen.size() > cap)
          throw SolverError("lattice enumeration exceeded the element cap; is Span_Z S discrete?");
      }
    }
  }

  std::vector<LatticeVector> out;
  for (auto& [k, lv] : seen) {
    const double n = lv.value.norm();
    if (n > 1e-9 * max_norm_ && n <= radius * (1.0 + 1e-12)) out.push_back(lv);
  }
  std::sort(out.begin(), out.end(), [unit](const LatticeVector& a, const LatticeVector& b) {
    return key_of(a.value, unit) < key_of(b.value, unit);
  });
  return out;
}

}  // namespace disloc
