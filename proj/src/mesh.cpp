#include "disloc/mesh.hpp"

#include "disloc/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace disloc {

namespace {

double cross(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

double segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 ab = b - a;
  const double len2 = ab.squaredNorm();
  const double t = len2 > 0.0 ? std::clamp((p - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
  return (p - (a + t * ab)).norm();
}

Vec2 area_centroid(const std::vector<Vec2>& poly) {
  double a = 0.0;
  Vec2 c = Vec2::Zero();
  for (std::size_t k = 0; k < poly.size(); ++k) {
    const Vec2& p = poly[k];
    const Vec2& q = poly[(k + 1) % poly.size()];
    const double w = cross(p, q);
    a += w;
    c += w * (p + q);
  }
  return c / (3.0 * a);
}

}  // namespace

double polygon_area(const std::vector<Vec2>& poly) {
  double a = 0.0;
  for (std::size_t k = 0; k < poly.size(); ++k) a += cross(poly[k], poly[(k + 1) % poly.size()]);
  return 0.5 * a;
}

bool point_in_polygon(const Vec2& x, const std::vector<Vec2>& poly) {
  bool inside = false;
  for (std::size_t k = 0, j = poly.size() - 1; k < poly.size(); j = k++) {
    const Vec2& a = poly[k];
    const Vec2& b = poly[j];
    if ((a.y() > x.y()) != (b.y() > x.y())) {
      const double xc = a.x() + (x.y() - a.y()) * (b.x() - a.x()) / (b.y() - a.y());
      if (x.x() < xc) inside = !inside;
    }
  }
  return inside;
}

double polygon_boundary_distance(const Vec2& x, const std::vector<Vec2>& poly) {
  double d = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < poly.size(); ++k) d = std::min(d, segment_distance(x, poly[k], poly[(k + 1) % poly.size()]));
  return d;
}

Domain2D Domain2D::disk(const Vec2& center, double radius) {
  if (!(radius > 0.0)) throw ConfigError("disk radius must be positive");
  Domain2D d;
  d.shape_ = Shape::disk;
  d.center_ = center;
  d.radius_ = radius;
  return d;
}

Domain2D Domain2D::rectangle(const Vec2& lo, const Vec2& hi) {
  if (!(hi.x() > lo.x() && hi.y() > lo.y())) throw ConfigError("rectangle needs lo < hi");
  Domain2D d;
  d.shape_ = Shape::rectangle;
  d.lo_ = lo;
  d.hi_ = hi;
  d.center_ = 0.5 * (lo + hi);
  d.vertices_ = {lo, Vec2(hi.x(), lo.y()), hi, Vec2(lo.x(), hi.y())};
  return d;
}

Domain2D Domain2D::polygon(std::vector<Vec2> vertices) {
  if (vertices.size() < 3) throw ConfigError("polygon needs at least 3 vertices");
  if (polygon_area(vertices) < 0.0) std::reverse(vertices.begin(), vertices.end());
  if (!(polygon_area(vertices) > 0.0)) throw ConfigError("degenerate polygon");
  Domain2D d;
  d.shape_ = Shape::polygon;
  d.center_ = area_centroid(vertices);
  for (std::size_t k = 0; k < vertices.size(); ++k) {
    const Vec2& a = vertices[k];
    const Vec2& b = vertices[(k + 1) % vertices.size()];
    if (!(cross(b - a, d.center_ - a) > 0.0))
      throw ConfigError("polygon must be star-shaped with respect to its centroid");
  }
  d.vertices_ = std::move(vertices);
  d.lo_ = d.vertices_[0];
  d.hi_ = d.vertices_[0];
  for (const Vec2& v : d.vertices_) {
    d.lo_ = d.lo_.cwiseMin(v);
    d.hi_ = d.hi_.cwiseMax(v);
  }
  return d;
}

bool Domain2D::contains(const Vec2& x) const {
  switch (shape_) {
    case Shape::disk:
      return (x - center_).norm() < radius_;
    case Shape::rectangle:
      return x.x() > lo_.x() && x.x() < hi_.x() && x.y() > lo_.y() && x.y() < hi_.y();
    case Shape::polygon:
      return point_in_polygon(x, vertices_);
  }
  return false;
}

double Domain2D::boundary_distance(const Vec2& x) const {
  if (shape_ == Shape::disk) return std::abs(radius_ - (x - center_).norm());
  return polygon_boundary_distance(x, vertices_);
}

double Domain2D::area() const {
  if (shape_ == Shape::disk) return kPi * radius_ * radius_;
  return polygon_area(vertices_);
}

std::pair<Vec2, Vec2> Domain2D::bbox() const {
  if (shape_ == Shape::disk) return {center_ - Vec2(radius_, radius_), center_ + Vec2(radius_, radius_)};
  return {lo_, hi_};
}

std::vector<Vec2> Domain2D::boundary_polygon(int n_disk) const {
  if (shape_ != Shape::disk) return vertices_;
  std::vector<Vec2> out;
  for (int k = 0; k < n_disk; ++k) out.push_back(center_ + radius_ * unit_direction(kTwoPi * k / n_disk));
  return out;
}

std::string Domain2D::describe() const {
  std::ostringstream os;
  os.precision(17);
  switch (shape_) {
    case Shape::disk:
      os << "disk(" << center_.x() << "," << center_.y() << ";" << radius_ << ")";
      break;
    case Shape::rectangle:
      os << "rectangle(" << lo_.x() << "," << lo_.y() << ";" << hi_.x() << "," << hi_.y() << ")";
      break;
    case Shape::polygon:
      os << "polygon(";
      for (std::size_t k = 0; k < vertices_.size(); ++k) os << (k ? ";" : "") << vertices_[k].x() << "," << vertices_[k].y();
      os << ")";
      break;
  }
  return os.str();
}

TriMesh::TriMesh(std::vector<Vec2> nodes, std::vector<std::array<int, 3>> tris, std::vector<std::array<int, 2>> boundary)
    : nodes_(std::move(nodes)), tris_(std::move(tris)), boundary_(std::move(boundary)) {
  prepare();
}

namespace {

TriMesh structured_rectangle(const Vec2& lo, const Vec2& hi, double h) {
  const int nx = std::max(1, static_cast<int>(std::ceil((hi.x() - lo.x()) / h - 1e-9)));
  const int ny = std::max(1, static_cast<int>(std::ceil((hi.y() - lo.y()) / h - 1e-9)));
  std::vector<Vec2> nodes;
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i)
      nodes.emplace_back(lo.x() + (hi.x() - lo.x()) * i / nx, lo.y() + (hi.y() - lo.y()) * j / ny);
  auto id = [nx](int i, int j) { return j * (nx + 1) + i; };
  std::vector<std::array<int, 3>> tris;
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const int a = id(i, j), b = id(i + 1, j), c = id(i + 1, j + 1), d = id(i, j + 1);
      if ((i + j) % 2 == 0) {
        tris.push_back({a, b, c});
        tris.push_back({a, c, d});
      } else {
        tris.push_back({a, b, d});
        tris.push_back({b, c, d});
      }
    }
  std::vector<std::array<int, 2>> bnd;
  for (int i = 0; i < nx; ++i) bnd.push_back({id(i, 0), id(i + 1, 0)});
  for (int j = 0; j < ny; ++j) bnd.push_back({id(nx, j), id(nx, j + 1)});
  for (int i = nx; i > 0; --i) bnd.push_back({id(i, ny), id(i - 1, ny)});
  for (int j = ny; j > 0; --j) bnd.push_back({id(0, j), id(0, j - 1)});
  return TriMesh(std::move(nodes), std::move(tris), std::move(bnd));
}

// Rings of scaled copies of the boundary around the star center, stitched by
// merging on the perimeter parameter.
TriMesh ring_mesh(const std::vector<Vec2>& poly, const Vec2& c, double h) {
  const std::size_t nv = poly.size();
  std::vector<double> cum(nv + 1, 0.0);
  for (std::size_t k = 0; k < nv; ++k) cum[k + 1] = cum[k] + (poly[(k + 1) % nv] - poly[k]).norm();
  const double perim = cum[nv];
  auto at = [&](double sigma) {
    const double s = sigma * perim;
    std::size_t k = std::upper_bound(cum.begin(), cum.end(), s) - cum.begin();
    k = std::clamp<std::size_t>(k, 1, nv) - 1;
    const double len = cum[k + 1] - cum[k];
    const double t = len > 0 ? (s - cum[k]) / len : 0.0;
    return Vec2(poly[k] + t * (poly[(k + 1) % nv] - poly[k]));
  };

  // outer ring: vertices plus uniform edge subdivisions
  std::vector<double> outer_sigma;
  for (std::size_t k = 0; k < nv; ++k) {
    const double len = cum[k + 1] - cum[k];
    const int pieces = std::max(1, static_cast<int>(std::ceil(len / h - 1e-9)));
    for (int p = 0; p < pieces; ++p) outer_sigma.push_back((cum[k] + len * p / pieces) / perim);
  }
  double rmax = 0.0;
  for (const Vec2& v : poly) rmax = std::max(rmax, (v - c).norm());
  const int n_r = std::max(1, static_cast<int>(std::lround(rmax / h)));

  std::vector<Vec2> nodes = {c};
  std::vector<std::vector<int>> ring_ids(static_cast<std::size_t>(n_r) + 1);
  std::vector<std::vector<double>> ring_sigma(static_cast<std::size_t>(n_r) + 1);
  ring_ids[0] = {0};
  ring_sigma[0] = {0.0};
  for (int k = 1; k <= n_r; ++k) {
    const double t = static_cast<double>(k) / n_r;
    std::vector<double> sig;
    if (k == n_r) {
      sig = outer_sigma;
    } else {
      const int m = std::max(6, static_cast<int>(std::lround(t * perim / h)));
      for (int j = 0; j < m; ++j) sig.push_back(static_cast<double>(j) / m);
    }
    for (double s : sig) {
      ring_ids[k].push_back(static_cast<int>(nodes.size()));
      nodes.push_back(c + t * (at(s) - c));
    }
    ring_sigma[k] = sig;
  }

  std::vector<std::array<int, 3>> tris;
  auto add = [&](int a, int b, int d) {
    if (cross(nodes[b] - nodes[a], nodes[d] - nodes[a]) < 0) std::swap(b, d);
    tris.push_back({a, b, d});
  };
  {
    const auto& r1 = ring_ids[1];
    for (std::size_t j = 0; j < r1.size(); ++j) add(0, r1[j], r1[(j + 1) % r1.size()]);
  }
  for (int k = 2; k <= n_r; ++k) {
    const auto& a = ring_ids[k - 1];
    const auto& b = ring_ids[k];
    const auto& sa = ring_sigma[k - 1];
    const auto& sb = ring_sigma[k];
    const std::size_t m = a.size(), n = b.size();
    std::size_t i = 0, j = 0;
    while (i < m || j < n) {
      const double na = i + 1 < m ? sa[i + 1] : 1.0;
      const double nb = j + 1 < n ? sb[j + 1] : 1.0;
      if (j < n && (i == m || nb <= na)) {
        add(a[i % m], b[j], b[(j + 1) % n]);
        ++j;
      } else {
        add(a[i], b[j % n], a[(i + 1) % m]);
        ++i;
      }
    }
  }
  std::vector<std::array<int, 2>> bnd;
  const auto& outer = ring_ids[n_r];
  for (std::size_t j = 0; j < outer.size(); ++j) bnd.push_back({outer[j], outer[(j + 1) % outer.size()]});
  return TriMesh(std::move(nodes), std::move(tris), std::move(bnd));
}

}  // namespace

TriMesh TriMesh::build(const Domain2D& domain, double h) {
  if (!(h > 0.0)) throw ConfigError("mesh size must be positive");
  switch (domain.shape()) {
    case Domain2D::Shape::rectangle:
      return structured_rectangle(domain.lo(), domain.hi(), h);
    case Domain2D::Shape::disk: {
      const int n = std::max(32, static_cast<int>(std::ceil(kTwoPi * domain.radius() / h)));
      return ring_mesh(domain.boundary_polygon(n), domain.center(), h);
    }
    case Domain2D::Shape::polygon:
      return ring_mesh(domain.vertices(), domain.center(), h);
  }
  throw ConfigError("unknown domain shape");
}

void TriMesh::prepare() {
  area_.resize(tris_.size());
  grads_.resize(tris_.size());
  Vec2 lo = nodes_.front(), hi = nodes_.front();
  for (const Vec2& p : nodes_) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  double edge_sum = 0.0;
  for (std::size_t t = 0; t < tris_.size(); ++t) {
    const Vec2& a = nodes_[tris_[t][0]];
    const Vec2& b = nodes_[tris_[t][1]];
    const Vec2& c = nodes_[tris_[t][2]];
    const double det = cross(b - a, c - a);
    if (!(det > 0.0)) throw SolverError("mesh has an inverted or degenerate triangle");
    area_[t] = 0.5 * det;
    // lambda_a(x) = cross(c - b, x - b) / det, so grad lambda_a = J (c - b) / det
    grads_[t][0] = rot90(c - b) / det;
    grads_[t][1] = rot90(a - c) / det;
    grads_[t][2] = rot90(b - a) / det;
    edge_sum += (b - a).norm() + (c - b).norm() + (a - c).norm();
  }
  const double mean_edge = edge_sum / (3.0 * static_cast<double>(tris_.size()));
  bsize_ = 2.0 * mean_edge;
  blo_ = lo;
  bnx_ = std::max(1, static_cast<int>(std::ceil((hi.x() - lo.x()) / bsize_)) + 1);
  bny_ = std::max(1, static_cast<int>(std::ceil((hi.y() - lo.y()) / bsize_)) + 1);
  buckets_.assign(static_cast<std::size_t>(bnx_) * bny_, {});
  for (std::size_t t = 0; t < tris_.size(); ++t) {
    Vec2 tl = nodes_[tris_[t][0]], th = tl;
    for (int k = 1; k < 3; ++k) {
      tl = tl.cwiseMin(nodes_[tris_[t][k]]);
      th = th.cwiseMax(nodes_[tris_[t][k]]);
    }
    const int i0 = static_cast<int>((tl.x() - blo_.x()) / bsize_), i1 = static_cast<int>((th.x() - blo_.x()) / bsize_);
    const int j0 = static_cast<int>((tl.y() - blo_.y()) / bsize_), j1 = static_cast<int>((th.y() - blo_.y()) / bsize_);
    for (int j = j0; j <= std::min(j1, bny_ - 1); ++j)
      for (int i = i0; i <= std::min(i1, bnx_ - 1); ++i) buckets_[j * bnx_ + i].push_back(static_cast<int>(t));
  }
}

std::array<Vec2, 3> TriMesh::corners(int t) const {
  return {nodes_[tris_[t][0]], nodes_[tris_[t][1]], nodes_[tris_[t][2]]};
}

double TriMesh::diameter(int t) const {
  const auto c = corners(t);
  return std::max({(c[1] - c[0]).norm(), (c[2] - c[1]).norm(), (c[0] - c[2]).norm()});
}

PointLocation TriMesh::locate(const Vec2& x, double snap) const {
  const int bi = static_cast<int>(std::floor((x.x() - blo_.x()) / bsize_));
  const int bj = static_cast<int>(std::floor((x.y() - blo_.y()) / bsize_));
  auto bary = [&](int t) {
    const Vec2 cen = (nodes_[tris_[t][0]] + nodes_[tris_[t][1]] + nodes_[tris_[t][2]]) / 3.0;
    std::array<double, 3> l;
    for (int k = 0; k < 3; ++k) l[k] = 1.0 / 3.0 + grads_[t][k].dot(x - cen);
    return l;
  };
  if (bi >= 0 && bi < bnx_ && bj >= 0 && bj < bny_) {
    for (int t : buckets_[bj * bnx_ + bi]) {
      const auto l = bary(t);
      if (l[0] >= -1e-12 && l[1] >= -1e-12 && l[2] >= -1e-12) return {t, l};
    }
  }
  if (snap <= 0.0) return {};
  const int reach = 1 + static_cast<int>(std::ceil(snap / bsize_));
  double best = std::numeric_limits<double>::infinity();
  int best_t = -1;
  for (int j = bj - reach; j <= bj + reach; ++j)
    for (int i = bi - reach; i <= bi + reach; ++i) {
      if (i < 0 || i >= bnx_ || j < 0 || j >= bny_) continue;
      for (int t : buckets_[j * bnx_ + i]) {
        const auto c = corners(t);
        const double d = quad::distance_to_triangle(x, {c[0], c[1], c[2]});
        if (d < best) {
          best = d;
          best_t = t;
        }
      }
    }
  if (best_t < 0 || best > snap) return {};
  auto l = bary(best_t);
  double s = 0.0;
  for (double& v : l) {
    v = std::max(v, 0.0);
    s += v;
  }
  for (double& v : l) v /= s;
  return {best_t, l};
}

double TriMesh::total_area() const {
  double a = 0.0;
  for (double v : area_) a += v;
  return a;
}

double TriMesh::max_edge() const {
  double m = 0.0;
  for (std::size_t t = 0; t < tris_.size(); ++t) m = std::max(m, diameter(static_cast<int>(t)));
  return m;
}

}  // namespace disloc
