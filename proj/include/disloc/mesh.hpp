#pragma once

#include "disloc/types.hpp"

#include <array>
#include <string>
#include <vector>

namespace disloc {

/// Bounded Lipschitz domain: disk, axis-aligned rectangle, or a polygon that
/// is star-shaped with respect to its vertex centroid (counterclockwise).
class Domain2D {
 public:
  enum class Shape { disk, rectangle, polygon };

  static Domain2D disk(const Vec2& center, double radius);
  static Domain2D unit_disk() { return disk(Vec2::Zero(), 1.0); }
  static Domain2D rectangle(const Vec2& lo, const Vec2& hi);
  static Domain2D unit_square() { return rectangle(Vec2::Zero(), Vec2(1, 1)); }
  static Domain2D polygon(std::vector<Vec2> vertices);

  Shape shape() const { return shape_; }
  const Vec2& center() const { return center_; }
  double radius() const { return radius_; }
  const Vec2& lo() const { return lo_; }
  const Vec2& hi() const { return hi_; }
  const std::vector<Vec2>& vertices() const { return vertices_; }

  bool contains(const Vec2& x) const;
  /// Distance from x to the boundary curve.
  double boundary_distance(const Vec2& x) const;
  double area() const;
  /// Bounding box (lo, hi).
  std::pair<Vec2, Vec2> bbox() const;
  /// Counterclockwise boundary polygon; a disk is sampled with n_disk points.
  std::vector<Vec2> boundary_polygon(int n_disk) const;
  std::string describe() const;

 private:
  Shape shape_ = Shape::disk;
  Vec2 center_ = Vec2::Zero();
  double radius_ = 1.0;
  Vec2 lo_ = Vec2::Zero(), hi_ = Vec2::Zero();
  std::vector<Vec2> vertices_;
};

double polygon_area(const std::vector<Vec2>& poly);
bool point_in_polygon(const Vec2& x, const std::vector<Vec2>& poly);
double polygon_boundary_distance(const Vec2& x, const std::vector<Vec2>& poly);

struct PointLocation {
  int tri = -1;
  std::array<double, 3> bary{};
};

/// Conforming P1 triangulation with a bucket grid for point location.
class TriMesh {
 public:
  /// Structured grid for rectangles; ring mesh around the centroid otherwise.
  static TriMesh build(const Domain2D& domain, double h);
  TriMesh(std::vector<Vec2> nodes, std::vector<std::array<int, 3>> tris, std::vector<std::array<int, 2>> boundary);

  const std::vector<Vec2>& nodes() const { return nodes_; }
  const std::vector<std::array<int, 3>>& triangles() const { return tris_; }
  /// Boundary edges oriented counterclockwise (domain on the left).
  const std::vector<std::array<int, 2>>& boundary_edges() const { return boundary_; }
  std::size_t n_nodes() const { return nodes_.size(); }
  std::size_t n_triangles() const { return tris_.size(); }

  double area(int t) const { return area_[t]; }
  /// Gradients of the three P1 basis functions on triangle t.
  const std::array<Vec2, 3>& grads(int t) const { return grads_[t]; }
  std::array<Vec2, 3> corners(int t) const;
  double diameter(int t) const;

  /// Containing triangle and barycentric coordinates; points slightly outside
  /// the mesh are snapped to the nearest triangle when within `snap`.
  PointLocation locate(const Vec2& x, double snap = 0.0) const;

  double total_area() const;
  double max_edge() const;

 private:
  std::vector<Vec2> nodes_;
  std::vector<std::array<int, 3>> tris_;
  std::vector<std::array<int, 2>> boundary_;
  std::vector<double> area_;
  std::vector<std::array<Vec2, 3>> grads_;
  // bucket grid
  Vec2 blo_ = Vec2::Zero();
  double bsize_ = 1.0;
  int bnx_ = 1, bny_ = 1;
  std::vector<std::vector<int>> buckets_;
  void prepare();
};

}  // namespace disloc
