#pragma once

#include <span>
#include <vector>

#include "gmink/sphere.hpp"

namespace gmink {

/// Half-space {y : <normal, y> <= offset} with unit normal.
struct Facet {
  Vec3 normal;
  double offset;
};

/// Convex hull of a point set in R^2 (z ignored) or R^3, stored as facets
/// and vertices. 2D uses Andrew's monotone chain; 3D is incremental.
class ConvexPolytope {
 public:
  static ConvexPolytope hull(int dim, std::span<const Vec3> points);

  int dim() const { return dim_; }
  const std::vector<Facet>& facets() const { return facets_; }
  // 2D: counter-clockwise.
  const std::vector<Vec3>& vertices() const { return vertices_; }

  // max{lambda : lambda * dir in P}; dir need not be unit. Needs the origin
  // in P; returns 0 where the origin lies on a facet facing dir.
  double radial(const Vec3& dir) const;
  double support(const Vec3& x) const;
  bool contains(const Vec3& y, double tol = 0.0) const;

 private:
  void index_angles();

  int dim_ = 2;
  std::vector<Facet> facets_;
  std::vector<Vec3> vertices_;
  // 2D fast radial lookup, valid when the origin is interior
  bool origin_interior_ = false;
  std::vector<double> vertex_angle_;
  std::size_t first_vertex_ = 0;
};

}  // namespace gmink
