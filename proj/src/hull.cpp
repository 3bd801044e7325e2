#include "gmink/hull.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>
#include <utility>

#include "gmink/error.hpp"

namespace gmink {

namespace {

double cross2(const Vec3& o, const Vec3& a, const Vec3& b) {
  return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
}

std::vector<Vec3> monotone_chain(std::span<const Vec3> pts) {
  std::vector<Vec3> p(pts.begin(), pts.end());
  for (auto& q : p) q.z() = 0.0;
  std::sort(p.begin(), p.end(), [](const Vec3& a, const Vec3& b) {
    return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
  });
  p.erase(std::unique(p.begin(), p.end(), [](const Vec3& a, const Vec3& b) { return a == b; }), p.end());
  if (p.size() < 3) return p;
  std::vector<Vec3> h(2 * p.size());
  std::size_t k = 0;
  for (const auto& q : p) {
    while (k >= 2 && cross2(h[k - 2], h[k - 1], q) <= 0.0) --k;
    h[k++] = q;
  }
  for (std::size_t i = p.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cross2(h[k - 2], h[k - 1], p[i]) <= 0.0) --k;
    h[k++] = p[i];
  }
  h.resize(k - 1);
  return h;
}

struct Face {
  std::array<std::size_t, 3> v;
  Vec3 n;
  double d;
  bool alive = true;
};

Face make_face(const std::vector<Vec3>& p, std::size_t a, std::size_t b, std::size_t c) {
  Face f{{a, b, c}, (p[b] - p[a]).cross(p[c] - p[a]), 0.0};
  const double len = f.n.norm();
  f.n /= len;
  f.d = f.n.dot(p[a]);
  return f;
}

std::vector<Face> incremental_hull(const std::vector<Vec3>& p) {
  const std::size_t n = p.size();
  if (n < 4) throw Error(ErrorCode::InvalidArgument, "3D hull needs at least 4 points");
  double scale = 0.0;
  for (const auto& q : p) scale = std::max(scale, q.cwiseAbs().maxCoeff());
  const double eps = 1e-12 * std::max(scale, 1.0);

  // initial tetrahedron
  std::size_t i0 = 0, i1 = 0, i2 = 0, i3 = 0;
  double best = -1.0;
  for (std::size_t i = 0; i < n; ++i)
    if ((p[i] - p[i0]).squaredNorm() > best) best = (p[i] - p[i0]).squaredNorm(), i1 = i;
  best = -1.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = (p[i] - p[i0]).cross(p[i1] - p[i0]).squaredNorm();
    if (d > best) best = d, i2 = i;
  }
  best = -1.0;
  const Vec3 nrm = (p[i1] - p[i0]).cross(p[i2] - p[i0]).normalized();
  for (std::size_t i = 0; i < n; ++i) {
    const double d = std::abs(nrm.dot(p[i] - p[i0]));
    if (d > best) best = d, i3 = i;
  }
  if (best <= eps) throw Error(ErrorCode::InvalidArgument, "3D hull input is coplanar");

  const Vec3 centre = 0.25 * (p[i0] + p[i1] + p[i2] + p[i3]);
  std::vector<Face> faces;
  auto add_oriented = [&](std::size_t a, std::size_t b, std::size_t c) {
    Face f = make_face(p, a, b, c);
    if (f.n.dot(centre) > f.d) f = make_face(p, a, c, b);
    faces.push_back(f);
  };
  add_oriented(i0, i1, i2);
  add_oriented(i0, i1, i3);
  add_oriented(i0, i2, i3);
  add_oriented(i1, i2, i3);

  std::set<std::pair<std::size_t, std::size_t>> edges;
  std::vector<std::size_t> visible;
  for (std::size_t q = 0; q < n; ++q) {
    if (q == i0 || q == i1 || q == i2 || q == i3) continue;
    visible.clear();
    for (std::size_t f = 0; f < faces.size(); ++f)
      if (faces[f].alive && faces[f].n.dot(p[q]) - faces[f].d > eps) visible.push_back(f);
    if (visible.empty()) continue;
    edges.clear();
    for (std::size_t f : visible) {
      const auto& v = faces[f].v;
      for (int e = 0; e < 3; ++e) edges.insert({v[e], v[(e + 1) % 3]});
      faces[f].alive = false;
    }
    for (const auto& [a, b] : edges)
      if (!edges.count({b, a})) faces.push_back(make_face(p, a, b, q));
  }
  std::erase_if(faces, [](const Face& f) { return !f.alive; });
  return faces;
}

}  // namespace

ConvexPolytope ConvexPolytope::hull(int dim, std::span<const Vec3> points) {
  ConvexPolytope out;
  out.dim_ = dim;
  if (dim == 2) {
    out.vertices_ = monotone_chain(points);
    const std::size_t m = out.vertices_.size();
    if (m < 3) throw Error(ErrorCode::InvalidArgument, "2D hull is degenerate");
    for (std::size_t k = 0; k < m; ++k) {
      const Vec3& a = out.vertices_[k];
      const Vec3& b = out.vertices_[(k + 1) % m];
      Vec3 nrm(b.y() - a.y(), a.x() - b.x(), 0.0);
      nrm.normalize();
      out.facets_.push_back({nrm, nrm.dot(a)});
    }
    out.index_angles();
    return out;
  }
  if (dim != 3) throw Error(ErrorCode::InvalidArgument, "hull dimension must be 2 or 3");
  std::vector<Vec3> p(points.begin(), points.end());
  const auto faces = incremental_hull(p);
  std::vector<char> used(p.size(), 0);
  for (const auto& f : faces) {
    out.facets_.push_back({f.n, f.d});
    for (auto v : f.v) used[v] = 1;
  }
  for (std::size_t i = 0; i < p.size(); ++i)
    if (used[i]) out.vertices_.push_back(p[i]);
  return out;
}

void ConvexPolytope::index_angles() {
  origin_interior_ = std::all_of(facets_.begin(), facets_.end(), [](const Facet& f) { return f.offset > 0.0; });
  if (!origin_interior_) return;
  const std::size_t m = vertices_.size();
  std::vector<double> ang(m);
  for (std::size_t k = 0; k < m; ++k) ang[k] = std::atan2(vertices_[k].y(), vertices_[k].x());
  first_vertex_ = static_cast<std::size_t>(std::min_element(ang.begin(), ang.end()) - ang.begin());
  vertex_angle_.resize(m);
  for (std::size_t k = 0; k < m; ++k) {
    double a = ang[(first_vertex_ + k) % m];
    if (k > 0 && a < vertex_angle_[k - 1]) a += 2.0 * std::numbers::pi;
    vertex_angle_[k] = a;
  }
}

double ConvexPolytope::radial(const Vec3& dir) const {
  if (dim_ == 2 && origin_interior_) {
    double a = std::atan2(dir.y(), dir.x());
    if (a < vertex_angle_.front()) a += 2.0 * std::numbers::pi;
    const std::size_t m = vertex_angle_.size();
    auto it = std::upper_bound(vertex_angle_.begin(), vertex_angle_.end(), a);
    const std::size_t k = static_cast<std::size_t>(it - vertex_angle_.begin()) - 1;
    const Facet& f = facets_[(first_vertex_ + k) % m];
    return f.offset / f.normal.dot(dir);
  }
  double r = std::numeric_limits<double>::infinity();
  for (const auto& f : facets_) {
    const double c = f.normal.dot(dir);
    if (c > 0.0) r = std::min(r, std::max(f.offset, 0.0) / c);
  }
  return r;
}

double ConvexPolytope::support(const Vec3& x) const {
  double s = -std::numeric_limits<double>::infinity();
  for (const auto& v : vertices_) s = std::max(s, v.dot(x));
  return s;
}

bool ConvexPolytope::contains(const Vec3& y, double tol) const {
  return std::all_of(facets_.begin(), facets_.end(),
                     [&](const Facet& f) { return f.normal.dot(y) <= f.offset + tol; });
}

}  // namespace gmink
