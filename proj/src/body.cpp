#include "gmink/body.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include <Eigen/QR>
#include <boost/math/tools/minima.hpp>

#include "gmink/error.hpp"
#include "gmink/hull.hpp"
#include "gmink/interp.hpp"

namespace gmink {

namespace {

constexpr double kPi = std::numbers::pi;

double wrap_angle(double a) {
  a = std::fmod(a + kPi, 2.0 * kPi);
  if (a < 0.0) a += 2.0 * kPi;
  return a - kPi;
}

void require_validated(const SupportField& h, const char* op) {
  if (!h.validated())
    throw Error(ErrorCode::NotConvex, std::string(op) + " needs a validated support field");
}

ScalarField radial_circle(const BoundaryCloud& cloud) {
  const DirectionGrid& g = *cloud.grid;
  const std::size_t n = g.size();
  std::vector<double> psi(n), rho(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Vec3& X = cloud.points[i];
    psi[i] = g.angle(i) + wrap_angle(std::atan2(X.y(), X.x()) - g.angle(i));
    rho[i] = X.norm();
  }
  for (std::size_t i = 1; i < n; ++i)
    if (!(psi[i] > psi[i - 1]))
      throw Error(ErrorCode::CoverageFailure,
                  "boundary directions are not monotone at node " + std::to_string(i));
  if (!(psi[n - 1] < psi[0] + 2.0 * kPi))
    throw Error(ErrorCode::CoverageFailure, "boundary directions wrap more than once");
  PeriodicPchip interp(psi, rho);
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = interp(g.angle(i));
  return ScalarField(cloud.grid, std::move(out));
}

ScalarField radial_sphere(const BoundaryCloud& cloud) {
  const DirectionGrid& g = *cloud.grid;
  const std::size_t n = g.size();
  std::vector<Vec3> u(n);
  std::vector<double> rho(n);
  for (std::size_t j = 0; j < n; ++j) {
    rho[j] = cloud.points[j].norm();
    u[j] = cloud.points[j] / rho[j];
  }
  // Weighted quadratic fit over every sample within an angular radius tied
  // to the latitude spacing. A fixed neighbour count degenerates near the
  // poles, where the nearest samples all sit on one small ring.
  const double max_gap = std::cos(3.0 * g.spacing());
  const double radius0 = 1.6 * g.spacing();
  std::vector<double> out(n);
  std::vector<std::pair<double, std::size_t>> near;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec3& x = g.node(i);
    double best = -2.0;
    for (std::size_t j = 0; j < n; ++j) best = std::max(best, x.dot(u[j]));
    if (best < max_gap)
      throw Error(ErrorCode::CoverageFailure, "no boundary sample near grid node " + std::to_string(i));
    double radius = radius0;
    for (;;) {
      near.clear();
      const double c = std::cos(radius);
      for (std::size_t j = 0; j < n; ++j) {
        const double d = x.dot(u[j]);
        if (d > c) near.emplace_back(std::acos(std::min(1.0, d)), j);
      }
      if (near.size() >= 12) break;
      radius *= 1.5;
    }
    const Vec3& e1 = g.tangent(i, 0);
    const Vec3& e2 = g.tangent(i, 1);
    Eigen::MatrixXd A(near.size(), 6);
    Eigen::VectorXd b(near.size());
    for (std::size_t k = 0; k < near.size(); ++k) {
      const auto [ang, j] = near[k];
      const Vec3 d = u[j] / x.dot(u[j]) - x;  // gnomonic coordinates
      const double s = d.dot(e1), t = d.dot(e2);
      const double q = ang / radius;
      const double w = (1.0 - q * q) * (1.0 - q * q) + 1e-3;
      const auto r = static_cast<Eigen::Index>(k);
      A.row(r) << 1.0, s, t, s * s, s * t, t * t;
      A.row(r) *= w;
      b(r) = w * rho[j];
    }
    out[i] = A.colPivHouseholderQr().solve(b)(0);
  }
  return ScalarField(cloud.grid, std::move(out));
}

}  // namespace

SupportField::SupportField(ScalarField h) : h_(std::move(h)) {
  const HessianField b = curvature_matrix(h_);
  min_eig_ = b.min_eig(0);
  for (std::size_t i = 1; i < h_.size(); ++i) min_eig_ = std::min(min_eig_, b.min_eig(i));
}

ConvexityReport validate_convexity(const ScalarField& h) {
  ConvexityReport r;
  const HessianField b = curvature_matrix(h);
  std::size_t worst = 0;
  double worst_eig = b.min_eig(0);
  std::optional<std::size_t> nonpositive;
  for (std::size_t i = 0; i < h.size(); ++i) {
    const double e = b.min_eig(i);
    if (e < worst_eig) worst_eig = e, worst = i;
    if (!nonpositive && !(h[i] > 0.0)) nonpositive = i;
  }
  if (nonpositive) worst = *nonpositive;
  r.worst_node = worst;
  r.value = h[worst];
  r.eigenvalue = b.min_eig(worst);
  r.ok = !nonpositive && worst_eig > kConvexityEps;
  std::ostringstream msg;
  if (r.ok) {
    msg << "convex, min eigenvalue " << worst_eig;
    SupportField s(h);
    s.validated_ = true;
    r.body = std::move(s);
  } else {
    msg << "convexity validation failed at node " << worst << " (h=" << r.value
        << ", min eigenvalue=" << r.eigenvalue << ")";
  }
  r.message = msg.str();
  return r;
}

SupportField require_convex(const ScalarField& h) {
  ConvexityReport r = validate_convexity(h);
  if (!r.ok) throw Error(ErrorCode::NotConvex, r.message);
  return std::move(*r.body);
}

SupportField ball(GridPtr grid, double radius) {
  return require_convex(ScalarField::constant(std::move(grid), radius));
}

BoundaryCloud support_to_boundary(const SupportField& h) {
  require_validated(h, "support_to_boundary");
  const TangentField grad = gradient(h.h());
  const DirectionGrid& g = h.grid();
  BoundaryCloud out{h.grid_ptr(), std::vector<Vec3>(g.size())};
  for (std::size_t i = 0; i < g.size(); ++i) out.points[i] = h.h()[i] * g.node(i) + grad.ambient(i);
  return out;
}

RadialField support_to_radial(const SupportField& h) {
  const BoundaryCloud cloud = support_to_boundary(h);
  if (h.grid().dim() == 2) return {radial_circle(cloud)};
  return {radial_sphere(cloud)};
}

SupportField radial_to_support(const RadialField& rho, HullMode mode) {
  const DirectionGrid& g = rho.rho.grid();
  const std::size_t n = g.size();
  if (rho.rho.min() <= 0.0) throw Error(ErrorCode::InvalidArgument, "radial function must be positive");
  std::vector<double> h(n);
  std::vector<std::size_t> arg(n);
  for (std::size_t i = 0; i < n; ++i) {
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < n; ++j) {
      const double v = rho.rho[j] * g.node(i).dot(g.node(j));
      if (v > best) best = v, arg[i] = j;
    }
    h[i] = best;
  }
  if (mode == HullMode::Refined) {
    if (g.dim() != 2) throw Error(ErrorCode::Unsupported, "refined hull mode is n=2 only");
    const TrigInterpolant interp(rho.rho.values());
    const double d = 2.0 * kPi / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double centre = g.angle(arg[i]);
      const double th = g.angle(i);
      auto neg = [&](double psi) { return -interp(psi) * std::cos(psi - th); };
      const auto [psi, val] = boost::math::tools::brent_find_minima(neg, centre - d, centre + d, 52);
      (void)psi;
      h[i] = std::max(h[i], -val);
    }
  }
  ScalarField field(rho.rho.grid_ptr(), std::move(h));
  ConvexityReport r = validate_convexity(field);
  if (r.ok) return std::move(*r.body);
  return SupportField(std::move(field));
}

RadialField polar_dual(const SupportField& h) {
  require_validated(h, "polar_dual");
  std::vector<double> r(h.h().size());
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = 1.0 / h.h()[i];
  return {ScalarField(h.grid_ptr(), std::move(r))};
}

SupportField polar_dual(const RadialField& rho) {
  if (rho.rho.min() <= 0.0) throw Error(ErrorCode::InvalidArgument, "radial function must be positive");
  std::vector<double> h(rho.rho.size());
  for (std::size_t i = 0; i < h.size(); ++i) h[i] = 1.0 / rho.rho[i];
  ScalarField field(rho.rho.grid_ptr(), std::move(h));
  ConvexityReport r = validate_convexity(field);
  if (r.ok) return std::move(*r.body);
  return SupportField(std::move(field));
}

SupportField wulff_shape(const ScalarField& f) {
  const DirectionGrid& g = f.grid();
  if (f.min() <= 0.0) throw Error(ErrorCode::InvalidArgument, "Wulff shape needs f > 0");
  // [f]* = conv({x_j / f_j} u {o}), and h_[f] = 1 / rho_{[f]*}.
  std::vector<Vec3> pts;
  pts.reserve(g.size() + 1);
  for (std::size_t j = 0; j < g.size(); ++j) pts.push_back(g.node(j) / f[j]);
  pts.push_back(Vec3::Zero());
  const ConvexPolytope polar = ConvexPolytope::hull(g.dim(), pts);
  std::vector<double> h(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) h[i] = 1.0 / polar.radial(g.node(i));
  ScalarField field(f.grid_ptr(), std::move(h));
  ConvexityReport r = validate_convexity(field);
  if (r.ok) return std::move(*r.body);
  return SupportField(std::move(field));
}

}  // namespace gmink
