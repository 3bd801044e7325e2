#include "gmink/chart.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "gmink/error.hpp"
#include "gmink/interp.hpp"

namespace gmink {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double gk(const std::function<double(double)>& f, double a, double b) {
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 12, 1e-14);
}

}  // namespace

double ChartSpec::y_max() const { return std::sqrt(1.0 / (tau1 * tau1) - 1.0); }

void ChartSpec::validate(int dim) const {
  if (dim != 2 && dim != 3) throw Error(ErrorCode::InvalidArgument, "dimension must be 2 or 3");
  if (!(tau1 > 0.0 && tau1 < 1.0)) throw Error(ErrorCode::InvalidArgument, "chart tau1 must lie in (0,1)");
  if (std::abs(pole.norm() - 1.0) > 1e-12) throw Error(ErrorCode::InvalidArgument, "chart pole must be a unit vector");
  if (dim == 2 && std::abs(pole.z()) > 0.0) throw Error(ErrorCode::InvalidArgument, "n=2 chart pole must lie in the plane");
  if (!(spacing > 0.0)) throw Error(ErrorCode::InvalidArgument, "chart spacing must be positive");
}

void ChartSpec::validate_lift(int dim) const {
  validate(dim);
  if (!(tau1 > 0.5 && tau1 < 0.95)) throw Error(ErrorCode::InvalidArgument, "chart tau1 must lie in (0.5, 0.95)");
  if (spacing > 0.25 * y_max()) throw Error(ErrorCode::InvalidArgument, "chart spacing too coarse for the cap");
}

std::array<Vec3, 2> ChartSpec::basis(int dim) const {
  if (dim == 2) return {Vec3(-pole.y(), pole.x(), 0.0), Vec3::Zero()};
  // deterministic completion of e to an orthonormal frame
  const Vec3 helper = std::abs(pole.z()) < 0.9 ? Vec3(0.0, 0.0, 1.0) : Vec3(1.0, 0.0, 0.0);
  const Vec3 a = helper.cross(pole).normalized();
  return {a, pole.cross(a)};
}

Vec3 ChartField::ambient(std::size_t k) const {
  ChartSpec s;
  s.pole = pole;
  const auto b = s.basis(dim);
  return pole + y[k][0] * b[0] + y[k][1] * b[1];
}

Vec3 chart_projection(const ChartSpec& spec, const std::array<double, 2>& y, int dim) {
  const auto b = spec.basis(dim);
  const Vec3 p = spec.pole + y[0] * b[0] + y[1] * b[1];
  return p / std::sqrt(1.0 + y[0] * y[0] + y[1] * y[1]);
}

ChartField lift_to_chart(const SupportField& h, const ChartSpec& spec) {
  if (!h.validated()) throw Error(ErrorCode::NotConvex, "lift_to_chart needs a validated body");
  const int dim = h.grid().dim();
  spec.validate_lift(dim);
  const double d = spec.spacing;
  const double ym = spec.y_max();
  const long K = static_cast<long>(std::floor(ym / d + 1e-9));

  ChartField cf;
  cf.dim = dim;
  cf.pole = spec.pole;
  cf.spacing = d;
  const long W = 2 * K + 1;
  std::vector<std::ptrdiff_t> lookup(static_cast<std::size_t>(dim == 2 ? W : W * W), -1);
  auto key = [&](long a, long b) { return static_cast<std::size_t>(dim == 2 ? a + K : (a + K) * W + (b + K)); };
  if (dim == 2) {
    for (long a = -K; a <= K; ++a) {
      lookup[key(a, 0)] = static_cast<std::ptrdiff_t>(cf.y.size());
      cf.y.push_back({a * d, 0.0});
    }
  } else {
    const double lim = (ym / d) * (ym / d) + 1e-9;
    for (long a = -K; a <= K; ++a)
      for (long b = -K; b <= K; ++b)
        if (static_cast<double>(a * a + b * b) <= lim) {
          lookup[key(a, b)] = static_cast<std::ptrdiff_t>(cf.y.size());
          cf.y.push_back({a * d, b * d});
        }
  }
  auto find = [&](long a, long b) -> std::ptrdiff_t {
    if (a < -K || a > K || b < -K || b > K) return -1;
    if (dim == 2 && b != 0) return -1;
    return lookup[key(a, b)];
  };

  const FieldInterpolator interp(h.h());
  const std::size_t m = cf.y.size();
  cf.v.resize(m);
  cf.interior.assign(m, 0);
  cf.nb.resize(m);
  cf.Dv.assign(m, {kNaN, kNaN});
  cf.Dh.assign(m, Vec3::Constant(kNaN));
  cf.det_D2v.assign(m, kNaN);
  for (std::size_t k = 0; k < m; ++k) {
    const auto& y = cf.y[k];
    cf.v[k] = std::sqrt(1.0 + y[0] * y[0] + y[1] * y[1]) * interp(chart_projection(spec, y, dim));
    const long a = std::lround(y[0] / d), b = std::lround(y[1] / d);
    auto& nb = cf.nb[k];
    nb = {find(a - 1, b), find(a + 1, b), find(a, b - 1), find(a, b + 1),
          find(a - 1, b - 1), find(a + 1, b + 1), find(a - 1, b + 1), find(a + 1, b - 1)};
    const int needed = dim == 2 ? 2 : 8;
    bool in = true;
    for (int q = 0; q < needed; ++q) in = in && nb[static_cast<std::size_t>(q)] >= 0;
    cf.interior[k] = in;
  }

  const auto basis = spec.basis(dim);
  for (std::size_t k = 0; k < m; ++k) {
    if (!cf.interior[k]) continue;
    const auto& nb = cf.nb[k];
    auto V = [&](int q) { return cf.v[static_cast<std::size_t>(nb[static_cast<std::size_t>(q)])]; };
    const double v0 = cf.v[k];
    std::array<double, 2> dv{(V(1) - V(0)) / (2.0 * d), 0.0};
    const double v11 = (V(1) - 2.0 * v0 + V(0)) / (d * d);
    if (dim == 2) {
      cf.det_D2v[k] = v11;
    } else {
      dv[1] = (V(3) - V(2)) / (2.0 * d);
      const double v22 = (V(3) - 2.0 * v0 + V(2)) / (d * d);
      const double v12 = (V(5) + V(4) - V(6) - V(7)) / (4.0 * d * d);
      cf.det_D2v[k] = v11 * v22 - v12 * v12;
    }
    cf.Dv[k] = dv;
    const auto& y = cf.y[k];
    const Vec3 Dv_amb = dv[0] * basis[0] + dv[1] * basis[1];
    cf.Dh[k] = Dv_amb + (v0 - dv[0] * y[0] - dv[1] * y[1]) * spec.pole;
  }
  return cf;
}

ChartResidual chart_residual_field(const SupportField& h, const MeasureSpec& mu, const ChartSpec& spec) {
  const int dim = h.grid().dim();
  ChartResidual out{0.0, {}, lift_to_chart(h, spec)};
  const ChartField& cf = out.field;
  const FieldInterpolator dens(mu.density());
  const double c = gauss_norm(dim);
  out.pointwise.assign(cf.y.size(), kNaN);
  for (std::size_t k = 0; k < cf.y.size(); ++k) {
    if (!cf.interior[k]) continue;
    const auto& y = cf.y[k];
    const double w = 1.0 + y[0] * y[0] + y[1] * y[1];
    // 1/f = density
    const double rhs = c * std::exp(0.5 * cf.Dh[k].squaredNorm()) * dens(chart_projection(spec, y, dim)) /
                       std::pow(w, 0.5 * (dim + 1));
    const double r = std::abs(cf.det_D2v[k] - rhs) / rhs;
    out.pointwise[k] = r;
    out.sup = std::max(out.sup, r);
  }
  return out;
}

double chart_residual(const SupportField& h, const MeasureSpec& mu, const ChartSpec& spec) {
  return chart_residual_field(h, mu, spec).sup;
}

ChartStudy chart_refinement(const SupportField& h, const MeasureSpec& mu, const ChartSpec& base, int levels) {
  if (levels < 2) throw Error(ErrorCode::InvalidArgument, "chart refinement needs at least two levels");
  ChartStudy s;
  ChartSpec spec = base;
  for (int l = 0; l < levels; ++l) {
    s.spacings.push_back(spec.spacing);
    s.residuals.push_back(chart_residual(h, mu, spec));
    if (l > 0) s.orders.push_back(std::log2(s.residuals[l - 1] / s.residuals[l]));
    spec.spacing *= 0.5;
  }
  s.order = s.orders.back();
  return s;
}

std::vector<Vec3> sample_poles(int dim, int count) {
  if (count < 1) throw Error(ErrorCode::InvalidArgument, "pole count must be positive");
  std::vector<Vec3> out;
  const double golden = kPi * (3.0 - std::sqrt(5.0));
  for (int k = 0; k < count; ++k) {
    if (dim == 2) {
      const double a = 2.0 * kPi * (k + 0.125) / count;
      out.emplace_back(std::cos(a), std::sin(a), 0.0);
    } else {
      const double z = 1.0 - (2.0 * k + 1.0) / count;
      const double r = std::sqrt(1.0 - z * z);
      out.emplace_back(r * std::cos(golden * k), r * std::sin(golden * k), z);
    }
  }
  return out;
}

JacobianCheck jacobian_check(const ChartSpec& spec, int dim, const std::function<double(const Vec3&)>& g) {
  spec.validate(dim);
  const double ym = spec.y_max();
  const double amax = std::acos(spec.tau1);
  const auto b = spec.basis(dim);
  JacobianCheck r;
  if (dim == 2) {
    r.chart_integral = gk(
        [&](double y) { return g(chart_projection(spec, {y, 0.0}, 2)) / (1.0 + y * y); }, -ym, ym);
    r.cap_integral = gk([&](double a) { return g(std::cos(a) * spec.pole + std::sin(a) * b[0]); }, -amax, amax);
  } else {
    r.chart_integral = gk(
        [&](double rad) {
          const double w = std::pow(1.0 + rad * rad, -1.5);
          return rad * w * gk([&](double phi) {
            return g(chart_projection(spec, {rad * std::cos(phi), rad * std::sin(phi)}, 3));
          }, 0.0, 2.0 * kPi);
        },
        0.0, ym);
    r.cap_integral = gk(
        [&](double a) {
          return std::sin(a) * gk([&](double phi) {
            const Vec3 t = std::cos(phi) * b[0] + std::sin(phi) * b[1];
            return g(std::cos(a) * spec.pole + std::sin(a) * t);
          }, 0.0, 2.0 * kPi);
        },
        0.0, amax);
  }
  const double scale = std::max(std::abs(r.chart_integral), std::abs(r.cap_integral));
  r.discrepancy = std::abs(r.chart_integral - r.cap_integral) / (scale > 1e-12 ? scale : 1.0);
  return r;
}

}  // namespace gmink
