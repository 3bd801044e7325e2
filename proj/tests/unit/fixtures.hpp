#pragma once

#include <algorithm>
#include <cmath>

#include "gmink/body.hpp"
#include "gmink/gaussmeas.hpp"
#include "gmink/sphere.hpp"

namespace fixtures {

using gmink::GridPtr;
using gmink::ScalarField;
using gmink::Vec3;

inline ScalarField shifted_ball(GridPtr g, double r, const Vec3& v) {
  return ScalarField::sample(std::move(g), [&](const Vec3& x) { return r + x.dot(v); });
}

inline ScalarField ellipse(GridPtr g, double a, double b) {
  return ScalarField::sample(std::move(g), [&](const Vec3& x) {
    return std::sqrt(a * a * x.x() * x.x() + b * b * x.y() * x.y());
  });
}

// Exact radial function of the ellipse x^2/a^2 + y^2/b^2 = 1.
inline double ellipse_radial(double a, double b, const Vec3& u) {
  return 1.0 / std::sqrt(u.x() * u.x() / (a * a) + u.y() * u.y() / (b * b));
}

// rho(u) of the ball of radius r centred at v.
inline double shifted_ball_radial(double r, const Vec3& v, const Vec3& u) {
  const double uv = u.dot(v);
  return uv + std::sqrt(r * r - v.squaredNorm() + uv * uv);
}

inline ScalarField fourier_body(GridPtr g) {
  return ScalarField::sample(std::move(g), [](const Vec3& x) {
    const double th = std::atan2(x.y(), x.x());
    return 1.2 + 0.05 * std::cos(2.0 * th) + 0.03 * std::sin(3.0 * th) + 0.1 * std::cos(th);
  });
}

// density c (1 + 0.3 cos t + 0.2 sin 2t) with total 0.3
inline gmink::MeasureSpec fourier_measure(GridPtr g) {
  const double c[] = {0.3};
  const double s[] = {0.0, 0.2};
  return gmink::MeasureSpec::fourier(std::move(g), 0.3, c, s);
}

// max_i |h(x_i) - h(-x_i)| on an even n=2 grid
inline double asymmetry(const ScalarField& h) {
  const std::size_t n = h.size();
  double m = 0.0;
  for (std::size_t i = 0; i < n; ++i) m = std::max(m, std::abs(h[i] - h[(i + n / 2) % n]));
  return m;
}

}  // namespace fixtures
