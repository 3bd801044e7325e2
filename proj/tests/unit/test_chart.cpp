#include <doctest.h>

#include <cmath>
#include <numbers>

#include "fixtures.hpp"
#include "gmink/chart.hpp"
#include "gmink/error.hpp"
#include "gmink/newton.hpp"

using namespace gmink;
using std::numbers::pi;

namespace {

ChartSpec spec_at(const Vec3& pole, double spacing) {
  ChartSpec s;
  s.pole = pole;
  s.spacing = spacing;
  return s;
}

}  // namespace

TEST_CASE("chart spec") {
  ChartSpec s;
  CHECK(s.y_max() == doctest::Approx(0.75));
  CHECK_NOTHROW(s.validate_lift(2));
  s.tau1 = 0.97;
  CHECK_NOTHROW(s.validate(2));
  CHECK_THROWS_AS(s.validate_lift(2), Error);
  s.tau1 = 0.8;
  s.pole = Vec3(0.0, 0.0, 1.0);
  CHECK_THROWS_AS(s.validate(2), Error);
  CHECK_NOTHROW(s.validate(3));
  const auto b = s.basis(3);
  CHECK(std::abs(b[0].dot(s.pole)) < 1e-15);
  CHECK(std::abs(b[1].dot(s.pole)) < 1e-15);
  CHECK(std::abs(b[0].dot(b[1])) < 1e-15);
  for (int n : {2, 3})
    for (const Vec3& e : sample_poles(n, 8)) CHECK(std::abs(e.norm() - 1.0) < 1e-14);
}

TEST_CASE("projection") {
  const ChartSpec s = spec_at(Vec3(0.6, 0.8, 0.0), 1.0 / 64);
  const Vec3 x = chart_projection(s, {0.5, 0.0}, 2);
  CHECK(std::abs(x.norm() - 1.0) < 1e-15);
  CHECK(x.dot(s.pole) == doctest::Approx(1.0 / std::sqrt(1.25)));
}

TEST_CASE("lift of balls and shifted balls") {
  auto g = make_grid(2, 256);
  const double r = 1.3;
  const ChartSpec s = spec_at(Vec3(std::cos(0.4), std::sin(0.4), 0.0), 1.0 / 64);
  const ChartField cf = lift_to_chart(ball(g, r), s);
  double err = 0.0, grad_err = 0.0;
  for (std::size_t k = 0; k < cf.y.size(); ++k) {
    const double y = cf.y[k][0];
    err = std::max(err, std::abs(cf.v[k] - r * std::sqrt(1.0 + y * y)));
    if (cf.interior[k]) grad_err = std::max(grad_err, std::abs(cf.Dh[k].norm() - r));
  }
  CHECK(err < 1e-12);
  CHECK(grad_err < 1e-4);

  const Vec3 v0(0.2, -0.1, 0.0);
  const ChartField sh = lift_to_chart(require_convex(fixtures::shifted_ball(g, 1.0, v0)), s);
  const Vec3 a = s.basis(2)[0];
  for (std::size_t k = 0; k < sh.y.size(); k += 7) {
    const double y = sh.y[k][0];
    CHECK(std::abs(sh.v[k] - (std::sqrt(1.0 + y * y) + (y * a + s.pole).dot(v0))) < 1e-12);
  }
  // chart centre
  const std::size_t mid = sh.y.size() / 2;
  REQUIRE(sh.y[mid][0] == 0.0);
  CHECK(std::abs(sh.v[mid] - (1.0 + s.pole.dot(v0))) < 1e-12);

  auto g3 = make_grid(3, 16);
  const ChartField c3 = lift_to_chart(ball(g3, r), spec_at(Vec3(0.0, 0.6, 0.8), 1.0 / 16));
  double e3 = 0.0;
  for (std::size_t k = 0; k < c3.y.size(); ++k)
    e3 = std::max(e3, std::abs(c3.v[k] - r * std::sqrt(1.0 + c3.y[k][0] * c3.y[k][0] + c3.y[k][1] * c3.y[k][1])));
  CHECK(e3 < 1e-12);
}

TEST_CASE("lift identities") {
  auto g = make_grid(2, 256);
  const SupportField body = require_convex(fixtures::fourier_body(g));
  double euler = 0.0;
  std::vector<double> rho_err;
  for (double d : {1.0 / 32, 1.0 / 64}) {
    const ChartSpec s = spec_at(Vec3(1.0, 0.0, 0.0), d);
    const ChartField cf = lift_to_chart(body, s);
    double worst = 0.0;
    for (std::size_t k = 0; k < cf.y.size(); ++k) {
      if (!cf.interior[k]) continue;
      const Vec3 x = chart_projection(s, cf.y[k], 2);
      const double hx = cf.v[k] / std::sqrt(1.0 + cf.y[k][0] * cf.y[k][0]);
      euler = std::max(euler, std::abs(cf.Dh[k].dot(x) - hx));
      // |Dh|^2 against h^2 + |grad h|^2 at the node with direction x
      const double th = std::atan2(x.y(), x.x());
      const double hh = 1.2 + 0.05 * std::cos(2 * th) + 0.03 * std::sin(3 * th) + 0.1 * std::cos(th);
      const double dh = -0.1 * std::sin(2 * th) + 0.09 * std::cos(3 * th) - 0.1 * std::sin(th);
      worst = std::max(worst, std::abs(cf.Dh[k].squaredNorm() - (hh * hh + dh * dh)));
    }
    rho_err.push_back(worst);
  }
  CHECK(euler < 1e-8);
  const double order = std::log2(rho_err[0] / rho_err[1]);
  MESSAGE("|Dh|^2 order " << order);
  CHECK(order > 1.8);
}

TEST_CASE("ball with its own density: order two, negative control") {
  auto g = make_grid(2, 256);
  const double r = 1.3;
  const auto own = MeasureSpec::ball_density(g, r);
  ChartSpec s = spec_at(Vec3(1.0, 0.0, 0.0), 1.0 / 16);
  const ChartStudy st = chart_refinement(ball(g, r), own, s, 4);
  for (double o : st.orders) {
    CHECK(o > 1.8);
    CHECK(o < 2.2);
  }
  for (double d : {1.0 / 16, 1.0 / 64, 1.0 / 256}) {
    s.spacing = d;
    CHECK(chart_residual(ball(g, r), own.scaled(1.5), s) > 0.1);
  }
  CHECK_THROWS_AS(chart_refinement(ball(g, r), own, s, 1), Error);
}

TEST_CASE("solved fourier body passes the chart test from every pole") {
  auto g = make_grid(2, 256);
  const auto mu = fixtures::fourier_measure(g);
  const SolveReport r = solve_gaussian_minkowski(mu, HomotopyConfig{});
  REQUIRE(r.ok());
  std::vector<double> res;
  for (const Vec3& e : sample_poles(2, 8)) {
    const ChartStudy st = chart_refinement(*r.body, mu, spec_at(e, 1.0 / 32), 3);
    CHECK(st.order > 1.8);
    CHECK(st.order < 2.2);
    res.push_back(st.residuals.back());
  }
  CHECK(*std::max_element(res.begin(), res.end()) <= 5e-3);
  // cross-pole agreement, up to the residual's dependence on local curvature
  CHECK(*std::max_element(res.begin(), res.end()) <= 4.0 * *std::min_element(res.begin(), res.end()));
}

TEST_CASE("chart jacobian") {
  ChartSpec s;
  const JacobianCheck one = jacobian_check(s, 2);
  CHECK(std::abs(one.cap_integral - 2.0 * std::acos(0.8)) < 1e-12);
  CHECK(std::abs(one.chart_integral - 2.0 * std::acos(0.8)) < 1e-8);
  const JacobianCheck lin = jacobian_check(s, 2, [&](const Vec3& x) { return x.dot(s.pole); });
  CHECK(std::abs(lin.chart_integral - 2.0 * 0.6) < 1e-8);  // int cos a over |a| < acos 0.8
  const JacobianCheck sph = jacobian_check(s, 3);
  CHECK(std::abs(sph.chart_integral - 2.0 * pi * (1.0 - 0.8)) < 1e-8);
  s.tau1 = 1.0 - 1e-12;
  const JacobianCheck empty = jacobian_check(s, 2);
  CHECK(empty.chart_integral < 1e-5);
  CHECK(empty.cap_integral < 1e-5);
}
