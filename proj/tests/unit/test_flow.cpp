#include <doctest.h>

#include <cmath>
#include <numbers>

#include "fixtures.hpp"
#include "gmink/error.hpp"
#include "gmink/flow.hpp"
#include "gmink/newton.hpp"

using namespace gmink;
using std::numbers::pi;

namespace {

double sup_diff(const ScalarField& a, const ScalarField& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace

TEST_CASE("initial radius") {
  CHECK(std::abs(initial_radius(2) - std::sqrt(2.0 * std::log(2.0))) < 1e-10);
  const double r3 = initial_radius(3);
  CHECK(std::abs(ball_gaussian_volume(3, r3) - 0.5) <= 1e-12);
  auto est = mc_volume_oracle(ball(make_grid(3, 16), r3), 400000, 11);
  CHECK(est.covers(0.5));
  CHECK_THROWS_AS(initial_radius(4), Error);
}

TEST_CASE("rhs vanishes on balls with constant density") {
  for (int n : {2, 3}) {
    auto g = make_grid(n, n == 2 ? 128 : 16);
    const auto mu = MeasureSpec::constant(g, 0.05);
    for (double s : {0.8, 1.5, 2.5}) {
      const ScalarField rhs = flow_rhs(ball(g, s), mu);
      CHECK(std::max(std::abs(rhs.min()), std::abs(rhs.max())) < 1e-11 * s);
      CHECK(flow_residual(ball(g, s), mu) < 1e-11);
    }
  }
}

TEST_CASE("rhs factorisation and sign") {
  auto g = make_grid(2, 256);
  const auto mu = fixtures::fourier_measure(g);
  const SupportField body = require_convex(fixtures::fourier_body(g));
  const ScalarField rhs = flow_rhs(body, mu);
  // f S e^{-rho^2/2} = (2 pi)^{n/2} * surface density / density
  const ScalarField sd = surface_density(body);
  const double t = tau(body, mu);
  double err = 0.0;
  int sign_mismatch = 0;
  for (std::size_t i = 0; i < g->size(); ++i) {
    const double gap = 2.0 * pi * (sd[i] / mu.density()[i] - t);
    err = std::max(err, std::abs(rhs[i] / body.h()[i] - gap));
    if (std::abs(gap) > 1e-9 && (gap > 0.0) != (rhs[i] > 0.0)) ++sign_mismatch;
  }
  CHECK(err < 1e-10);
  CHECK(sign_mismatch == 0);
}

TEST_CASE("zero density node is rejected with a smoothing hint") {
  auto g = make_grid(2, 64);
  std::vector<double> d(g->size(), 0.04);
  d[5] = 0.0;
  const MeasureSpec mu(ScalarField(g, d), "holey");
  try {
    (void)run_flow(mu, FlowConfig{});
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InvalidArgument);
    CHECK(std::string(e.what()).find("smooth_measure") != std::string::npos);
  }
}

TEST_CASE("flow config validation") {
  FlowConfig c;
  CHECK_NOTHROW(c.validate());
  c.dt_control = 1.5;
  CHECK_THROWS_AS(c.validate(), Error);
  c = FlowConfig{};
  c.residual_tol = 1e-13;
  CHECK_THROWS_AS(c.validate(), Error);
  c = FlowConfig{};
  c.t_max = 0.0;
  CHECK_THROWS_AS(c.validate(), Error);
}

TEST_CASE("stationary ball under stepping") {
  auto g = make_grid(2, 128);
  const auto mu = MeasureSpec::constant(g, 0.04);
  const double r0 = initial_radius(2);
  FlowConfig cfg;
  FlowState s = initial_state(ball(g, r0), mu, cfg);
  const double dt0 = step(s, cfg, mu).dt;
  for (int k = 0; k < 50; ++k) s = step(s, cfg, mu);
  CHECK(sup_diff(s.h.h(), ball(g, r0).h()) < 1e-12);
  CHECK(s.dt == doctest::Approx(dt0).epsilon(1e-12));
  CHECK(s.steps == 50);
}

TEST_CASE("one step is second order locally") {
  auto g = make_grid(2, 64);
  const auto mu = fixtures::fourier_measure(g);
  const SupportField start = require_convex(fixtures::fourier_body(g));
  FlowConfig ref;
  ref.dt_init = 1e-7;
  ref.dt_control = 1.0;
  auto advance = [&](double dt) {
    FlowConfig c;
    c.dt_init = dt;
    c.dt_control = 1.0;
    return step(initial_state(start, mu, c), c, mu);
  };
  auto reference = [&](double t) {
    FlowState s = initial_state(start, mu, ref);
    while (s.t < t - 1e-15) {
      FlowConfig c = ref;
      c.dt_init = std::min(ref.dt_init, t - s.t);
      s = step(s, c, mu);
    }
    return s;
  };
  const FlowState a = advance(1e-4);
  const FlowState b = advance(5e-5);
  REQUIRE(a.dt == doctest::Approx(1e-4));
  REQUIRE(b.dt == doctest::Approx(5e-5));
  const double ea = sup_diff(a.h.h(), reference(a.dt).h.h());
  const double eb = sup_diff(b.h.h(), reference(b.dt).h.h());
  const double order = std::log2(ea / eb);
  MESSAGE("local error order " << order);
  CHECK(order > 1.8);
  CHECK(order < 2.2);
}

TEST_CASE("constant density converges immediately") {
  for (int n : {2, 3}) {
    auto g = make_grid(n, n == 2 ? 128 : 16);
    const double c0 = 0.04;
    const SolveReport r = run_flow(MeasureSpec::constant(g, c0), FlowConfig{});
    CHECK(r.status == SolveStatus::Converged);
    CHECK(r.iterations == 0);
    const double r0 = initial_radius(n);
    const double expected = std::pow(r0, n - 1) * std::exp(-0.5 * r0 * r0) / (std::pow(2.0 * pi, 0.5 * n) * c0);
    REQUIRE(r.tau.has_value());
    CHECK(*r.tau == doctest::Approx(expected).epsilon(1e-10));
  }
}

TEST_CASE("fourier fixture: fixed point and agreement with newton") {
  auto g = make_grid(2, 256);
  const auto mu = fixtures::fourier_measure(g);
  FlowConfig cfg;
  cfg.residual_tol = 1e-7;
  const SolveReport r = run_flow(mu, cfg);
  REQUIRE(r.status == SolveStatus::Converged);
  CHECK(r.residual <= 1e-7);
  CHECK(*r.F_drift <= 1e-4);
  CHECK(r.gamma_decrease_steps == 0);
  CHECK(r.gamma >= 0.5 - 1e-6);
  // independent nodewise check of S = tau mu
  const ScalarField sd = surface_density(*r.body);
  double rel = 0.0;
  for (std::size_t i = 0; i < g->size(); ++i)
    rel = std::max(rel, std::abs(sd[i] - *r.tau * mu.density()[i]) / (*r.tau * mu.density()[i]));
  CHECK(rel <= 1e-5);
  // Newton on g = tau * density from a dilated start; |tau mu| exceeds the
  // homotopy's mass bound, so the continuation itself does not apply here
  std::vector<double> dilated(r.body->h().values().begin(), r.body->h().values().end());
  for (double& v : dilated) v *= 1.01;
  const NewtonState ns =
      newton_solve(mu.scaled(*r.tau).density(), require_convex(ScalarField(g, dilated)), HomotopyConfig{});
  CHECK(ns.residual <= 1e-10);
  CHECK(sup_diff(ns.h.h(), r.body->h()) <= 1e-6);
}

TEST_CASE("non-convergence and window violations are reported") {
  auto g = make_grid(2, 128);
  const auto mu = fixtures::fourier_measure(g);
  FlowConfig short_run;
  short_run.t_max = 1e-3;
  const SolveReport r = run_flow(mu, short_run);
  CHECK(r.status == SolveStatus::NoConvergence);
  CHECK(r.t_final == doctest::Approx(1e-3));
  CHECK(!r.history.empty());

  FlowConfig windowed;
  windowed.windows.tau_hi = 1e-3;
  const SolveReport w = run_flow(mu, windowed);
  CHECK(w.status == SolveStatus::BoundViolation);
  CHECK(w.message.find("tau") != std::string::npos);
}

TEST_CASE("warm starts must have gamma at least one half") {
  auto g = make_grid(2, 64);
  const auto mu = MeasureSpec::constant(g, 0.04);
  CHECK_THROWS_AS(run_flow(mu, FlowConfig{}, ball(g, 0.8)), Error);
  CHECK(run_flow(mu, FlowConfig{}, ball(g, 2.0)).ok());
}

TEST_CASE("smoothing") {
  auto g = make_grid(2, 256);
  const auto uniform = smooth_measure(ScalarField::constant(g, 0.1), 0.3);
  CHECK(std::abs(uniform.density().max() - 0.1) < 1e-12);
  CHECK(std::abs(uniform.density().min() - 0.1) < 1e-12);

  const std::vector<std::pair<Vec3, double>> atoms = {{Vec3(1, 0, 0), 0.5}, {Vec3(-1, 0, 0), 0.5}};
  const auto two = smooth_measure(g, atoms, 0.3);
  CHECK(two.density().min() > 0.0);
  CHECK(std::abs(two.total() - 1.0) < 1e-12);

  try {
    (void)smooth_measure(g, {{Vec3(0, 1, 0), 1.0}}, 0.3);
    FAIL("expected a hemisphere violation");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::HemisphereViolation);
  }

  auto g3 = make_grid(3, 16);
  const auto four = smooth_measure(g3, {{Vec3(1, 0, 0), 1.0}, {Vec3(-1, 0, 0), 1.0}, {Vec3(0, 0, 1), 1.0},
                                        {Vec3(0, 1, -1).normalized(), 1.0}, {Vec3(0, -1, -1).normalized(), 1.0}},
                                   0.4);
  CHECK(std::abs(four.total() - 5.0) < 1e-12);
}
