#include "gmink/verify.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <nlohmann/json.hpp>

#include "gmink/chart.hpp"
#include "gmink/error.hpp"
#include "gmink/flow.hpp"
#include "gmink/newton.hpp"

namespace gmink {

namespace {

const double kIsoBound = 1.0 / std::sqrt(2.0 * std::numbers::pi);

CheckResult at_most(std::string name, double value, double threshold, std::string detail = {}) {
  const bool ok = std::isfinite(value) && value <= threshold;
  return {std::move(name), ok ? CheckOutcome::Pass : CheckOutcome::Fail, value, threshold, "<=", std::move(detail)};
}

CheckResult at_least(std::string name, double value, double threshold, std::string detail = {}) {
  const bool ok = std::isfinite(value) && value >= threshold;
  return {std::move(name), ok ? CheckOutcome::Pass : CheckOutcome::Fail, value, threshold, ">=", std::move(detail)};
}

CheckResult above(std::string name, double value, double threshold, std::string detail = {}) {
  const bool ok = std::isfinite(value) && value > threshold;
  return {std::move(name), ok ? CheckOutcome::Pass : CheckOutcome::Fail, value, threshold, ">", std::move(detail)};
}

CheckResult skipped(std::string name, std::string why) {
  return {std::move(name), CheckOutcome::Skip, std::nan(""), std::nan(""), "", std::move(why)};
}

CheckResult failed(std::string name, std::string why) {
  return {std::move(name), CheckOutcome::Fail, std::nan(""), std::nan(""), "", std::move(why)};
}

std::string fmt(double x) {
  std::ostringstream s;
  s.precision(6);
  s << x;
  return s.str();
}

}  // namespace

const char* to_string(CheckOutcome o) {
  switch (o) {
    case CheckOutcome::Pass: return "pass";
    case CheckOutcome::Fail: return "fail";
    case CheckOutcome::Skip: return "skip";
  }
  return "?";
}

bool VerifyReport::passed() const { return failures() == 0; }

std::size_t VerifyReport::failures() const {
  return static_cast<std::size_t>(std::count_if(checks.begin(), checks.end(),
                                                [](const CheckResult& c) { return c.outcome == CheckOutcome::Fail; }));
}

VerifyReport run_verify(const RunConfig& cfg) {
  cfg.validate();
  VerifyReport rep;
  rep.dim = cfg.dim;
  rep.resolution = cfg.resolution;
  auto& out = rep.checks;
  const int n = cfg.dim;
  const GridPtr grid = make_grid(n, cfg.resolution);
  const double vol_tol = n == 2 ? 1e-10 : 1e-8;

  // closed forms on balls
  double ball_err = 0.0;
  for (double r : {0.5, initial_radius(n), 2.0, 4.0})
    ball_err = std::max(ball_err, std::abs(gaussian_volume(ball(grid, r)) - ball_gaussian_volume(n, r)));
  out.push_back(at_most("ball_gaussian_volume", ball_err, vol_tol, "r in {0.5, r*, 2, 4}"));
  if (n == 2) {
    const double r = 1.5;
    const ScalarField s = surface_density(ball(grid, r));
    const double exact = r * std::exp(-0.5 * r * r) / (2.0 * std::numbers::pi);
    double err = 0.0;
    for (double v : s.values()) err = std::max(err, std::abs(v - exact));
    out.push_back(at_most("ball_surface_density", err, 1e-10, "r = 1.5"));
  }

  // isoperimetric instance at gamma = 1/2
  const SupportField half_ball = ball(grid, initial_radius(n));
  out.push_back(at_least("isoperimetric_half_ball", total_measure(half_ball), kIsoBound - 1e-9,
                         "total measure of the ball with gamma = 1/2"));

  // measure
  const MeasureSpec mu = build_measure(cfg.density.value_or(DensityConfig{}), grid);
  rep.measure = mu.provenance();

  std::optional<SupportField> solved;
  std::optional<MeasureSpec> solved_target;

  if (cfg.solver == "flow" || cfg.solver == "both") {
    try {
      const SolveReport fr = run_flow(mu, cfg.flow);
      out.push_back({"flow_converged", fr.ok() ? CheckOutcome::Pass : CheckOutcome::Fail, fr.residual,
                     cfg.flow.residual_tol, "<=", std::string("status ") + to_string(fr.status)});
      out.push_back(at_most("flow_F_conservation", fr.F_drift.value_or(std::nan("")), cfg.flow.drift_tol,
                            "max |F(t) - F(0)|"));
      out.push_back(at_most("flow_gamma_monotone", static_cast<double>(fr.gamma_decrease_steps), 0.0,
                            "steps with gamma decrease beyond " + fmt(cfg.flow.monotonicity_tol)));
      out.push_back(at_least("flow_terminal_gamma", fr.gamma, 0.5 - 1e-6));
      out.push_back(at_most("flow_fixed_point", fr.verification_residual, 1e-5,
                            "nodewise relative gap between surface density and tau * density"));
      if (fr.ok() && fr.body && fr.tau) {
        solved = *fr.body;
        solved_target = mu.scaled(*fr.tau);
      }
    } catch (const Error& e) {
      out.push_back(failed("flow_converged", std::string(to_string(e.code())) + ": " + e.what()));
    }
  }

  if (cfg.solver == "newton" || cfg.solver == "both") {
    if (!(mu.total() < kIsoBound - 1e-12)) {
      out.push_back(skipped("newton_solve", "total measure " + fmt(mu.total()) + " is not below 1/sqrt(2 pi)"));
    } else {
      try {
        const SolveReport nr = solve_gaussian_minkowski(mu, cfg.newton);
        out.push_back(at_most("newton_solve", nr.verification_residual, 1e-8,
                              "relative gap between surface density and target"));
        out.push_back(above("newton_gamma", nr.gamma, 0.5));
        if (nr.body) {
          solved = *nr.body;
          solved_target = mu;
          const UniquenessReport u = uniqueness_probe(mu, cfg.newton, cfg.verify.perturbations, cfg.seed);
          std::string detail = std::to_string(u.bodies.size()) + " of " + std::to_string(u.attempted) + " starts solved";
          if (u.bodies.size() < 2) out.push_back(failed("uniqueness", detail));
          else out.push_back(at_most("uniqueness", u.max_pairwise, 1e-6, detail));
        }
      } catch (const Error& e) {
        out.push_back(failed("newton_solve", std::string(to_string(e.code())) + ": " + e.what()));
      }
    }
  }

  const SupportField& body = solved ? *solved : half_ball;
  const std::string body_name = solved ? "solved body" : "ball with gamma = 1/2";

  if (n == 2) {
    out.push_back(at_most("boundary_integral_total", std::abs(total_measure(body) - boundary_measure_oracle(body)),
                          1e-5, body_name));
  } else {
    out.push_back(skipped("boundary_integral_total", "boundary integral oracle is n=2 only"));
  }
  out.push_back(at_most("change_of_variables", change_of_variables_gap(body), 1e-5, body_name));

  {
    const double quad = gaussian_volume(body);
    int covered = 0;
    for (int s = 0; s < cfg.verify.mc_seeds; ++s)
      if (mc_volume_oracle(body, cfg.verify.mc_samples, cfg.seed + static_cast<std::uint64_t>(s)).covers(quad))
        ++covered;
    const int seeds = cfg.verify.mc_seeds;
    const int need = seeds - std::max(1, seeds / 50);
    out.push_back(at_least("monte_carlo_volume", covered, std::max(need, 1),
                           std::to_string(covered) + " of " + std::to_string(seeds) + " 99% intervals cover " +
                               fmt(quad)));
  }

  if (n == 2) {
    ChartSpec base;
    base.tau1 = cfg.chart.tau1;
    base.spacing = cfg.chart.spacing;
    const MeasureSpec& target = solved_target ? *solved_target : mu;
    const MeasureSpec own = solved ? target : MeasureSpec(surface_density(body), "own surface density");
    double worst = 0.0, lo = 1e300, hi = -1e300;
    for (const Vec3& e : sample_poles(n, cfg.chart.poles)) {
      base.pole = e;
      const ChartStudy st = chart_refinement(body, own, base, cfg.chart.refinements);
      worst = std::max(worst, st.residuals.back());
      lo = std::min(lo, st.order);
      hi = std::max(hi, st.order);
    }
    CheckResult c{"chart_refinement_order", lo >= 1.8 && hi <= 2.2 ? CheckOutcome::Pass : CheckOutcome::Fail, lo,
                  1.8, "in [1.8, 2.2]",
                  "orders over " + std::to_string(cfg.chart.poles) + " poles span [" + fmt(lo) + ", " + fmt(hi) +
                      "]; finest residual " + fmt(worst)};
    out.push_back(c);
    base.pole = Vec3(1.0, 0.0, 0.0);
    base.spacing = cfg.chart.spacing;
    out.push_back(above("chart_negative_control", chart_residual(body, own.scaled(1.5), base), 0.1,
                        "target density scaled by 1.5"));
    out.push_back(at_most("chart_jacobian", jacobian_check(base, n).discrepancy, 1e-8, "g = 1"));
  } else {
    out.push_back(skipped("chart_refinement_order", "chart refinement study is run for n=2"));
    ChartSpec base;
    base.tau1 = cfg.chart.tau1;
    out.push_back(at_most("chart_jacobian", jacobian_check(base, n).discrepancy, 1e-8, "g = 1"));
  }
  return rep;
}

std::string verify_json(const VerifyReport& r) {
  nlohmann::ordered_json j;
  auto num = [](double x) -> nlohmann::ordered_json { return std::isfinite(x) ? nlohmann::ordered_json(x) : nlohmann::ordered_json(nullptr); };
  j["dim"] = r.dim;
  j["resolution"] = r.resolution;
  j["measure"] = r.measure;
  j["passed"] = r.passed();
  j["failures"] = r.failures();
  auto checks = nlohmann::ordered_json::array();
  for (const auto& c : r.checks) {
    nlohmann::ordered_json e;
    e["name"] = c.name;
    e["outcome"] = to_string(c.outcome);
    e["value"] = num(c.value);
    e["comparison"] = c.comparison;
    e["threshold"] = num(c.threshold);
    e["detail"] = c.detail;
    checks.push_back(e);
  }
  j["checks"] = checks;
  j["notes"] = r.notes;
  return j.dump(2) + "\n";
}

std::string verify_csv(const VerifyReport& r) {
  std::ostringstream s;
  s.precision(17);
  auto quote = [](const std::string& t) {
    std::string q = "\"";
    for (char ch : t) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
    return q + "\"";
  };
  s << "name,outcome,value,comparison,threshold,detail\n";
  for (const auto& c : r.checks) {
    s << c.name << ',' << to_string(c.outcome) << ',';
    if (std::isfinite(c.value)) s << c.value;
    s << ',' << quote(c.comparison) << ',';
    if (std::isfinite(c.threshold)) s << c.threshold;
    s << ',' << quote(c.detail) << '\n';
  }
  return s.str();
}

}  // namespace gmink
