#include "gmink/flow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <boost/math/tools/roots.hpp>

#include "gmink/error.hpp"

namespace gmink {

namespace {

struct FlowEval {
  std::vector<double> G;  // dh/dt / h
  GaussDiagnostics diag;
  double residual = 0.0;
  double stiffness = 0.0;  // bound on the largest explicit-Euler eigenvalue
};

void require_positive_density(const MeasureSpec& mu) {
  if (!mu.strictly_positive())
    throw Error(ErrorCode::InvalidArgument,
                "density vanishes at some node so f = 1/density is undefined; run smooth_measure first");
}

FlowEval evaluate(const SupportField& body, const MeasureSpec& mu, const BoundWindows& windows) {
  const DirectionGrid& g = body.grid();
  const std::size_t n = g.size();
  const int dim = g.dim();
  const TangentField grad = gradient(body.h());
  const HessianField b = curvature_matrix(body.h());
  const RadialField rho = support_to_radial(body);

  FlowEval ev;
  GaussDiagnostics& d = ev.diag;
  d.gamma = gaussian_volume(rho);
  d.tau = tau(body, rho, mu);
  d.F = functional_F(body, mu);
  d.min_h = body.h().min();
  d.max_h = body.h().max();
  d.min_rho = rho.rho.min();
  d.max_rho = rho.rho.max();
  d.lambda_min = std::numeric_limits<double>::infinity();
  d.lambda_max = -std::numeric_limits<double>::infinity();

  const double c = gauss_norm(dim);
  const double target = c * d.tau;
  ev.G.resize(n);
  std::vector<double> measure(n);
  double sup = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double h = body.h()[i];
    const double e = std::exp(-0.5 * (h * h + grad.norm2(i)));
    const double f = 1.0 / mu.density()[i];
    const double S = b.det(i);
    ev.G[i] = f * S * e - target;
    sup = std::max(sup, std::abs(ev.G[i]));
    measure[i] = e * S / c;

    // d(dh/dt)/dh through b: f e h Cof(b) : D^2, bounded by Gershgorin.
    double op = 0.0;
    if (dim == 2) {
      op = g.curvature_stencil(0, 0).abs_row_sum(i);
    } else {
      const Sym2& m = b.entries[i];
      op = std::abs(m.b22) * g.curvature_stencil(0, 0).abs_row_sum(i) +
           2.0 * std::abs(m.b12) * g.curvature_stencil(0, 1).abs_row_sum(i) +
           std::abs(m.b11) * g.curvature_stencil(1, 1).abs_row_sum(i);
    }
    ev.stiffness = std::max(ev.stiffness, f * e * h * op);

    d.max_grad = std::max(d.max_grad, std::sqrt(grad.norm2(i)));
    d.lambda_min = std::min(d.lambda_min, b.min_eig(i));
    d.lambda_max = std::max(d.lambda_max, b.max_eig(i));
  }
  d.total_measure = integrate(g, measure);
  d.violations = check_windows(d, windows);
  ev.residual = sup / target;
  return ev;
}

FlowHistoryRow history_row(double t, const FlowEval& ev) {
  const GaussDiagnostics& d = ev.diag;
  return {t, d.F, d.gamma, ev.residual, d.min_h, d.max_h, d.lambda_min, d.lambda_max, d.tau};
}

// Advances state in place; returns the evaluation at the new state.
FlowEval advance(FlowState& s, const FlowEval& cur, const FlowConfig& cfg, const MeasureSpec& mu) {
  double gmax = 0.0;
  for (double v : cur.G) gmax = std::max(gmax, std::abs(v));
  double dt = cfg.dt_init;
  if (gmax > 0.0) dt = std::min(dt, 0.5 / gmax);
  if (cur.stiffness > 0.0) dt = std::min(dt, 2.0 / cur.stiffness);
  dt *= cfg.dt_control;
  dt = std::min(dt, cfg.t_max - s.t);
  if (!(dt > 0.0)) throw Error(ErrorCode::InvalidArgument, "flow is already at t_max");

  const std::span<const double> h = s.h.h().values();
  std::vector<double> next(h.size());
  for (int attempt = 0; attempt <= 20; ++attempt) {
    if (dt < 1e-12) break;
    for (std::size_t i = 0; i < h.size(); ++i) next[i] = h[i] * std::exp(dt * cur.G[i]);
    ConvexityReport r = validate_convexity(ScalarField(s.h.grid_ptr(), next));
    if (r.ok) {
      s.h = std::move(*r.body);
      s.t += dt;
      s.dt = dt;
      ++s.steps;
      FlowEval ev = evaluate(s.h, mu, cfg.windows);
      s.tau = ev.diag.tau;
      s.residual = ev.residual;
      s.diag = ev.diag;
      s.history.push_back(history_row(s.t, ev));
      return ev;
    }
    dt *= 0.5;
  }
  std::ostringstream msg;
  msg << "step collapse at t=" << s.t << ": no time step above 1e-12 keeps the body discretely convex";
  throw Error(ErrorCode::ConvexityLoss, msg.str());
}

}  // namespace

void FlowConfig::validate() const {
  if (!(dt_init > 0.0) || !(dt_control > 0.0) || dt_control > 1.0 || !(t_max > 0.0) ||
      !(residual_tol >= 1e-12) || !(drift_tol > 0.0) || !(monotonicity_tol > 0.0) || max_steps == 0)
    throw Error(ErrorCode::InvalidArgument,
                "flow config needs positive dt_init, t_max, drift_tol, monotonicity_tol, "
                "dt_control in (0,1] and residual_tol >= 1e-12");
}

double initial_radius(int dim) {
  if (dim != 2 && dim != 3) throw Error(ErrorCode::InvalidArgument, "dimension must be 2 or 3");
  auto f = [dim](double r) { return ball_gaussian_volume(dim, r) - 0.5; };
  boost::uintmax_t iters = 200;
  const auto [lo, hi] =
      boost::math::tools::bisect(f, 0.1, 10.0, boost::math::tools::eps_tolerance<double>(52), iters);
  return 0.5 * (lo + hi);
}

ScalarField flow_rhs(const SupportField& h, const MeasureSpec& mu) {
  if (!h.validated()) throw Error(ErrorCode::NotConvex, "flow_rhs needs a validated body");
  require_positive_density(mu);
  FlowEval ev = evaluate(h, mu, {});
  for (std::size_t i = 0; i < ev.G.size(); ++i) ev.G[i] *= h.h()[i];
  return ScalarField(h.grid_ptr(), std::move(ev.G));
}

double flow_residual(const SupportField& h, const MeasureSpec& mu) {
  if (!h.validated()) throw Error(ErrorCode::NotConvex, "flow_residual needs a validated body");
  require_positive_density(mu);
  return evaluate(h, mu, {}).residual;
}

FlowState initial_state(SupportField h, const MeasureSpec& mu, const FlowConfig& cfg) {
  if (!h.validated()) throw Error(ErrorCode::NotConvex, "flow start must be a validated body");
  require_positive_density(mu);
  const FlowEval ev = evaluate(h, mu, cfg.windows);
  FlowState s{0.0, std::move(h), ev.diag.tau, ev.residual, 0.0, 0, ev.diag, {}};
  s.history.push_back(history_row(0.0, ev));
  return s;
}

FlowState step(const FlowState& state, const FlowConfig& cfg, const MeasureSpec& mu) {
  cfg.validate();
  require_positive_density(mu);
  FlowState next = state;
  const FlowEval cur = evaluate(state.h, mu, cfg.windows);
  advance(next, cur, cfg, mu);
  return next;
}

SolveReport run_flow(const MeasureSpec& mu, const FlowConfig& cfg) {
  const int dim = mu.grid().dim();
  return run_flow(mu, cfg, ball(mu.density().grid_ptr(), initial_radius(dim)));
}

SolveReport run_flow(const MeasureSpec& mu, const FlowConfig& cfg, SupportField start) {
  cfg.validate();
  require_positive_density(mu);
  if (&start.grid() != &mu.grid() && start.grid().size() != mu.grid().size())
    throw Error(ErrorCode::InvalidArgument, "start body and measure live on different grids");

  SolveReport rep;
  rep.solver = "flow";
  FlowState s = initial_state(std::move(start), mu, cfg);
  if (s.diag.gamma < 0.5 - 1e-12) {
    std::ostringstream m;
    m << "warm start has gamma " << s.diag.gamma << " < 1/2";
    throw Error(ErrorCode::InvalidArgument, m.str());
  }
  FlowEval ev = evaluate(s.h, mu, cfg.windows);
  const double F0 = ev.diag.F;
  double drift = 0.0, worst_drop = 0.0;
  std::size_t drops = 0;

  try {
    while (true) {
      if (!ev.diag.violations.empty()) {
        rep.status = SolveStatus::BoundViolation;
        std::ostringstream m;
        m << "bound window violated at t=" << s.t << ":";
        for (const auto& v : ev.diag.violations) m << " " << v;
        rep.message = m.str();
        break;
      }
      if (ev.residual <= cfg.residual_tol) {
        rep.status = SolveStatus::Converged;
        rep.message = "converged";
        break;
      }
      if (s.t >= cfg.t_max || s.steps >= cfg.max_steps) {
        rep.status = SolveStatus::NoConvergence;
        std::ostringstream m;
        m << "no convergence within t_max=" << cfg.t_max << " (residual " << ev.residual << ")";
        rep.message = m.str();
        break;
      }
      const double gamma_prev = ev.diag.gamma;
      ev = advance(s, ev, cfg, mu);
      drift = std::max(drift, std::abs(ev.diag.F - F0) / F0);
      const double drop = gamma_prev - ev.diag.gamma;
      worst_drop = std::max(worst_drop, drop);
      if (drop > cfg.monotonicity_tol) ++drops;
    }
  } catch (const Error& e) {
    if (e.code() != ErrorCode::ConvexityLoss) throw;
    rep.status = SolveStatus::StepCollapse;
    rep.message = e.what();
  }

  rep.iterations = s.steps;
  rep.residual = ev.residual;
  rep.gamma = ev.diag.gamma;
  rep.tau = ev.diag.tau;
  rep.bounds = ev.diag;
  rep.t_final = s.t;
  rep.F_drift = drift;
  rep.max_gamma_decrease = worst_drop;
  rep.gamma_decrease_steps = drops;
  if (drift > cfg.drift_tol) {
    std::ostringstream m;
    m << "F drift " << drift << " exceeds drift_tol " << cfg.drift_tol;
    rep.notes.push_back(m.str());
  }
  if (drops > 0) rep.notes.push_back("gamma decreased beyond monotonicity_tol on " + std::to_string(drops) + " steps");

  // Solver-independent check: S_{gamma,K} = tau mu nodewise.
  const ScalarField dens = surface_density(s.h);
  double err = 0.0;
  for (std::size_t i = 0; i < dens.size(); ++i) {
    const double want = ev.diag.tau * mu.density()[i];
    err = std::max(err, std::abs(dens[i] - want) / want);
  }
  rep.verification_residual = err;
  rep.history = std::move(s.history);
  rep.body = std::move(s.h);
  return rep;
}

namespace {

MeasureSpec smooth_sources(const GridPtr& grid, const std::vector<std::pair<Vec3, double>>& sources,
                           double width, const std::string& what) {
  if (!(width > 0.0)) throw Error(ErrorCode::InvalidArgument, "smoothing width must be positive");
  const DirectionGrid& g = *grid;
  const std::size_t n = g.size();
  double total = 0.0;
  for (const auto& [y, m] : sources) {
    if (m < 0.0) throw Error(ErrorCode::InvalidArgument, "negative mass in smoothing input");
    total += m;
  }
  if (!(total > 0.0)) throw Error(ErrorCode::InvalidArgument, "smoothing input has no mass");

  std::vector<double> out(n, 0.0), kern(n);
  const double w2 = width * width;
  for (const auto& [y, m] : sources) {
    if (m == 0.0) continue;
    const Vec3 u = y.normalized();
    for (std::size_t i = 0; i < n; ++i) {
      const double ang = std::acos(std::clamp(g.node(i).dot(u), -1.0, 1.0));
      kern[i] = std::exp(-ang * ang / w2);
    }
    const double norm = integrate(g, kern);
    for (std::size_t i = 0; i < n; ++i) out[i] += m * kern[i] / norm;
  }
  ScalarField dens(grid, std::move(out));
  const double hemi = min_hemisphere_mass(dens);
  if (!(hemi > 1e-8 * total)) {
    std::ostringstream m;
    m << "smoothed measure is concentrated in a closed hemisphere (min open-hemisphere mass " << hemi
      << " of total " << total << ")";
    throw Error(ErrorCode::HemisphereViolation, m.str());
  }
  if (!(dens.min() > 0.0))
    throw Error(ErrorCode::InvalidArgument, "smoothing width too small: density underflows to zero");
  std::ostringstream p;
  p << "smoothed(" << what << ", width=" << width << ")";
  return MeasureSpec(std::move(dens), p.str());
}

}  // namespace

MeasureSpec smooth_measure(const ScalarField& density, double width) {
  const DirectionGrid& g = density.grid();
  std::vector<std::pair<Vec3, double>> src;
  src.reserve(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) src.emplace_back(g.node(i), g.weight(i) * density[i]);
  return smooth_sources(density.grid_ptr(), src, width, "density");
}

MeasureSpec smooth_measure(GridPtr grid, const std::vector<std::pair<Vec3, double>>& atoms, double width) {
  return smooth_sources(grid, atoms, width, std::to_string(atoms.size()) + " atoms");
}

}  // namespace gmink
