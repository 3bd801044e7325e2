#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "gmink/body.hpp"
#include "gmink/gaussmeas.hpp"
#include "gmink/report.hpp"

namespace gmink {

struct FlowConfig {
  double dt_init = 1e-2;
  double dt_control = 0.9;  // sigma
  double t_max = 20.0;
  double residual_tol = 1e-6;
  double drift_tol = 1e-4;
  double monotonicity_tol = 1e-8;
  std::size_t max_steps = 5'000'000;
  BoundWindows windows;

  void validate() const;
};

struct FlowState {
  double t = 0.0;
  SupportField h;
  double tau = 0.0;
  double residual = 0.0;
  double dt = 0.0;  // last accepted step
  std::size_t steps = 0;
  GaussDiagnostics diag;
  std::vector<FlowHistoryRow> history;
};

// Radius with gamma_n(B_r) = 1/2.
double initial_radius(int dim);

// dh/dt = (f S e^{-rho^2/2} - (2 pi)^{n/2} tau) h with rho^2 = h^2 + |grad h|^2.
ScalarField flow_rhs(const SupportField& h, const MeasureSpec& mu);

// sup |f S e^{-rho^2/2} - (2 pi)^{n/2} tau| / ((2 pi)^{n/2} tau)
double flow_residual(const SupportField& h, const MeasureSpec& mu);

FlowState initial_state(SupportField h, const MeasureSpec& mu, const FlowConfig& cfg);

// One accepted time step. Throws Error(ConvexityLoss) on step collapse.
FlowState step(const FlowState& state, const FlowConfig& cfg, const MeasureSpec& mu);

// Runs from B_{initial_radius} unless a warm start is given. Never throws for
// non-convergence; the report status says what happened.
SolveReport run_flow(const MeasureSpec& mu, const FlowConfig& cfg);
SolveReport run_flow(const MeasureSpec& mu, const FlowConfig& cfg, SupportField start);

// Mass-preserving mollification with kernel exp(-d^2 / width^2), d the
// angular distance. Throws HemisphereViolation when the result fails the
// discrete hemisphere condition at relative level 1e-8.
MeasureSpec smooth_measure(const ScalarField& density, double width);
MeasureSpec smooth_measure(GridPtr grid, const std::vector<std::pair<Vec3, double>>& atoms, double width);

}  // namespace gmink
