#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "gmink/body.hpp"
#include "gmink/gaussmeas.hpp"

namespace gmink {

enum class SolveStatus {
  Converged,
  NoConvergence,
  StepCollapse,
  BoundViolation,
  MassTooLarge,
  HomotopyFailure,
};

const char* to_string(SolveStatus status);

struct FlowHistoryRow {
  double t = 0.0;
  double F = 0.0;
  double gamma = 0.0;
  double residual = 0.0;
  double min_h = 0.0;
  double max_h = 0.0;
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  double tau = 0.0;
};

struct SolveReport {
  std::string solver;  // "flow" or "newton"
  SolveStatus status = SolveStatus::NoConvergence;
  std::string message;
  std::size_t iterations = 0;
  std::size_t homotopy_steps = 0;
  double residual = std::numeric_limits<double>::quiet_NaN();
  // sup |surface_density - target| / sup target, computed by gaussmeas
  double verification_residual = std::numeric_limits<double>::quiet_NaN();
  double gamma = std::numeric_limits<double>::quiet_NaN();
  std::optional<double> tau;
  std::optional<GaussDiagnostics> bounds;
  std::optional<SupportField> body;
  std::string body_csv_path;

  // flow monitors
  double t_final = 0.0;
  std::optional<double> F_drift;
  std::optional<double> max_gamma_decrease;
  std::size_t gamma_decrease_steps = 0;
  std::vector<FlowHistoryRow> history;

  std::vector<std::string> notes;

  bool ok() const { return status == SolveStatus::Converged; }
};

// Deterministic JSON (sorted keys, no timestamps). History is not embedded.
std::string report_json(const SolveReport& report);

}  // namespace gmink
