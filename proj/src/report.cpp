#include "gmink/report.hpp"

#include <cmath>

#include <nlohmann/json.hpp>

namespace gmink {

const char* to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::Converged: return "converged";
    case SolveStatus::NoConvergence: return "no_convergence";
    case SolveStatus::StepCollapse: return "step_collapse";
    case SolveStatus::BoundViolation: return "bound_violation";
    case SolveStatus::MassTooLarge: return "mass_too_large";
    case SolveStatus::HomotopyFailure: return "homotopy_failure";
  }
  return "unknown";
}

namespace {

nlohmann::json number(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

}  // namespace

std::string report_json(const SolveReport& r) {
  nlohmann::json j;
  j["solver"] = r.solver;
  j["status"] = to_string(r.status);
  j["message"] = r.message;
  j["iterations"] = r.iterations;
  j["homotopy_steps"] = r.homotopy_steps;
  j["residual"] = number(r.residual);
  j["verification_residual"] = number(r.verification_residual);
  j["gamma"] = number(r.gamma);
  if (r.tau) j["tau"] = number(*r.tau);
  if (r.bounds) {
    const GaussDiagnostics& d = *r.bounds;
    j["bounds"] = {
        {"gamma", number(d.gamma)},       {"total_measure", number(d.total_measure)},
        {"tau", number(d.tau)},           {"F", number(d.F)},
        {"min_h", number(d.min_h)},       {"max_h", number(d.max_h)},
        {"min_rho", number(d.min_rho)},   {"max_rho", number(d.max_rho)},
        {"max_grad", number(d.max_grad)}, {"lambda_min", number(d.lambda_min)},
        {"lambda_max", number(d.lambda_max)}, {"violations", d.violations},
    };
  }
  j["body_csv_path"] = r.body_csv_path;
  if (r.solver == "flow") {
    j["t_final"] = number(r.t_final);
    if (r.F_drift) j["F_drift"] = number(*r.F_drift);
    if (r.max_gamma_decrease) j["max_gamma_decrease"] = number(*r.max_gamma_decrease);
    j["gamma_decrease_steps"] = r.gamma_decrease_steps;
  }
  j["notes"] = r.notes;
  return j.dump(2) + "\n";
}

}  // namespace gmink
