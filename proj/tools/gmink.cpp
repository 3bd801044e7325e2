// gmink: batch front end for the Gaussian Minkowski solvers.

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <numbers>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "gmink/chart.hpp"
#include "gmink/config.hpp"
#include "gmink/error.hpp"
#include "gmink/flow.hpp"
#include "gmink/io.hpp"
#include "gmink/newton.hpp"
#include "gmink/parallel.hpp"
#include "gmink/report.hpp"
#include "gmink/verify.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace gmink;

namespace {

enum Exit : int {
  kOk = 0,
  kFailed = 1,
  kBadInput = 2,
  kNoConvergence = 3,
  kStepCollapse = 4,
  kMassTooLarge = 5,
  kHomotopyFailure = 6,
};

struct Options {
  fs::path config;
  std::optional<fs::path> out;
  std::optional<std::uint64_t> seed;
  std::optional<int> resolution;
};

const double kIsoBound = 1.0 / std::sqrt(2.0 * std::numbers::pi);

json num(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

RunConfig load(const Options& o) {
  RunConfig cfg = load_config(o.config);
  if (o.out) cfg.out = *o.out;
  if (o.seed) cfg.seed = *o.seed;
  if (o.resolution) cfg.resolution = *o.resolution;
  cfg.validate();
  fs::create_directories(cfg.out);
  return cfg;
}

// Timestamps live here so the reports themselves stay byte-identical.
void write_run_info(const RunConfig& cfg, const std::string& command, const Options& o) {
  json j;
  j["command"] = command;
  j["config"] = fs::absolute(o.config).string();
  j["seed"] = cfg.seed;
  j["resolution"] = cfg.resolution;
  j["threads"] = max_threads();
  j["finished_utc"] = utc_now();
  write_text(cfg.out / "run_info.json", j.dump(2) + "\n");
}

MeasureSpec target_measure(const RunConfig& cfg, const GridPtr& grid, std::vector<std::string>& notes) {
  if (!cfg.density) throw Error(ErrorCode::InvalidArgument, "config: a [density] table is required");
  MeasureSpec mu = build_measure(*cfg.density, grid);
  if (!mu.strictly_positive()) {
    const double w = cfg.density->smooth_width.value_or(0.2);
    mu = smooth_measure(mu.density(), w);
    notes.push_back("density has zeros; smoothed with width " + std::to_string(w));
  }
  return mu;
}

SupportField load_body(const RunConfig& cfg, const GridPtr& grid) {
  if (!cfg.body) throw Error(ErrorCode::InvalidArgument, "config: a [body] table with 'path' is required");
  const ScalarField h = read_field_csv(cfg.body->path, grid);
  ConvexityReport r = validate_convexity(h);
  if (!r.ok) throw Error(ErrorCode::NotConvex, r.message);
  return std::move(*r.body);
}

int cmd_measure(const RunConfig& cfg) {
  const GridPtr grid = make_grid(cfg.dim, cfg.resolution);
  const SupportField body = load_body(cfg, grid);
  write_field_csv(cfg.out / "density.csv", surface_density(body), "density");
  const double gamma = gaussian_volume(body);
  const double total = total_measure(body);
  const bool applicable = std::abs(gamma - 0.5) <= 1e-6;
  json j;
  j["dim"] = cfg.dim;
  j["resolution"] = cfg.resolution;
  j["gamma"] = num(gamma);
  j["total_measure"] = num(total);
  j["isoperimetric_applicable"] = applicable;
  j["isoperimetric_bound"] = kIsoBound;
  j["isoperimetric_ok"] = !applicable || total >= kIsoBound - 1e-9;
  std::vector<std::string> notes;
  if (cfg.density) {
    const MeasureSpec mu = target_measure(cfg, grid, notes);
    const GaussDiagnostics d = diagnostics(body, mu, {});
    j["tau"] = num(d.tau);
    j["F"] = num(d.F);
  }
  const GaussDiagnostics d = diagnostics(body, MeasureSpec::constant(grid, 1.0), {});
  j["min_h"] = num(d.min_h);
  j["max_h"] = num(d.max_h);
  j["max_grad"] = num(d.max_grad);
  j["lambda_min"] = num(d.lambda_min);
  j["lambda_max"] = num(d.lambda_max);
  j["notes"] = notes;
  write_text(cfg.out / "totals.json", j.dump(2) + "\n");
  std::cout << "gamma " << gamma << "  total " << total << "\n";
  return kOk;
}

void write_body(SolveReport& rep, const RunConfig& cfg) {
  if (!rep.body) return;
  write_field_csv(cfg.out / "body.csv", rep.body->h(), "h");
  rep.body_csv_path = "body.csv";
}

int cmd_solve_normalized(const RunConfig& cfg) {
  const GridPtr grid = make_grid(cfg.dim, cfg.resolution);
  std::vector<std::string> notes;
  const MeasureSpec mu = target_measure(cfg, grid, notes);
  SolveReport rep = run_flow(mu, cfg.flow);
  rep.notes.insert(rep.notes.begin(), notes.begin(), notes.end());
  write_body(rep, cfg);
  write_history_csv(cfg.out / "history.csv", rep.history, cfg.history_stride);
  write_text(cfg.out / "report.json", report_json(rep));
  std::cout << "flow " << to_string(rep.status) << "  residual " << rep.residual << "  t " << rep.t_final << "\n";
  switch (rep.status) {
    case SolveStatus::Converged: return kOk;
    case SolveStatus::StepCollapse:
    case SolveStatus::BoundViolation: return kStepCollapse;
    default: return kNoConvergence;
  }
}

int cmd_solve(const RunConfig& cfg) {
  const GridPtr grid = make_grid(cfg.dim, cfg.resolution);
  std::vector<std::string> notes;
  const MeasureSpec mu = target_measure(cfg, grid, notes);
  SolveReport rep;
  int code = kOk;
  try {
    rep = solve_gaussian_minkowski(mu, cfg.newton);
  } catch (const Error& e) {
    rep.solver = "newton";
    rep.message = e.what();
    if (e.code() == ErrorCode::MassTooLarge) {
      rep.status = SolveStatus::MassTooLarge;
      code = kMassTooLarge;
    } else if (e.code() == ErrorCode::InvalidArgument || e.code() == ErrorCode::Io) {
      throw;
    } else {
      rep.status = SolveStatus::HomotopyFailure;
      code = kHomotopyFailure;
    }
  }
  rep.notes.insert(rep.notes.begin(), notes.begin(), notes.end());
  write_body(rep, cfg);
  write_text(cfg.out / "report.json", report_json(rep));
  std::cout << "newton " << to_string(rep.status);
  if (rep.ok()) std::cout << "  verification " << rep.verification_residual << "  gamma " << rep.gamma;
  else std::cout << "  " << rep.message;
  std::cout << "\n";
  return code;
}

int cmd_verify(const RunConfig& cfg) {
  const VerifyReport rep = run_verify(cfg);
  write_text(cfg.out / "verify.json", verify_json(rep));
  write_text(cfg.out / "verify.csv", verify_csv(rep));
  for (const auto& c : rep.checks) std::cout << to_string(c.outcome) << "  " << c.name << "  " << c.detail << "\n";
  return rep.passed() ? kOk : kFailed;
}

int cmd_chart_check(const RunConfig& cfg) {
  const GridPtr grid = make_grid(cfg.dim, cfg.resolution);
  std::vector<std::string> notes;
  std::optional<SupportField> body;
  std::optional<MeasureSpec> target;
  std::string source;
  if (cfg.body) {
    body = load_body(cfg, grid);
    target = cfg.density ? target_measure(cfg, grid, notes) : MeasureSpec(surface_density(*body), "own");
    if (cfg.body->density_scale != 1.0) target = target->scaled(cfg.body->density_scale);
    source = "body file";
  } else {
    const MeasureSpec mu = target_measure(cfg, grid, notes);
    if (cfg.solver == "flow") {
      const SolveReport r = run_flow(mu, cfg.flow);
      if (!r.ok()) throw Error(ErrorCode::NewtonStall, std::string("flow did not converge: ") + to_string(r.status));
      body = *r.body;
      target = mu.scaled(*r.tau);
      source = "flow solution";
    } else {
      const SolveReport r = solve_gaussian_minkowski(mu, cfg.newton);
      body = *r.body;
      target = mu;
      source = "newton solution";
    }
  }
  ChartSpec spec;
  spec.tau1 = cfg.chart.tau1;
  spec.spacing = cfg.chart.spacing;
  json poles = json::array();
  double lo = INFINITY, hi = -INFINITY, worst = 0.0;
  const auto dirs = sample_poles(cfg.dim, cfg.chart.poles);
  for (std::size_t p = 0; p < dirs.size(); ++p) {
    spec.pole = dirs[p];
    const ChartStudy st = chart_refinement(*body, *target, spec, cfg.chart.refinements);
    json e;
    e["pole"] = {dirs[p].x(), dirs[p].y(), dirs[p].z()};
    e["spacings"] = st.spacings;
    e["residuals"] = st.residuals;
    e["orders"] = st.orders;
    poles.push_back(e);
    lo = std::min(lo, st.order);
    hi = std::max(hi, st.order);
    worst = std::max(worst, st.residuals.back());
    if (p == 0) {
      ChartSpec fine = spec;
      fine.spacing = st.spacings.back();
      write_chart_csv(cfg.out / "chart.csv", chart_residual_field(*body, *target, fine));
    }
  }
  json j;
  j["dim"] = cfg.dim;
  j["resolution"] = cfg.resolution;
  j["body_source"] = source;
  j["tau1"] = spec.tau1;
  j["min_order"] = num(lo);
  j["max_order"] = num(hi);
  j["max_finest_residual"] = num(worst);
  j["poles"] = poles;
  j["notes"] = notes;
  write_text(cfg.out / "chart_check.json", j.dump(2) + "\n");
  std::cout << "chart orders [" << lo << ", " << hi << "]  finest residual " << worst << "\n";
  return kOk;
}

int exit_for(const Error& e, const std::string& command) {
  switch (e.code()) {
    case ErrorCode::MassTooLarge: return kMassTooLarge;
    case ErrorCode::NoAdmissibleConstant:
    case ErrorCode::NewtonStall:
    case ErrorCode::LeftBranch:
    case ErrorCode::ConvexityLoss:
    case ErrorCode::HomotopyFailure:
      return command == "solve-normalized" ? kStepCollapse : kHomotopyFailure;
    default: return kBadInput;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gaussian Minkowski problem solvers"};
  app.require_subcommand(1);
  Options opt;
  struct Sub {
    const char* name;
    const char* help;
    int (*run)(const RunConfig&);
  };
  const Sub subs[] = {
      {"measure", "Surface density and totals of a body file", cmd_measure},
      {"solve-normalized", "Normalized solution by the Gauss curvature flow", cmd_solve_normalized},
      {"solve", "Solution by homotopy continuation and Newton", cmd_solve},
      {"verify", "Run the invariant suite and write a pass/fail matrix", cmd_verify},
      {"chart-check", "Chart residuals and their refinement order", cmd_chart_check},
  };
  for (const Sub& s : subs) {
    CLI::App* sc = app.add_subcommand(s.name, s.help);
    sc->add_option("--config", opt.config, "TOML run configuration")->required()->check(CLI::ExistingFile);
    sc->add_option("--out", opt.out, "output directory (overrides config)");
    sc->add_option("--seed", opt.seed, "random seed (overrides config)");
    sc->add_option("--resolution", opt.resolution, "grid resolution (overrides config)");
  }
  CLI11_PARSE(app, argc, argv);

  for (const Sub& s : subs) {
    if (!app.got_subcommand(s.name)) continue;
    try {
      const RunConfig cfg = load(opt);
      const int code = s.run(cfg);
      write_run_info(cfg, s.name, opt);
      return code;
    } catch (const Error& e) {
      std::cerr << "gmink " << s.name << ": " << e.what() << "\n";
      return exit_for(e, s.name);
    } catch (const std::exception& e) {
      std::cerr << "gmink " << s.name << ": " << e.what() << "\n";
      return kBadInput;
    }
  }
  return kBadInput;
}
