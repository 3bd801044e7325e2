#include "gmink/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <toml.hpp>

#include "gmink/error.hpp"
#include "gmink/io.hpp"

namespace gmink {

namespace {

[[noreturn]] void bad(const std::string& msg) { throw Error(ErrorCode::InvalidArgument, "config: " + msg); }

void check_keys(const toml::table& t, const std::string& where, const std::set<std::string>& allowed) {
  for (const auto& [k, v] : t) {
    (void)v;
    if (!allowed.count(std::string(k.str())))
      bad("unknown key '" + std::string(k.str()) + "'" + (where.empty() ? "" : " in [" + where + "]"));
  }
}

const toml::table* sub(const toml::table& t, const char* key) {
  const toml::node* n = t.get(key);
  if (!n) return nullptr;
  if (!n->is_table()) bad(std::string("'") + key + "' must be a table");
  return n->as_table();
}

std::optional<double> get_double(const toml::table& t, const char* key) {
  const toml::node* n = t.get(key);
  if (!n) return std::nullopt;
  if (auto v = n->value<double>()) return *v;
  bad(std::string("'") + key + "' must be a number");
}

std::optional<std::int64_t> get_int(const toml::table& t, const char* key) {
  const toml::node* n = t.get(key);
  if (!n) return std::nullopt;
  if (!n->is_integer()) bad(std::string("'") + key + "' must be an integer");
  return n->value<std::int64_t>();
}

std::optional<std::string> get_string(const toml::table& t, const char* key) {
  const toml::node* n = t.get(key);
  if (!n) return std::nullopt;
  if (!n->is_string()) bad(std::string("'") + key + "' must be a string");
  return n->value<std::string>();
}

std::vector<double> get_numbers(const toml::node& n, const std::string& what) {
  if (!n.is_array()) bad("'" + what + "' must be an array of numbers");
  std::vector<double> out;
  for (const auto& e : *n.as_array()) {
    auto v = e.value<double>();
    if (!v) bad("'" + what + "' must be an array of numbers");
    out.push_back(*v);
  }
  return out;
}

template <class T>
void set(std::optional<T> v, T& dst) {
  if (v) dst = *v;
}

void set_size(std::optional<std::int64_t> v, std::size_t& dst, const char* name) {
  if (!v) return;
  if (*v <= 0) bad(std::string("'") + name + "' must be positive");
  dst = static_cast<std::size_t>(*v);
}

}  // namespace

void RunConfig::validate() const {
  if (dim != 2 && dim != 3) bad("dim must be 2 or 3");
  if (resolution < 16) bad("resolution must be at least 16");
  if (dim == 2 && resolution % 2 != 0) bad("n=2 resolution must be even");
  if (solver != "flow" && solver != "newton" && solver != "both") bad("solver must be flow, newton or both");
  flow.validate();
  newton.validate(dim);
  if (!(chart.tau1 > 0.5 && chart.tau1 < 0.95)) bad("chart.tau1 must lie in (0.5, 0.95)");
  if (!(chart.spacing > 0.0)) bad("chart.spacing must be positive");
  if (chart.poles < 1 || chart.refinements < 2) bad("chart needs poles >= 1 and refinements >= 2");
  if (verify.mc_seeds < 1 || verify.perturbations < 1) bad("verify counts must be positive");
  if (density) {
    const auto& d = *density;
    static const std::set<std::string> presets = {"constant", "fourier", "ball_density", "table", "atoms"};
    if (!presets.count(d.preset)) bad("unknown density preset '" + d.preset + "'");
    if (d.smooth_width && !(*d.smooth_width > 0.0)) bad("density.smooth_width must be positive");
    if (d.preset == "atoms" && d.atoms.empty()) bad("atoms preset needs a non-empty 'atoms' array");
    if (d.preset == "table" && d.table.empty()) bad("table preset needs 'table'");
  }
}

RunConfig parse_config(const std::string& text, const std::filesystem::path& base_dir) {
  toml::table root;
  try {
    root = toml::parse(text);
  } catch (const toml::parse_error& e) {
    std::ostringstream m;
    m << "config: TOML parse error: " << e.description() << " at line " << e.source().begin.line;
    throw Error(ErrorCode::InvalidArgument, m.str());
  }
  check_keys(root, "", {"dim", "resolution", "seed", "solver", "out", "history_stride", "density", "body", "flow",
                        "newton", "chart", "verify"});
  RunConfig c;
  if (auto v = get_int(root, "dim")) c.dim = static_cast<int>(*v);
  if (auto v = get_int(root, "resolution")) c.resolution = static_cast<int>(*v);
  if (auto v = get_int(root, "seed")) {
    if (*v < 0) bad("seed must be non-negative");
    c.seed = static_cast<std::uint64_t>(*v);
  }
  set(get_string(root, "solver"), c.solver);
  set_size(get_int(root, "history_stride"), c.history_stride, "history_stride");

  auto resolve = [&](const std::string& p) {
    std::filesystem::path path(p);
    return path.is_absolute() || base_dir.empty() ? path : base_dir / path;
  };
  if (auto p = get_string(root, "out")) c.out = resolve(*p);

  if (const toml::table* t = sub(root, "density")) {
    check_keys(*t, "density", {"preset", "value", "total", "cos", "sin", "radius", "table", "atoms", "smooth_width"});
    DensityConfig d;
    set(get_string(*t, "preset"), d.preset);
    set(get_double(*t, "value"), d.value);
    set(get_double(*t, "total"), d.total);
    set(get_double(*t, "radius"), d.radius);
    if (const toml::node* n = t->get("cos")) d.cos_coefs = get_numbers(*n, "cos");
    if (const toml::node* n = t->get("sin")) d.sin_coefs = get_numbers(*n, "sin");
    if (auto p = get_string(*t, "table")) d.table = resolve(*p);
    if (auto w = get_double(*t, "smooth_width")) d.smooth_width = *w;
    if (const toml::node* n = t->get("atoms")) {
      if (!n->is_array()) bad("'atoms' must be an array of [x, y, (z,) mass] arrays");
      for (const auto& e : *n->as_array()) {
        const auto row = get_numbers(e, "atoms");
        if (row.size() != static_cast<std::size_t>(c.dim + 1)) bad("each atom needs dim coordinates and a mass");
        Vec3 x = Vec3::Zero();
        for (int k = 0; k < c.dim; ++k) x[k] = row[static_cast<std::size_t>(k)];
        if (!(x.norm() > 0.0)) bad("atom direction must be non-zero");
        d.atoms.emplace_back(x.normalized(), row.back());
      }
    }
    c.density = d;
  }
  if (const toml::table* t = sub(root, "body")) {
    check_keys(*t, "body", {"path", "density_scale"});
    BodyConfig b;
    if (auto p = get_string(*t, "path")) b.path = resolve(*p);
    else bad("[body] needs 'path'");
    set(get_double(*t, "density_scale"), b.density_scale);
    c.body = b;
  }
  if (const toml::table* t = sub(root, "flow")) {
    check_keys(*t, "flow", {"dt_init", "dt_control", "t_max", "residual_tol", "drift_tol", "monotonicity_tol",
                            "max_steps", "windows"});
    set(get_double(*t, "dt_init"), c.flow.dt_init);
    set(get_double(*t, "dt_control"), c.flow.dt_control);
    set(get_double(*t, "t_max"), c.flow.t_max);
    set(get_double(*t, "residual_tol"), c.flow.residual_tol);
    set(get_double(*t, "drift_tol"), c.flow.drift_tol);
    set(get_double(*t, "monotonicity_tol"), c.flow.monotonicity_tol);
    set_size(get_int(*t, "max_steps"), c.flow.max_steps, "max_steps");
    if (const toml::table* w = sub(*t, "windows")) {
      check_keys(*w, "flow.windows",
                 {"min_h_lo", "max_h_hi", "grad_hi", "lambda_min_lo", "lambda_max_hi", "tau_lo", "tau_hi"});
      BoundWindows& bw = c.flow.windows;
      bw.min_h_lo = get_double(*w, "min_h_lo");
      bw.max_h_hi = get_double(*w, "max_h_hi");
      bw.grad_hi = get_double(*w, "grad_hi");
      bw.lambda_min_lo = get_double(*w, "lambda_min_lo");
      bw.lambda_max_hi = get_double(*w, "lambda_max_hi");
      bw.tau_lo = get_double(*w, "tau_lo");
      bw.tau_hi = get_double(*w, "tau_hi");
    }
  }
  if (const toml::table* t = sub(root, "newton")) {
    check_keys(*t, "newton", {"c0", "t_steps", "newton_tol", "max_newton", "damping", "min_step"});
    c.newton.c0 = get_double(*t, "c0");
    if (auto v = get_int(*t, "t_steps")) c.newton.t_steps = static_cast<int>(*v);
    set(get_double(*t, "newton_tol"), c.newton.newton_tol);
    if (auto v = get_int(*t, "max_newton")) c.newton.max_newton = static_cast<int>(*v);
    set(get_double(*t, "damping"), c.newton.damping);
    set(get_double(*t, "min_step"), c.newton.min_step);
  }
  if (const toml::table* t = sub(root, "chart")) {
    check_keys(*t, "chart", {"tau1", "spacing", "poles", "refinements"});
    set(get_double(*t, "tau1"), c.chart.tau1);
    set(get_double(*t, "spacing"), c.chart.spacing);
    if (auto v = get_int(*t, "poles")) c.chart.poles = static_cast<int>(*v);
    if (auto v = get_int(*t, "refinements")) c.chart.refinements = static_cast<int>(*v);
  }
  if (const toml::table* t = sub(root, "verify")) {
    check_keys(*t, "verify", {"mc_samples", "mc_seeds", "perturbations"});
    set_size(get_int(*t, "mc_samples"), c.verify.mc_samples, "mc_samples");
    if (auto v = get_int(*t, "mc_seeds")) c.verify.mc_seeds = static_cast<int>(*v);
    if (auto v = get_int(*t, "perturbations")) c.verify.perturbations = static_cast<int>(*v);
  }
  c.validate();
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot read config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.parent_path());
}

MeasureSpec build_measure(const DensityConfig& d, const GridPtr& grid) {
  if (d.preset == "atoms")
    return smooth_measure(grid, d.atoms, d.smooth_width ? *d.smooth_width : 0.3);
  auto raw = [&]() -> ScalarField {
    if (d.preset == "constant") return ScalarField::constant(grid, d.value);
    if (d.preset == "fourier") return MeasureSpec::fourier(grid, d.total, d.cos_coefs, d.sin_coefs).density();
    if (d.preset == "ball_density") return MeasureSpec::ball_density(grid, d.radius).density();
    if (d.preset == "table") return read_density_table(d.table, grid);
    bad("unknown density preset '" + d.preset + "'");
  }();
  if (d.smooth_width) return smooth_measure(raw, *d.smooth_width);
  if (d.preset == "constant") return MeasureSpec::constant(grid, d.value);
  if (d.preset == "fourier") return MeasureSpec::fourier(grid, d.total, d.cos_coefs, d.sin_coefs);
  if (d.preset == "ball_density") return MeasureSpec::ball_density(grid, d.radius);
  return MeasureSpec(std::move(raw), "table(" + d.table.filename().string() + ")");
}

}  // namespace gmink
