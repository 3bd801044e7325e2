#include "gmink/newton.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include <Eigen/Dense>
#include <Eigen/SparseLU>
#include <boost/math/tools/roots.hpp>

#include "gmink/error.hpp"

namespace gmink {

namespace {

using SpMat = Eigen::SparseMatrix<double, Eigen::RowMajor>;

double constant_density(double s, int dim) {
  return std::pow(s, dim - 1) * std::exp(-0.5 * s * s) / gauss_norm(dim);
}

double sup_norm(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

// sup of the (2 pi)^{n/2} e^{rho^2/2} g term, the residual scale
double residual_scale(const ScalarField& h, const ScalarField& g) {
  const TangentField grad = gradient(h);
  const double c = gauss_norm(h.grid().dim());
  double m = 0.0;
  for (std::size_t i = 0; i < h.size(); ++i)
    m = std::max(m, c * std::exp(0.5 * (grad.norm2(i) + h[i] * h[i])) * g[i]);
  return m;
}

Eigen::VectorXd solve_linear(const SpMat& J, const Eigen::VectorXd& rhs, int dim) {
  const Eigen::Index n = J.rows();
  if (dim == 2 && n <= 1024) {
    const Eigen::MatrixXd dense = Eigen::MatrixXd(J);
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(dense);
    Eigen::VectorXd x = lu.solve(rhs);
    if (!x.allFinite()) throw Error(ErrorCode::NewtonStall, "singular linearization");
    return x;
  }
  Eigen::SparseMatrix<double> A = J;
  A.makeCompressed();
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.analyzePattern(A);
  lu.factorize(A);
  if (lu.info() != Eigen::Success) throw Error(ErrorCode::NewtonStall, "singular linearization");
  Eigen::VectorXd x = lu.solve(rhs);
  if (!x.allFinite()) throw Error(ErrorCode::NewtonStall, "singular linearization");
  return x;
}

double body_gamma(const SupportField& h) { return gaussian_volume(h); }

ScalarField blend(double c0, const ScalarField& g, double t) {
  std::vector<double> v(g.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = (1.0 - t) * c0 + t * g[i];
  return ScalarField(g.grid_ptr(), std::move(v));
}

// Smallest |eigenvalue| of L_{s} relative to s^2 over low spherical harmonics:
// L_s Y_l = s^{n-2} ((n-1) - l(l+n-2) - s^2) Y_l.
double resonance_gap(double s, int dim) {
  double gap = std::numeric_limits<double>::infinity();
  for (int l = 0; l <= 64; ++l) gap = std::min(gap, std::abs((dim - 1) - l * (l + dim - 2.0) - s * s));
  return gap / (s * s);
}

struct PathResult {
  SupportField h;
  std::size_t steps = 0;
  std::size_t iterations = 0;
  double residual = 0.0;
};

// Continuation from a body that (approximately) solves the t = 0 problem.
PathResult continue_path(const ScalarField& g, double c0, SupportField start, const HomotopyConfig& cfg) {
  PathResult out{std::move(start), 0, 0, 0.0};
  double t = 0.0;
  double dt = 1.0 / cfg.t_steps;
  while (t < 1.0) {
    const double tn = std::min(1.0, t + dt);
    try {
      NewtonState st = newton_solve(blend(c0, g, tn), out.h, cfg);
      out.iterations += st.iterations;
      out.residual = st.residual;
      out.h = std::move(st.h);
      ++out.steps;
      t = tn;
      dt = std::min(2.0 * dt, 1.0);
    } catch (const Error& e) {
      const ErrorCode c = e.code();
      if (c != ErrorCode::NewtonStall && c != ErrorCode::LeftBranch && c != ErrorCode::ConvexityLoss) throw;
      dt *= 0.5;
      if (dt < cfg.min_step) {
        std::ostringstream m;
        m << "homotopy failed at t=" << t << " (step below " << cfg.min_step << "): " << e.what();
        throw Error(ErrorCode::HomotopyFailure, m.str());
      }
    }
  }
  return out;
}

ScalarField smooth_perturbation(const GridPtr& grid, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const int dim = grid->dim();
  Vec3 v(u(rng), u(rng), dim == 3 ? u(rng) : 0.0);
  Eigen::Matrix3d q;
  for (int a = 0; a < 3; ++a)
    for (int b = a; b < 3; ++b) q(a, b) = q(b, a) = u(rng);
  if (dim == 2) q.row(2).setZero(), q.col(2).setZero();
  ScalarField p = ScalarField::sample(grid, [&](const Vec3& x) { return v.dot(x) + x.dot(q * x); });
  const double m = std::max(std::abs(p.min()), std::abs(p.max()));
  std::vector<double> vals(p.values().begin(), p.values().end());
  for (double& x : vals) x /= m;
  return ScalarField(grid, std::move(vals));
}

double sup_distance(const SupportField& a, const SupportField& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.h().size(); ++i) m = std::max(m, std::abs(a.h()[i] - b.h()[i]));
  return m;
}

void require_target(const MeasureSpec& mu) {
  if (!mu.strictly_positive())
    throw Error(ErrorCode::InvalidArgument,
                "density vanishes at some node; run smooth_measure before the Newton solver");
  const double limit = 1.0 / std::sqrt(2.0 * std::numbers::pi) - 1e-12;
  if (!(mu.total() < limit)) {
    std::ostringstream m;
    m << "mass too large: |mu| = " << mu.total() << " must be below 1/sqrt(2 pi) = " << limit + 1e-12;
    throw Error(ErrorCode::MassTooLarge, m.str());
  }
}

}  // namespace

void HomotopyConfig::validate(int dim) const {
  const double area = dim == 2 ? 2.0 * std::numbers::pi : 4.0 * std::numbers::pi;
  if (c0 && (!(*c0 > 0.0) || !(*c0 * area < 1.0 / std::sqrt(2.0 * std::numbers::pi))))
    throw Error(ErrorCode::InvalidArgument, "c0 must be positive with c0 * Area < 1/sqrt(2 pi)");
  if (t_steps < 1 || !(newton_tol > 0.0) || max_newton < 1 || !(damping > 0.0 && damping < 1.0) ||
      !(min_step > 0.0))
    throw Error(ErrorCode::InvalidArgument,
                "homotopy config needs t_steps >= 1, max_newton >= 1, positive tolerances and damping in (0,1)");
}

double constant_root(double c0, int dim) {
  if (dim != 2 && dim != 3) throw Error(ErrorCode::InvalidArgument, "dimension must be 2 or 3");
  const double lo = std::sqrt(dim - 1.0), hi = 12.0;
  auto f = [&](double s) { return constant_density(s, dim) - c0; };
  if (!(c0 > 0.0) || f(lo) < 0.0 || f(hi) > 0.0) {
    std::ostringstream m;
    m << "no admissible constant solution for c0=" << c0 << " (outside the decreasing branch)";
    throw Error(ErrorCode::NoAdmissibleConstant, m.str());
  }
  boost::uintmax_t iters = 200;
  const auto [a, b] = boost::math::tools::bisect(f, lo, hi, boost::math::tools::eps_tolerance<double>(52), iters);
  const double s = 0.5 * (a + b);
  const double gamma = ball_gaussian_volume(dim, s);
  if (!(gamma > 0.5)) {
    std::ostringstream m;
    m << "no admissible constant solution for c0=" << c0 << ": root s0=" << s << " has gamma " << gamma
      << " <= 1/2";
    throw Error(ErrorCode::NoAdmissibleConstant, m.str());
  }
  return s;
}

std::vector<double> newton_operator(const ScalarField& h, const ScalarField& g) {
  const TangentField grad = gradient(h);
  const HessianField b = curvature_matrix(h);
  const double c = gauss_norm(h.grid().dim());
  std::vector<double> out(h.size());
  for (std::size_t i = 0; i < h.size(); ++i)
    out[i] = b.det(i) - c * std::exp(0.5 * (grad.norm2(i) + h[i] * h[i])) * g[i];
  return out;
}

SpMat assemble_linearization(const ScalarField& h, const ScalarField& g) {
  const DirectionGrid& grid = h.grid();
  const std::size_t n = grid.size();
  const int dim = grid.dim();
  const TangentField grad = gradient(h);
  const HessianField b = curvature_matrix(h);
  const double c = gauss_norm(dim);

  std::vector<double> zeroth(n), g0(n), g1(n), c11(n), c12(n), c22(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double E = c * std::exp(0.5 * (grad.norm2(i) + h[i] * h[i])) * g[i];
    zeroth[i] = -E * h[i];
    g0[i] = -E * grad.components[i][0];
    g1[i] = -E * grad.components[i][1];
    if (dim == 3) {
      const Sym2& m = b.entries[i];
      c11[i] = m.b22;  // Cof(b)
      c12[i] = -2.0 * m.b12;
      c22[i] = m.b11;
    }
  }
  const Stencil id = Stencil::identity(n);
  std::vector<Stencil::Term> terms;
  if (dim == 2) {
    terms = {{&grid.curvature_stencil(0, 0), {}}, {&id, zeroth}, {&grid.gradient_stencil(0), g0}};
  } else {
    terms = {{&grid.curvature_stencil(0, 0), c11}, {&grid.curvature_stencil(0, 1), c12},
             {&grid.curvature_stencil(1, 1), c22}, {&id, zeroth},
             {&grid.gradient_stencil(0), g0},      {&grid.gradient_stencil(1), g1}};
  }
  const Stencil J = Stencil::combine(n, terms);

  std::vector<Eigen::Triplet<double>> trip;
  for (std::size_t i = 0; i < n; ++i) {
    const auto cols = J.row_cols(i);
    const auto coefs = J.row_coefs(i);
    for (std::size_t k = 0; k < cols.size(); ++k)
      trip.emplace_back(static_cast<int>(i), static_cast<int>(cols[k]), coefs[k]);
  }
  SpMat A(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  A.setFromTriplets(trip.begin(), trip.end());
  return A;
}

NewtonState newton_solve(const ScalarField& g, const SupportField& h_init, const HomotopyConfig& cfg) {
  if (!h_init.validated()) throw Error(ErrorCode::NotConvex, "newton start must be a validated body");
  if (g.min() <= 0.0) throw Error(ErrorCode::InvalidArgument, "newton target density must be positive");
  const int dim = g.grid().dim();
  NewtonState st{h_init, newton_operator(h_init.h(), g), 0.0, 0, body_gamma(h_init), {}};
  if (!(st.gamma > 0.5)) {
    std::ostringstream m;
    m << "left branch: start has gamma " << st.gamma << " <= 1/2";
    throw Error(ErrorCode::LeftBranch, m.str());
  }
  double raw = sup_norm(st.residual_field);
  st.residual = raw / residual_scale(st.h.h(), g);
  st.history.push_back(st.residual);

  while (st.residual > cfg.newton_tol) {
    if (st.iterations >= static_cast<std::size_t>(cfg.max_newton)) {
      std::ostringstream m;
      m << "newton stall: residual " << st.residual << " after " << st.iterations << " iterations";
      throw Error(ErrorCode::NewtonStall, m.str());
    }
    const SpMat J = assemble_linearization(st.h.h(), g);
    Eigen::VectorXd rhs(static_cast<Eigen::Index>(g.size()));
    for (std::size_t i = 0; i < g.size(); ++i) rhs(static_cast<Eigen::Index>(i)) = -st.residual_field[i];
    const Eigen::VectorXd delta = solve_linear(J, rhs, dim);

    const auto h = st.h.h().values();
    std::vector<double> trial(h.size());
    double alpha = 1.0;
    bool any_convex = false;
    bool accepted = false;
    for (int k = 0; k < 40 && !accepted; ++k, alpha *= cfg.damping) {
      for (std::size_t i = 0; i < h.size(); ++i) trial[i] = h[i] + alpha * delta(static_cast<Eigen::Index>(i));
      ConvexityReport rep = validate_convexity(ScalarField(st.h.grid_ptr(), trial));
      if (!rep.ok) continue;
      any_convex = true;
      std::vector<double> G = newton_operator(rep.body->h(), g);
      const double r = sup_norm(G);
      if (!(r < (1.0 - 1e-4 * alpha) * raw)) continue;
      const double gamma = body_gamma(*rep.body);
      if (!(gamma > 0.5)) {
        std::ostringstream m;
        m << "left branch: iterate " << st.iterations + 1 << " has gamma " << gamma << " <= 1/2";
        throw Error(ErrorCode::LeftBranch, m.str());
      }
      st.h = std::move(*rep.body);
      st.residual_field = std::move(G);
      st.gamma = gamma;
      raw = r;
      accepted = true;
    }
    if (!accepted) {
      if (!any_convex)
        throw Error(ErrorCode::ConvexityLoss, "convexity loss: no damped Newton step keeps the body convex");
      std::ostringstream m;
      m << "newton stall: line search found no decrease at residual " << st.residual;
      throw Error(ErrorCode::NewtonStall, m.str());
    }
    ++st.iterations;
    st.residual = raw / residual_scale(st.h.h(), g);
    st.history.push_back(st.residual);
  }
  return st;
}

SolveReport solve_gaussian_minkowski(const MeasureSpec& mu, const HomotopyConfig& cfg) {
  const int dim = mu.grid().dim();
  cfg.validate(dim);
  require_target(mu);
  const GridPtr& grid = mu.density().grid_ptr();

  SolveReport rep;
  rep.solver = "newton";
  double c0 = cfg.c0 ? *cfg.c0 : mu.total() / grid->area();
  double s0 = constant_root(c0, dim);
  if (resonance_gap(s0, dim) < 1e-3) {
    bool moved = false;
    for (double f : {1.05, 0.95}) {
      try {
        const double s = constant_root(c0 * f, dim);
        if (resonance_gap(s, dim) >= 1e-3) {
          std::ostringstream m;
          m << "linearization at s0=" << s0 << " is near-singular; c0 nudged by factor " << f;
          rep.notes.push_back(m.str());
          c0 *= f;
          s0 = s;
          moved = true;
          break;
        }
      } catch (const Error&) {
      }
    }
    if (!moved) throw Error(ErrorCode::HomotopyFailure, "singular linearization at t=0 and nudging c0 failed");
  }

  // t = 0: the constant solution, confirmed by a Newton solve.
  const ScalarField g0 = ScalarField::constant(grid, c0);
  NewtonState base = newton_solve(g0, ball(grid, s0), cfg);
  PathResult path = continue_path(mu.density(), c0, std::move(base.h), cfg);

  rep.status = SolveStatus::Converged;
  rep.message = "converged";
  rep.iterations = base.iterations + path.iterations;
  rep.homotopy_steps = path.steps;
  rep.residual = path.residual;
  const GaussDiagnostics d = diagnostics(path.h, mu);
  rep.gamma = d.gamma;
  rep.bounds = d;
  const ScalarField dens = surface_density(path.h);
  double err = 0.0;
  for (std::size_t i = 0; i < dens.size(); ++i) err = std::max(err, std::abs(dens[i] - mu.density()[i]));
  rep.verification_residual = err / mu.density().max();
  {
    std::ostringstream m;
    m << "seed c0=" << c0 << " s0=" << s0;
    rep.notes.push_back(m.str());
  }
  rep.body = std::move(path.h);
  return rep;
}

UniquenessReport uniqueness_probe(const MeasureSpec& mu, const HomotopyConfig& cfg, int perturbations,
                                  std::uint64_t seed) {
  const int dim = mu.grid().dim();
  cfg.validate(dim);
  const GridPtr& grid = mu.density().grid_ptr();
  const double c0 = cfg.c0 ? *cfg.c0 : mu.total() / grid->area();
  const double s0 = constant_root(c0, dim);
  std::mt19937_64 rng(seed);
  std::vector<ScalarField> starts;
  for (int k = 0; k < perturbations; ++k) {
    const ScalarField p = smooth_perturbation(grid, rng);
    const double eps = 0.02 * (k + 1);
    std::vector<double> v(p.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = s0 * (1.0 + eps * p[i]);
    starts.emplace_back(grid, std::move(v));
  }
  return uniqueness_probe(mu, cfg, starts);
}

UniquenessReport uniqueness_probe(const MeasureSpec& mu, const HomotopyConfig& cfg,
                                  const std::vector<ScalarField>& starts) {
  const int dim = mu.grid().dim();
  cfg.validate(dim);
  require_target(mu);
  const double c0 = cfg.c0 ? *cfg.c0 : mu.total() / mu.grid().area();
  UniquenessReport rep;
  for (std::size_t k = 0; k < starts.size(); ++k) {
    ++rep.attempted;
    ConvexityReport cv = validate_convexity(starts[k]);
    if (!cv.ok) {
      rep.rejected.push_back("start " + std::to_string(k) + ": " + cv.message);
      continue;
    }
    const double gamma = body_gamma(*cv.body);
    if (!(gamma > 0.5)) {
      std::ostringstream m;
      m << "start " << k << ": gamma " << gamma << " <= 1/2";
      rep.rejected.push_back(m.str());
      continue;
    }
    try {
      PathResult r = continue_path(mu.density(), c0, std::move(*cv.body), cfg);
      rep.bodies.push_back(std::move(r.h));
    } catch (const Error& e) {
      rep.failures.push_back("start " + std::to_string(k) + ": " + e.what());
    }
  }
  for (std::size_t a = 0; a < rep.bodies.size(); ++a)
    for (std::size_t b = a + 1; b < rep.bodies.size(); ++b)
      rep.max_pairwise = std::max(rep.max_pairwise, sup_distance(rep.bodies[a], rep.bodies[b]));
  return rep;
}

}  // namespace gmink
