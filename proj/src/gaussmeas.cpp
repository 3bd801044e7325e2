#include "gmink/gaussmeas.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>
#include <thread>

#include <boost/math/special_functions/legendre.hpp>

#include "gmink/error.hpp"
#include "gmink/hull.hpp"
#include "gmink/interp.hpp"
#include "gmink/parallel.hpp"

namespace gmink {

namespace {

constexpr double kPi = std::numbers::pi;

struct GaussLegendre16 {
  std::array<double, 16> x{};
  std::array<double, 16> w{};
  GaussLegendre16() {
    auto pos = boost::math::legendre_p_zeros<double>(16);
    std::size_t k = 0;
    for (double z : pos) {
      for (double s : {z, -z}) {
        const double dp = boost::math::legendre_p_prime(16, s);
        x[k] = s;
        w[k] = 2.0 / ((1.0 - s * s) * dp * dp);
        ++k;
      }
    }
  }
};

const GaussLegendre16& gl16() {
  static const GaussLegendre16 rule;
  return rule;
}

std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Uniform in (0,1) as a pure function of (key, counter).
double counter_uniform(std::uint64_t key, std::uint64_t counter) {
  const std::uint64_t z = splitmix64(key ^ (counter * 0xD1B54A32D192ED03ULL));
  return (static_cast<double>(z >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace

double gauss_norm(int dim) { return std::pow(2.0 * kPi, 0.5 * dim); }

double radial_gaussian_integral(int dim, double rho) {
  if (rho <= 0.0) return 0.0;
  if (dim == 2) return -std::expm1(-0.5 * rho * rho);
  if (dim != 3) throw Error(ErrorCode::InvalidArgument, "dimension must be 2 or 3");
  if (rho >= 0.5)
    return std::sqrt(0.5 * kPi) * std::erf(rho / std::sqrt(2.0)) - rho * std::exp(-0.5 * rho * rho);
  // closed form cancels for small rho
  const auto& q = gl16();
  double s = 0.0;
  for (std::size_t k = 0; k < 16; ++k) {
    const double r = 0.5 * rho * (q.x[k] + 1.0);
    s += q.w[k] * r * r * std::exp(-0.5 * r * r);
  }
  return 0.5 * rho * s;
}

double ball_gaussian_volume(int dim, double r) {
  const double area = dim == 2 ? 2.0 * kPi : 4.0 * kPi;
  return area * radial_gaussian_integral(dim, r) / gauss_norm(dim);
}

// ---------------------------------------------------------------------------
// MeasureSpec

double hemisphere_mass(const ScalarField& density, const Vec3& u) {
  const DirectionGrid& g = density.grid();
  double s = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i)
    if (g.node(i).dot(u) > 0.0) s += g.weight(i) * density[i];
  return s;
}

double min_hemisphere_mass(const ScalarField& density) {
  const DirectionGrid& g = density.grid();
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < g.size(); ++i) m = std::min(m, hemisphere_mass(density, g.node(i)));
  return m;
}

MeasureSpec::MeasureSpec(ScalarField density, std::string provenance)
    : density_(std::move(density)), total_(integrate(density_)), provenance_(std::move(provenance)) {
  for (std::size_t i = 0; i < density_.size(); ++i)
    if (density_[i] < 0.0)
      throw Error(ErrorCode::InvalidArgument, "negative density at node " + std::to_string(i));
  const DirectionGrid& g = density_.grid();
  for (std::size_t i = 0; i < g.size(); ++i)
    if (!(hemisphere_mass(density_, g.node(i)) > 0.0))
      throw Error(ErrorCode::HemisphereViolation,
                  "measure has no mass in the open hemisphere around node " + std::to_string(i));
}

MeasureSpec MeasureSpec::constant(GridPtr grid, double value) {
  if (!(value > 0.0)) throw Error(ErrorCode::InvalidArgument, "constant density must be positive");
  std::ostringstream p;
  p << "constant(" << value << ")";
  return MeasureSpec(ScalarField::constant(std::move(grid), value), p.str());
}

MeasureSpec MeasureSpec::fourier(GridPtr grid, double total, std::span<const double> cos_coefs,
                                 std::span<const double> sin_coefs) {
  if (!(total > 0.0)) throw Error(ErrorCode::InvalidArgument, "fourier total must be positive");
  ScalarField base = ScalarField::sample(grid, [&](const Vec3& x) {
    const std::complex<double> z(x.x(), x.y());
    std::complex<double> zk = 1.0;
    double v = 1.0;
    const std::size_t K = std::max(cos_coefs.size(), sin_coefs.size());
    for (std::size_t k = 0; k < K; ++k) {
      zk *= z;
      if (k < cos_coefs.size()) v += cos_coefs[k] * zk.real();
      if (k < sin_coefs.size()) v += sin_coefs[k] * zk.imag();
    }
    return v;
  });
  if (base.min() < 0.0) throw Error(ErrorCode::InvalidArgument, "fourier density is negative somewhere");
  const double c = total / integrate(base);
  std::vector<double> d(base.values().begin(), base.values().end());
  for (double& v : d) v *= c;
  std::ostringstream p;
  p << "fourier(total=" << total << ")";
  return MeasureSpec(ScalarField(std::move(grid), std::move(d)), p.str());
}

MeasureSpec MeasureSpec::ball_density(GridPtr grid, double radius) {
  const int n = grid->dim();
  const double v = std::pow(radius, n - 1) * std::exp(-0.5 * radius * radius) / gauss_norm(n);
  std::ostringstream p;
  p << "ball_density(" << radius << ")";
  return MeasureSpec(ScalarField::constant(std::move(grid), v), p.str());
}

MeasureSpec MeasureSpec::scaled(double factor) const {
  std::vector<double> d(density_.values().begin(), density_.values().end());
  for (double& v : d) v *= factor;
  return MeasureSpec(ScalarField(density_.grid_ptr(), std::move(d)), provenance_);
}

// ---------------------------------------------------------------------------
// Gaussian quantities

double gaussian_volume(const RadialField& rho) {
  const DirectionGrid& g = rho.rho.grid();
  std::vector<double> inner(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) inner[i] = radial_gaussian_integral(g.dim(), rho.rho[i]);
  return integrate(g, inner) / gauss_norm(g.dim());
}

double gaussian_volume(const SupportField& body) { return gaussian_volume(support_to_radial(body)); }

ScalarField surface_density(const SupportField& body) {
  if (!body.validated()) throw Error(ErrorCode::NotConvex, "surface_density needs a validated body");
  const DirectionGrid& g = body.grid();
  const TangentField grad = gradient(body.h());
  const HessianField b = curvature_matrix(body.h());
  const double c = gauss_norm(g.dim());
  std::vector<double> out(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double h = body.h()[i];
    out[i] = std::exp(-0.5 * (grad.norm2(i) + h * h)) * b.det(i) / c;
  }
  return ScalarField(body.grid_ptr(), std::move(out));
}

double total_measure(const SupportField& body) { return integrate(surface_density(body)); }

double boundary_measure_oracle(const SupportField& body, std::span<const std::size_t> patch) {
  const DirectionGrid& g = body.grid();
  if (g.dim() != 2) throw Error(ErrorCode::Unsupported, "boundary measure oracle is n=2 only");
  if (!body.validated()) throw Error(ErrorCode::NotConvex, "boundary oracle needs a validated body");
  const std::size_t n = g.size();
  std::vector<char> in_patch(n, 0);
  for (std::size_t i : patch) in_patch.at(i) = 1;
  const TrigInterpolant h(body.h().values());
  const std::size_t m = 16 * n;
  const double dm = 2.0 * kPi / static_cast<double>(m);
  double sum = 0.0, comp = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    if (!in_patch[((k + 8) / 16) % n]) continue;
    const double th = (static_cast<double>(k) + 0.5) * dm;
    const auto [v, d1, d2] = h.eval(th);
    // X = h x + h' x_perp, X' = (h + h'') x_perp
    const double x2 = v * v + d1 * d1;
    const double term = std::exp(-0.5 * x2) * std::abs(v + d2) * dm;
    const double t = sum + term;
    comp += std::abs(sum) >= std::abs(term) ? (sum - t) + term : (term - t) + sum;
    sum = t;
  }
  return (sum + comp) / (2.0 * kPi);
}

double boundary_measure_oracle(const SupportField& body) {
  std::vector<std::size_t> all(body.grid().size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  return boundary_measure_oracle(body, all);
}

MonteCarloEstimate mc_volume_oracle(const SupportField& body, std::size_t samples, std::uint64_t seed) {
  if (!body.validated()) throw Error(ErrorCode::NotConvex, "Monte Carlo oracle needs a validated body");
  if (samples == 0) throw Error(ErrorCode::InvalidArgument, "need at least one sample");
  const DirectionGrid& g = body.grid();
  const int dim = g.dim();
  const auto h = body.h().values();

  // n=2: the intersection polygon of the half-spaces <y,x_i> <= h_i, whose
  // vertices are the facet poles of conv{x_i / h_i}.
  std::optional<ConvexPolytope> polygon;
  if (dim == 2) {
    std::vector<Vec3> dual;
    for (std::size_t i = 0; i < g.size(); ++i) dual.push_back(g.node(i) / h[i]);
    const ConvexPolytope q = ConvexPolytope::hull(2, dual);
    std::vector<Vec3> verts;
    for (const auto& f : q.facets()) verts.push_back(f.normal / f.offset);
    polygon = ConvexPolytope::hull(2, verts);
  }

  const std::uint64_t key = splitmix64(seed);
  auto inside = [&](const Vec3& y) {
    if (polygon) {
      const double r = y.norm();
      return r == 0.0 || r <= polygon->radial(y / r);
    }
    for (std::size_t i = 0; i < g.size(); ++i)
      if (y.dot(g.node(i)) > h[i]) return false;
    return true;
  };
  auto sample = [&](std::uint64_t s) {
    const std::uint64_t c = 4 * s;
    const double r1 = std::sqrt(-2.0 * std::log(counter_uniform(key, c)));
    const double a1 = 2.0 * kPi * counter_uniform(key, c + 1);
    Vec3 y(r1 * std::cos(a1), r1 * std::sin(a1), 0.0);
    if (dim == 3) {
      const double r2 = std::sqrt(-2.0 * std::log(counter_uniform(key, c + 2)));
      y.z() = r2 * std::cos(2.0 * kPi * counter_uniform(key, c + 3));
    }
    return y;
  };

  constexpr std::size_t kBlock = 1 << 16;
  const std::size_t blocks = (samples + kBlock - 1) / kBlock;
  std::vector<std::size_t> block_hits(blocks, 0);
  auto run_block = [&](std::size_t b) {
    const std::size_t lo = b * kBlock, hi = std::min(samples, lo + kBlock);
    std::size_t c = 0;
    for (std::size_t s = lo; s < hi; ++s) c += inside(sample(s)) ? 1 : 0;
    block_hits[b] = c;
  };
  const std::size_t workers = std::min(max_threads(), blocks);
  if (workers <= 1) {
    for (std::size_t b = 0; b < blocks; ++b) run_block(b);
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w)
      pool.emplace_back([&, w] {
        for (std::size_t b = w; b < blocks; b += workers) run_block(b);
      });
  }

  MonteCarloEstimate est;
  est.samples = samples;
  for (std::size_t c : block_hits) est.hits += c;
  const double M = static_cast<double>(samples);
  const double p = static_cast<double>(est.hits) / M;
  constexpr double z = 2.5758293035489004;  // 99% two-sided
  const double denom = 1.0 + z * z / M;
  const double centre = (p + z * z / (2.0 * M)) / denom;
  const double hw = z * std::sqrt(p * (1.0 - p) / M + z * z / (4.0 * M * M)) / denom;
  est.value = p;
  est.half_width = hw;
  est.lower = centre - hw;
  est.upper = centre + hw;
  return est;
}

double tau(const SupportField& body, const RadialField& rho, const MeasureSpec& mu) {
  const DirectionGrid& g = body.grid();
  const int n = g.dim();
  std::vector<double> num(g.size()), den(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double r = rho.rho[i];
    num[i] = std::exp(-0.5 * r * r) * std::pow(r, n);
    den[i] = body.h()[i] * mu.density()[i];
  }
  const double d = integrate(g, den);
  if (!(d > 0.0)) throw Error(ErrorCode::InvalidArgument, "tau denominator vanishes");
  return integrate(g, num) / (gauss_norm(n) * d);
}

double change_of_variables_gap(const SupportField& body) {
  if (!body.validated()) throw Error(ErrorCode::NotConvex, "change of variables needs a validated body");
  const DirectionGrid& g = body.grid();
  const TangentField grad = gradient(body.h());
  const HessianField b = curvature_matrix(body.h());
  const RadialField rho = support_to_radial(body);
  std::vector<double> lhs(g.size()), rhs(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double h = body.h()[i];
    const double r = rho.rho[i];
    lhs[i] = b.det(i) * h * std::exp(-0.5 * (h * h + grad.norm2(i)));
    rhs[i] = std::exp(-0.5 * r * r) * std::pow(r, g.dim());
  }
  return std::abs(integrate(g, lhs) - integrate(g, rhs));
}

double tau(const SupportField& body, const MeasureSpec& mu) {
  return tau(body, support_to_radial(body), mu);
}

double functional_F(const SupportField& body, const MeasureSpec& mu) {
  if (!(mu.total() > 0.0)) throw Error(ErrorCode::InvalidArgument, "measure has zero total");
  const DirectionGrid& g = body.grid();
  std::vector<double> v(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) v[i] = body.h()[i] * mu.density()[i];
  return integrate(g, v) / mu.total();
}

std::vector<std::string> check_windows(const GaussDiagnostics& d, const BoundWindows& w) {
  std::vector<std::string> out;
  auto below = [&](const char* name, double v, const std::optional<double>& lo) {
    if (lo && v < *lo) out.push_back(std::string(name) + "=" + std::to_string(v) + " below " + std::to_string(*lo));
  };
  auto above = [&](const char* name, double v, const std::optional<double>& hi) {
    if (hi && v > *hi) out.push_back(std::string(name) + "=" + std::to_string(v) + " above " + std::to_string(*hi));
  };
  below("min_h", d.min_h, w.min_h_lo);
  above("max_h", d.max_h, w.max_h_hi);
  above("max_grad", d.max_grad, w.grad_hi);
  below("lambda_min", d.lambda_min, w.lambda_min_lo);
  above("lambda_max", d.lambda_max, w.lambda_max_hi);
  below("tau", d.tau, w.tau_lo);
  above("tau", d.tau, w.tau_hi);
  return out;
}

GaussDiagnostics diagnostics(const SupportField& body, const RadialField& rho, const MeasureSpec& mu,
                             const BoundWindows& windows) {
  if (!body.validated()) throw Error(ErrorCode::NotConvex, "diagnostics need a validated body");
  GaussDiagnostics d;
  const TangentField grad = gradient(body.h());
  const HessianField b = curvature_matrix(body.h());
  d.gamma = gaussian_volume(rho);
  d.total_measure = total_measure(body);
  d.tau = tau(body, rho, mu);
  d.F = functional_F(body, mu);
  d.min_h = body.h().min();
  d.max_h = body.h().max();
  d.min_rho = rho.rho.min();
  d.max_rho = rho.rho.max();
  d.lambda_min = std::numeric_limits<double>::infinity();
  d.lambda_max = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < body.grid().size(); ++i) {
    d.max_grad = std::max(d.max_grad, std::sqrt(grad.norm2(i)));
    d.lambda_min = std::min(d.lambda_min, b.min_eig(i));
    d.lambda_max = std::max(d.lambda_max, b.max_eig(i));
  }
  d.violations = check_windows(d, windows);
  return d;
}

GaussDiagnostics diagnostics(const SupportField& body, const MeasureSpec& mu, const BoundWindows& windows) {
  return diagnostics(body, support_to_radial(body), mu, windows);
}

}  // namespace gmink
