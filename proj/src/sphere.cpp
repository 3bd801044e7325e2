#include "gmink/sphere.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <string>

#include <boost/math/special_functions/legendre.hpp>

#include "gmink/error.hpp"

namespace gmink {

namespace {

constexpr double kPi = std::numbers::pi;

std::size_t wrap(long i, std::size_t n) {
  const long m = static_cast<long>(n);
  return static_cast<std::size_t>(((i % m) + m) % m);
}

}  // namespace

// ---------------------------------------------------------------------------
// Stencil

Stencil::Stencil(std::size_t rows) { row_start_.reserve(rows + 1); }

void Stencil::push_row(std::span<const std::size_t> cols, std::span<const double> coefs) {
  cols_.insert(cols_.end(), cols.begin(), cols.end());
  coefs_.insert(coefs_.end(), coefs.begin(), coefs.end());
  row_start_.push_back(cols_.size());
}

std::span<const std::size_t> Stencil::row_cols(std::size_t i) const {
  return {cols_.data() + row_start_[i], row_start_[i + 1] - row_start_[i]};
}

std::span<const double> Stencil::row_coefs(std::size_t i) const {
  return {coefs_.data() + row_start_[i], row_start_[i + 1] - row_start_[i]};
}

double Stencil::apply_row(std::size_t i, std::span<const double> values) const {
  double s = 0.0;
  for (std::size_t k = row_start_[i]; k < row_start_[i + 1]; ++k) s += coefs_[k] * values[cols_[k]];
  return s;
}

std::vector<double> Stencil::apply(std::span<const double> values) const {
  std::vector<double> out(rows());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = apply_row(i, values);
  return out;
}

double Stencil::abs_row_sum(std::size_t i) const {
  double s = 0.0;
  for (std::size_t k = row_start_[i]; k < row_start_[i + 1]; ++k) s += std::abs(coefs_[k]);
  return s;
}

Stencil Stencil::combine(std::size_t rows, const std::vector<Term>& terms) {
  Stencil out(rows);
  std::map<std::size_t, double> acc;
  std::vector<std::size_t> cols;
  std::vector<double> coefs;
  for (std::size_t i = 0; i < rows; ++i) {
    acc.clear();
    for (const auto& t : terms) {
      const double s = t.scale.empty() ? 1.0 : t.scale[i];
      if (s == 0.0) continue;
      auto c = t.op->row_cols(i);
      auto w = t.op->row_coefs(i);
      for (std::size_t k = 0; k < c.size(); ++k) acc[c[k]] += s * w[k];
    }
    cols.clear();
    coefs.clear();
    for (const auto& [c, w] : acc) {
      cols.push_back(c);
      coefs.push_back(w);
    }
    out.push_row(cols, coefs);
  }
  return out;
}

Stencil Stencil::identity(std::size_t rows) {
  Stencil out(rows);
  for (std::size_t i = 0; i < rows; ++i) {
    const std::size_t c = i;
    const double w = 1.0;
    out.push_row({&c, 1}, {&w, 1});
  }
  return out;
}

Stencil Stencil::compose(const Stencil& rhs) const {
  Stencil out(rows());
  std::map<std::size_t, double> acc;
  std::vector<std::size_t> cols;
  std::vector<double> coefs;
  for (std::size_t i = 0; i < rows(); ++i) {
    acc.clear();
    auto c = row_cols(i);
    auto w = row_coefs(i);
    for (std::size_t k = 0; k < c.size(); ++k) {
      auto c2 = rhs.row_cols(c[k]);
      auto w2 = rhs.row_coefs(c[k]);
      for (std::size_t m = 0; m < c2.size(); ++m) acc[c2[m]] += w[k] * w2[m];
    }
    cols.clear();
    coefs.clear();
    for (const auto& [cc, ww] : acc) {
      cols.push_back(cc);
      coefs.push_back(ww);
    }
    out.push_row(cols, coefs);
  }
  return out;
}

// ---------------------------------------------------------------------------
// DirectionGrid

std::shared_ptr<const DirectionGrid> DirectionGrid::make(int dim, int resolution,
                                                         double longitude_offset) {
  if (dim != 2 && dim != 3)
    throw Error(ErrorCode::InvalidArgument, "unsupported dimension " + std::to_string(dim));
  if (resolution < 16)
    throw Error(ErrorCode::InvalidArgument,
                "resolution must be >= 16, got " + std::to_string(resolution));
  if (dim == 2 && resolution % 2 != 0)
    throw Error(ErrorCode::InvalidArgument, "circle node count must be even");
  std::shared_ptr<DirectionGrid> g(new DirectionGrid());
  g->dim_ = dim;
  g->resolution_ = resolution;
  if (dim == 2)
    g->build_circle(resolution);
  else
    g->build_sphere(resolution, longitude_offset);
  return g;
}

GridPtr make_grid(int dim, int resolution) { return DirectionGrid::make(dim, resolution); }

double DirectionGrid::area() const { return dim_ == 2 ? 2.0 * kPi : 4.0 * kPi; }

const Stencil& DirectionGrid::curvature_stencil(int a, int b) const {
  if (a > b) std::swap(a, b);
  if (dim_ == 2) return curv_ops_[0];
  if (a == 0 && b == 0) return curv_ops_[0];
  if (a == 0 && b == 1) return curv_ops_[1];
  return curv_ops_[2];
}

void DirectionGrid::build_circle(int n) {
  const std::size_t N = static_cast<std::size_t>(n);
  const double d = 2.0 * kPi / n;
  lat_count_ = 1;
  lon_count_ = N;
  spacing_ = d;
  nodes_.resize(N);
  frame_.resize(N);
  weights_.assign(N, d);
  angle_.resize(N);
  for (std::size_t i = 0; i < N; ++i) {
    const double t = d * static_cast<double>(i);
    angle_[i] = t;
    nodes_[i] = Vec3(std::cos(t), std::sin(t), 0.0);
    frame_[i] = {Vec3(-std::sin(t), std::cos(t), 0.0), Vec3::Zero()};
  }

  // 4th-order periodic central differences.
  const double c1 = 1.0 / (12.0 * d);
  const double c2 = 1.0 / (12.0 * d * d);
  Stencil d1(N), b(N);
  for (std::size_t i = 0; i < N; ++i) {
    const long li = static_cast<long>(i);
    const std::array<std::size_t, 5> cols = {wrap(li - 2, N), wrap(li - 1, N), i, wrap(li + 1, N),
                                             wrap(li + 2, N)};
    const std::array<double, 5> w1 = {c1, -8.0 * c1, 0.0, 8.0 * c1, -c1};
    const std::array<double, 5> w2 = {-c2, 16.0 * c2, -30.0 * c2 + 1.0, 16.0 * c2, -c2};
    d1.push_row(cols, w1);
    b.push_row(cols, w2);
  }
  grad_ops_ = {std::move(d1)};
  curv_ops_ = {std::move(b)};
}

namespace {

// Finite-difference weights for derivatives 0..2 at x0 (Fornberg 1988).
std::array<std::array<double, 5>, 3> fornberg_weights(const std::array<double, 5>& x, double x0) {
  std::array<std::array<double, 5>, 3> c{};
  c[0][0] = 1.0;
  double c1 = 1.0;
  double c4 = x[0] - x0;
  for (int i = 1; i < 5; ++i) {
    const int mn = std::min(i, 2);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = x[i] - x0;
    for (int j = 0; j < i; ++j) {
      const double c3 = x[i] - x[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k) c[k][i] = c1 * (k * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
        c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
      }
      for (int k = mn; k >= 1; --k) c[k][j] = (c4 * c[k][j] - k * c[k - 1][j]) / c3;
      c[0][j] = c4 * c[0][j] / c3;
    }
    c1 = c2;
  }
  return c;
}

}  // namespace

void DirectionGrid::build_sphere(int lat, double offset) {
  const std::size_t L = static_cast<std::size_t>(lat);
  const std::size_t M = 2 * L;
  const std::size_t N = L * M;
  lat_count_ = L;
  lon_count_ = M;
  longitude_offset_ = offset;

  // Gauss-Legendre nodes in z = cos(colatitude), ordered z descending.
  std::vector<double> z(L), wz(L);
  {
    auto pos = boost::math::legendre_p_zeros<double>(lat);  // nonnegative zeros, ascending
    std::vector<double> all;
    for (double x : pos) {
      all.push_back(x);
      if (x != 0.0) all.push_back(-x);
    }
    std::sort(all.begin(), all.end(), std::greater<>());
    for (std::size_t j = 0; j < L; ++j) {
      z[j] = all[j];
      const double dp = boost::math::legendre_p_prime(lat, z[j]);
      wz[j] = 2.0 / ((1.0 - z[j] * z[j]) * dp * dp);
    }
  }
  colatitudes_.resize(L);
  for (std::size_t j = 0; j < L; ++j) colatitudes_[j] = std::acos(z[j]);

  const double dphi = 2.0 * kPi / static_cast<double>(M);
  nodes_.resize(N);
  frame_.resize(N);
  weights_.resize(N);
  angle_.resize(N);
  longitude_.resize(N);
  std::vector<double> sin_t(N), cot_t(N);
  for (std::size_t j = 0; j < L; ++j) {
    const double th = colatitudes_[j];
    const double st = std::sin(th), ct = std::cos(th);
    for (std::size_t k = 0; k < M; ++k) {
      const std::size_t i = j * M + k;
      const double ph = offset + dphi * static_cast<double>(k);
      const double sp = std::sin(ph), cp = std::cos(ph);
      nodes_[i] = Vec3(st * cp, st * sp, ct);
      frame_[i] = {Vec3(ct * cp, ct * sp, -st), Vec3(-sp, cp, 0.0)};
      weights_[i] = wz[j] * dphi;
      angle_[i] = th;
      longitude_[i] = ph;
      sin_t[i] = st;
      cot_t[i] = ct / st;
    }
  }
  spacing_ = dphi;
  {
    double prev = -colatitudes_[0];
    for (std::size_t j = 0; j <= L; ++j) {
      const double next = j < L ? colatitudes_[j] : 2.0 * kPi - colatitudes_[L - 1];
      spacing_ = std::max(spacing_, next - prev);
      prev = next;
    }
  }

  auto idx = [M](std::size_t j, std::size_t k) { return j * M + k; };
  const std::size_t half = M / 2;

  // Colatitude line through node (j,k) extended across both poles: a
  // neighbour beyond a pole is the mirrored ring at longitude + pi.
  struct Nb {
    std::size_t node;
    double theta;
  };
  auto meridian = [&](long j, std::size_t k) -> Nb {
    const long Ll = static_cast<long>(L);
    if (j < 0) {
      const std::size_t jj = static_cast<std::size_t>(-j - 1);
      return {idx(jj, (k + half) % M), -colatitudes_[jj]};
    }
    if (j >= Ll) {
      const std::size_t jj = static_cast<std::size_t>(2 * Ll - 1 - j);
      return {idx(jj, (k + half) % M), 2.0 * kPi - colatitudes_[jj]};
    }
    return {idx(static_cast<std::size_t>(j), k), colatitudes_[static_cast<std::size_t>(j)]};
  };

  // Five-point stencils; the pole metric terms divide by sin(theta) ~ h, so
  // second-order stencils would lose an order at the pole rings.
  Stencil dth(N), dthth(N), dph(N), dphph(N);
  const std::array<double, 5> uni = {-2.0 * dphi, -dphi, 0.0, dphi, 2.0 * dphi};
  const auto uw = fornberg_weights(uni, 0.0);
  for (std::size_t j = 0; j < L; ++j) {
    for (std::size_t k = 0; k < M; ++k) {
      std::array<std::size_t, 5> c{};
      std::array<double, 5> t{};
      for (int d = -2; d <= 2; ++d) {
        const Nb nb = meridian(static_cast<long>(j) + d, k);
        c[d + 2] = nb.node;
        t[d + 2] = nb.theta;
      }
      const auto w = fornberg_weights(t, colatitudes_[j]);
      dth.push_row(c, w[1]);
      dthth.push_row(c, w[2]);
      std::array<std::size_t, 5> cp{};
      for (int d = -2; d <= 2; ++d) cp[d + 2] = idx(j, (k + M + d) % M);
      dph.push_row(cp, uw[1]);
      dphph.push_row(cp, uw[2]);
    }
  }
  const Stencil dthph = dth.compose(dph);
  const Stencil id = Stencil::identity(N);

  std::vector<double> inv_s(N), inv_s2(N), cot(N), neg_cot_over_s(N);
  for (std::size_t i = 0; i < N; ++i) {
    inv_s[i] = 1.0 / sin_t[i];
    inv_s2[i] = inv_s[i] * inv_s[i];
    cot[i] = cot_t[i];
    neg_cot_over_s[i] = -cot_t[i] * inv_s[i];
  }

  grad_ops_.clear();
  grad_ops_.push_back(dth);
  grad_ops_.push_back(Stencil::combine(N, {{&dph, inv_s}}));
  curv_ops_.clear();
  curv_ops_.push_back(Stencil::combine(N, {{&dthth, {}}, {&id, {}}}));
  curv_ops_.push_back(Stencil::combine(N, {{&dthph, inv_s}, {&dph, neg_cot_over_s}}));
  curv_ops_.push_back(Stencil::combine(N, {{&dphph, inv_s2}, {&dth, cot}, {&id, {}}}));
}

// ---------------------------------------------------------------------------
// Fields

ScalarField::ScalarField(GridPtr grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (!grid_) throw Error(ErrorCode::InvalidArgument, "scalar field without grid");
  if (values_.size() != grid_->size())
    throw Error(ErrorCode::InvalidArgument, "scalar field length " + std::to_string(values_.size()) +
                                                " does not match grid size " +
                                                std::to_string(grid_->size()));
  for (std::size_t i = 0; i < values_.size(); ++i)
    if (!std::isfinite(values_[i]))
      throw Error(ErrorCode::InvalidArgument, "non-finite value at node " + std::to_string(i));
}

ScalarField ScalarField::constant(GridPtr grid, double value) {
  const std::size_t n = grid->size();
  return ScalarField(std::move(grid), std::vector<double>(n, value));
}

double ScalarField::min() const { return values_[argmin()]; }
double ScalarField::max() const { return values_[argmax()]; }

std::size_t ScalarField::argmin() const {
  return static_cast<std::size_t>(std::min_element(values_.begin(), values_.end()) - values_.begin());
}

std::size_t ScalarField::argmax() const {
  return static_cast<std::size_t>(std::max_element(values_.begin(), values_.end()) - values_.begin());
}

Vec3 TangentField::ambient(std::size_t i) const {
  Vec3 v = components[i][0] * grid->tangent(i, 0);
  if (grid->dim() == 3) v += components[i][1] * grid->tangent(i, 1);
  return v;
}

double TangentField::norm2(std::size_t i) const {
  return components[i][0] * components[i][0] + components[i][1] * components[i][1];
}

double HessianField::det(std::size_t i) const {
  const Sym2& b = entries[i];
  if (grid->dim() == 2) return b.b11;
  return b.b11 * b.b22 - b.b12 * b.b12;
}

namespace {

std::pair<double, double> sym_eigs(const Sym2& b) {
  const double m = 0.5 * (b.b11 + b.b22);
  const double d = std::hypot(0.5 * (b.b11 - b.b22), b.b12);
  return {m - d, m + d};
}

}  // namespace

double HessianField::min_eig(std::size_t i) const {
  if (grid->dim() == 2) return entries[i].b11;
  return sym_eigs(entries[i]).first;
}

double HessianField::max_eig(std::size_t i) const {
  if (grid->dim() == 2) return entries[i].b11;
  return sym_eigs(entries[i]).second;
}

double integrate(const DirectionGrid& grid, std::span<const double> values) {
  double sum = 0.0, comp = 0.0;
  auto w = grid.weights();
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double x = w[i] * values[i];
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x))
      comp += (sum - t) + x;
    else
      comp += (x - t) + sum;
    sum = t;
  }
  return sum + comp;
}

double integrate(const ScalarField& field) { return integrate(field.grid(), field.values()); }

TangentField gradient(const ScalarField& field) {
  const DirectionGrid& g = field.grid();
  TangentField out{field.grid_ptr(), std::vector<std::array<double, 2>>(g.size(), {0.0, 0.0})};
  for (int k = 0; k < g.dim() - 1; ++k) {
    const Stencil& op = g.gradient_stencil(k);
    for (std::size_t i = 0; i < g.size(); ++i) out.components[i][k] = op.apply_row(i, field.values());
  }
  return out;
}

HessianField curvature_matrix(const ScalarField& field) {
  const DirectionGrid& g = field.grid();
  HessianField out{field.grid_ptr(), std::vector<Sym2>(g.size())};
  auto v = field.values();
  if (g.dim() == 2) {
    const Stencil& b = g.curvature_stencil(0, 0);
    for (std::size_t i = 0; i < g.size(); ++i) out.entries[i].b11 = b.apply_row(i, v);
    return out;
  }
  const Stencil& b11 = g.curvature_stencil(0, 0);
  const Stencil& b12 = g.curvature_stencil(0, 1);
  const Stencil& b22 = g.curvature_stencil(1, 1);
  for (std::size_t i = 0; i < g.size(); ++i)
    out.entries[i] = {b11.apply_row(i, v), b12.apply_row(i, v), b22.apply_row(i, v)};
  return out;
}

}  // namespace gmink
