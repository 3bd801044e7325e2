#include "gmink/interp.hpp"

#include <algorithm>
#include <cmath>
#include <math.h>  // boost pchip calls unqualified isnan
#include <numbers>

#include <boost/math/interpolators/pchip.hpp>

#include "gmink/error.hpp"

namespace gmink {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

TrigInterpolant::TrigInterpolant(std::span<const double> samples) {
  const std::size_t n = samples.size();
  if (n < 4 || n % 2 != 0)
    throw Error(ErrorCode::InvalidArgument, "trigonometric interpolation needs an even sample count");
  std::vector<double> ct(n), st(n);
  for (std::size_t m = 0; m < n; ++m) {
    ct[m] = std::cos(kTwoPi * static_cast<double>(m) / static_cast<double>(n));
    st[m] = std::sin(kTwoPi * static_cast<double>(m) / static_cast<double>(n));
  }
  const std::size_t half = n / 2;
  a_.assign(half + 1, 0.0);
  b_.assign(half, 0.0);
  for (std::size_t k = 0; k <= half; ++k) {
    double sa = 0.0, sb = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t m = (k * i) % n;
      sa += samples[i] * ct[m];
      sb += samples[i] * st[m];
    }
    const double scale = (k == 0 || k == half) ? 1.0 / static_cast<double>(n) : 2.0 / static_cast<double>(n);
    a_[k] = scale * sa;
    if (k < half) b_[k] = scale * sb;
  }
}

std::array<double, 3> TrigInterpolant::eval(double theta) const {
  const std::size_t half = b_.size();
  const double c1 = std::cos(theta), s1 = std::sin(theta);
  double ck = 1.0, sk = 0.0;
  std::array<double, 3> out = {a_[0], 0.0, 0.0};
  for (std::size_t k = 1; k <= half; ++k) {
    // rotate (cos (k-1)t, sin (k-1)t) -> (cos kt, sin kt); renormalise occasionally
    const double cn = ck * c1 - sk * s1;
    const double sn = sk * c1 + ck * s1;
    ck = cn;
    sk = sn;
    if (k % 64 == 0) {
      ck = std::cos(static_cast<double>(k) * theta);
      sk = std::sin(static_cast<double>(k) * theta);
    }
    const double kk = static_cast<double>(k);
    const double bk = k < half ? b_[k] : 0.0;
    out[0] += a_[k] * ck + bk * sk;
    out[1] += kk * (-a_[k] * sk + bk * ck);
    out[2] += -kk * kk * (a_[k] * ck + bk * sk);
  }
  return out;
}

struct PeriodicPchip::Spline {
  boost::math::interpolators::pchip<std::vector<double>> fn;
};

PeriodicPchip::~PeriodicPchip() = default;
PeriodicPchip::PeriodicPchip(PeriodicPchip&&) noexcept = default;
PeriodicPchip& PeriodicPchip::operator=(PeriodicPchip&&) noexcept = default;

PeriodicPchip::PeriodicPchip(std::span<const double> psi, std::span<const double> y) {
  const std::size_t n = psi.size();
  constexpr std::size_t pad = 3;
  if (n < 4 || y.size() != n) throw Error(ErrorCode::InvalidArgument, "pchip needs >= 4 samples");
  std::vector<double> x, v;
  x.reserve(n + 2 * pad);
  v.reserve(n + 2 * pad);
  for (std::size_t k = n - pad; k < n; ++k) {
    x.push_back(psi[k] - kTwoPi);
    v.push_back(y[k]);
  }
  for (std::size_t k = 0; k < n; ++k) {
    x.push_back(psi[k]);
    v.push_back(y[k]);
  }
  for (std::size_t k = 0; k < pad; ++k) {
    x.push_back(psi[k] + kTwoPi);
    v.push_back(y[k]);
  }
  base_ = psi[0];
  spline_ = std::make_unique<Spline>(Spline{{std::move(x), std::move(v)}});
}

double PeriodicPchip::operator()(double theta) const {
  double t = std::fmod(theta - base_, kTwoPi);
  if (t < 0.0) t += kTwoPi;
  return spline_->fn(base_ + t);
}

SphereInterpolator::SphereInterpolator(GridPtr grid, std::span<const double> values)
    : grid_(std::move(grid)), values_(values.begin(), values.end()) {
  if (grid_->dim() != 3) throw Error(ErrorCode::InvalidArgument, "sphere interpolation needs an n=3 grid");
}

double SphereInterpolator::at(long row, long col) const {
  const long L = static_cast<long>(grid_->lat_count());
  const long M = static_cast<long>(grid_->lon_count());
  if (row < 0) {
    row = -row - 1;
    col += M / 2;
  } else if (row >= L) {
    row = 2 * L - 1 - row;
    col += M / 2;
  }
  col = ((col % M) + M) % M;
  return values_[static_cast<std::size_t>(row * M + col)];
}

double SphereInterpolator::operator()(const Vec3& direction) const {
  const Vec3 u = direction.normalized();
  const double th = std::acos(std::clamp(u.z(), -1.0, 1.0));
  double ph = std::atan2(u.y(), u.x()) - grid_->longitude_offset();
  const long L = static_cast<long>(grid_->lat_count());
  const long M = static_cast<long>(grid_->lon_count());
  auto colat = grid_->colatitudes();
  auto row_theta = [&](long r) {
    if (r < 0) return -colat[static_cast<std::size_t>(-r - 1)];
    if (r >= L) return 2.0 * std::numbers::pi - colat[static_cast<std::size_t>(2 * L - 1 - r)];
    return colat[static_cast<std::size_t>(r)];
  };
  // row j with theta_j <= th < theta_{j+1}, j in [-1, L-1]
  long j = -1;
  while (j + 1 < L && row_theta(j + 1) <= th) ++j;

  const double dphi = kTwoPi / static_cast<double>(M);
  ph = std::fmod(ph, kTwoPi);
  if (ph < 0.0) ph += kTwoPi;
  const long k = static_cast<long>(std::floor(ph / dphi));
  const double s = ph / dphi - static_cast<double>(k);

  std::array<double, 4> wt{}, wp{};
  std::array<double, 4> tn{};
  for (int a = 0; a < 4; ++a) tn[a] = row_theta(j - 1 + a);
  for (int a = 0; a < 4; ++a) {
    double w = 1.0;
    for (int b = 0; b < 4; ++b)
      if (b != a) w *= (th - tn[b]) / (tn[a] - tn[b]);
    wt[a] = w;
  }
  const std::array<double, 4> pn = {-1.0, 0.0, 1.0, 2.0};
  for (int a = 0; a < 4; ++a) {
    double w = 1.0;
    for (int b = 0; b < 4; ++b)
      if (b != a) w *= (s - pn[b]) / (pn[a] - pn[b]);
    wp[a] = w;
  }
  double v = 0.0;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) v += wt[a] * wp[b] * at(j - 1 + a, k - 1 + b);
  return v;
}

FieldInterpolator::FieldInterpolator(const ScalarField& field) : dim_(field.grid().dim()) {
  if (dim_ == 2)
    trig_ = std::make_unique<TrigInterpolant>(field.values());
  else
    sphere_ = std::make_unique<SphereInterpolator>(field.grid_ptr(), field.values());
}

double FieldInterpolator::operator()(const Vec3& direction) const {
  if (dim_ == 2) return (*trig_)(std::atan2(direction.y(), direction.x()));
  return (*sphere_)(direction);
}

}  // namespace gmink
