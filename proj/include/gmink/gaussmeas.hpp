#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gmink/body.hpp"
#include "gmink/sphere.hpp"

namespace gmink {

// (sqrt(2 pi))^n
double gauss_norm(int dim);
// int_0^rho exp(-r^2/2) r^{n-1} dr
double radial_gaussian_integral(int dim, double rho);
// gamma_n(B_r), closed form
double ball_gaussian_volume(int dim, double r);

/// Target measure d mu = density dx on the grid.
class MeasureSpec {
 public:
  // Checks density >= 0 and strictly positive open-hemisphere mass around
  // every node direction.
  MeasureSpec(ScalarField density, std::string provenance);

  static MeasureSpec constant(GridPtr grid, double value);
  // c (1 + sum_k a_k Re z^k + b_k Im z^k), z = x1 + i x2, c fixed by total.
  // For n=2 this is c (1 + sum a_k cos k theta + b_k sin k theta).
  static MeasureSpec fourier(GridPtr grid, double total, std::span<const double> cos_coefs,
                             std::span<const double> sin_coefs);
  // Surface density of the ball B_r.
  static MeasureSpec ball_density(GridPtr grid, double radius);

  const ScalarField& density() const { return density_; }
  const DirectionGrid& grid() const { return density_.grid(); }
  double total() const { return total_; }
  const std::string& provenance() const { return provenance_; }
  bool strictly_positive() const { return density_.min() > 0.0; }

  MeasureSpec scaled(double factor) const;

 private:
  ScalarField density_;
  double total_;
  std::string provenance_;
};

// mass of {x : <x,u> > 0}
double hemisphere_mass(const ScalarField& density, const Vec3& u);
// min over node directions u of hemisphere_mass
double min_hemisphere_mass(const ScalarField& density);

double gaussian_volume(const RadialField& rho);
double gaussian_volume(const SupportField& body);

// (2 pi)^{-n/2} exp(-(|grad h|^2 + h^2)/2) det(Hess h + h I)
ScalarField surface_density(const SupportField& body);
double total_measure(const SupportField& body);

/// Boundary-curve integral of the Gaussian surface measure over the arcs
/// whose normals fall in `patch` (n=2 only). Uses a 16x dense boundary
/// parametrisation from the trigonometric interpolant of h.
double boundary_measure_oracle(const SupportField& body, std::span<const std::size_t> patch);
double boundary_measure_oracle(const SupportField& body);

struct MonteCarloEstimate {
  double value = 0.0;
  double half_width = 0.0;  // 99% Wilson interval
  double lower = 0.0;
  double upper = 0.0;
  std::size_t samples = 0;
  std::size_t hits = 0;

  bool covers(double x) const { return x >= lower && x <= upper; }
};

MonteCarloEstimate mc_volume_oracle(const SupportField& body, std::size_t samples, std::uint64_t seed);

// |int S h e^{-rho^2/2} dx - int e^{-rho^2/2} rho^n du|, the two sides of
// the boundary change of variables dx/du = rho^n / (h S).
double change_of_variables_gap(const SupportField& body);

double tau(const SupportField& body, const MeasureSpec& mu);
double tau(const SupportField& body, const RadialField& rho, const MeasureSpec& mu);

// (1/|mu|) int h d mu
double functional_F(const SupportField& body, const MeasureSpec& mu);

/// Optional windows on the monitored a-priori quantities.
struct BoundWindows {
  std::optional<double> min_h_lo;
  std::optional<double> max_h_hi;
  std::optional<double> grad_hi;
  std::optional<double> lambda_min_lo;
  std::optional<double> lambda_max_hi;
  std::optional<double> tau_lo;
  std::optional<double> tau_hi;
};

struct GaussDiagnostics {
  double gamma = 0.0;
  double total_measure = 0.0;
  double tau = 0.0;
  double F = 0.0;
  double min_h = 0.0;
  double max_h = 0.0;
  double min_rho = 0.0;
  double max_rho = 0.0;
  double max_grad = 0.0;
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  std::vector<std::string> violations;
};

GaussDiagnostics diagnostics(const SupportField& body, const MeasureSpec& mu,
                             const BoundWindows& windows = {});
GaussDiagnostics diagnostics(const SupportField& body, const RadialField& rho, const MeasureSpec& mu,
                             const BoundWindows& windows = {});
std::vector<std::string> check_windows(const GaussDiagnostics& d, const BoundWindows& w);

}  // namespace gmink
