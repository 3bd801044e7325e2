#pragma once

#include <array>
#include <functional>
#include <vector>

#include "gmink/body.hpp"
#include "gmink/gaussmeas.hpp"

namespace gmink {

/// Tangent chart y in e-perp over the cap {x : <x,e> > tau1}.
struct ChartSpec {
  Vec3 pole = Vec3(1.0, 0.0, 0.0);
  double tau1 = 0.8;
  double spacing = 1.0 / 128.0;

  double y_max() const;
  // tau1 in (0,1), unit pole, positive spacing
  void validate(int dim) const;
  // additionally tau1 in (0.5, 0.95), as needed by lift and residual
  void validate_lift(int dim) const;
  // orthonormal basis of e-perp (one vector for n=2)
  std::array<Vec3, 2> basis(int dim) const;
};

struct ChartField {
  int dim = 2;
  Vec3 pole;
  double spacing = 0.0;
  std::vector<std::array<double, 2>> y;  // chart coordinates
  std::vector<double> v;                 // sqrt(1+|y|^2) h(pi(y))
  std::vector<char> interior;            // full stencil available
  std::vector<std::array<double, 2>> Dv; // interior only
  std::vector<Vec3> Dh;                  // Dv + (v - <Dv,y>) e, interior only
  std::vector<double> det_D2v;           // interior only
  std::vector<std::array<std::ptrdiff_t, 8>> nb;  // -x,+x,-y,+y, then diagonals (n=3)

  Vec3 ambient(std::size_t k) const;     // y + e
};

// pi(y) = (y + e) / sqrt(1 + |y|^2)
Vec3 chart_projection(const ChartSpec& spec, const std::array<double, 2>& y, int dim);

ChartField lift_to_chart(const SupportField& h, const ChartSpec& spec);

struct ChartResidual {
  double sup = 0.0;  // sup over interior of |det D^2 v - rhs| / rhs
  std::vector<double> pointwise;  // NaN off the interior
  ChartField field;
};

ChartResidual chart_residual_field(const SupportField& h, const MeasureSpec& mu, const ChartSpec& spec);
double chart_residual(const SupportField& h, const MeasureSpec& mu, const ChartSpec& spec);

struct ChartStudy {
  std::vector<double> spacings;   // base, base/2, ...
  std::vector<double> residuals;  // chart_residual at each spacing
  std::vector<double> orders;     // log2 of successive residual ratios
  double order = 0.0;             // last entry of orders
};

// Chart residual at spacing, spacing/2, ... (levels values, levels >= 2).
ChartStudy chart_refinement(const SupportField& h, const MeasureSpec& mu, const ChartSpec& base, int levels);

// Deterministic, well-spread pole directions (equispaced for n=2, a
// Fibonacci lattice for n=3).
std::vector<Vec3> sample_poles(int dim, int count);

struct JacobianCheck {
  double chart_integral = 0.0;
  double cap_integral = 0.0;
  double discrepancy = 0.0;  // relative, absolute when the cap is (nearly) empty
};

// Compares int_chart g(pi(y)) (1+|y|^2)^{-n/2} dy with int_cap g dx.
JacobianCheck jacobian_check(const ChartSpec& spec, int dim,
                             const std::function<double(const Vec3&)>& g = [](const Vec3&) { return 1.0; });

}  // namespace gmink
