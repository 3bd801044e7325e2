#pragma once

#include <array>
#include <memory>
#include <span>
#include <vector>

#include "gmink/sphere.hpp"

namespace gmink {

/// Trigonometric interpolant of N uniform samples on theta_i = 2 pi i / N.
class TrigInterpolant {
 public:
  explicit TrigInterpolant(std::span<const double> samples);

  double operator()(double theta) const { return eval(theta)[0]; }
  // value, first and second derivative
  std::array<double, 3> eval(double theta) const;

 private:
  std::vector<double> a_;  // cos coefficients, k = 0..N/2
  std::vector<double> b_;  // sin coefficients, k = 0..N/2-1
};

/// Monotone cubic (PCHIP) through samples (psi_i, y_i) of a 2 pi periodic
/// function; psi strictly increasing and spanning less than one period.
class PeriodicPchip {
 public:
  PeriodicPchip(std::span<const double> psi, std::span<const double> y);
  ~PeriodicPchip();
  PeriodicPchip(PeriodicPchip&&) noexcept;
  PeriodicPchip& operator=(PeriodicPchip&&) noexcept;

  double operator()(double theta) const;

 private:
  double base_ = 0.0;
  struct Spline;
  std::unique_ptr<Spline> spline_;
};

/// Local tensor-product cubic Lagrange interpolation on an n=3 grid in
/// (colatitude, longitude), reflecting across the poles.
class SphereInterpolator {
 public:
  SphereInterpolator(GridPtr grid, std::span<const double> values);

  double operator()(const Vec3& direction) const;

 private:
  double at(long row, long col) const;

  GridPtr grid_;
  std::vector<double> values_;
};

/// Interpolates a grid field at an arbitrary unit direction; dispatches on
/// grid dimension (trigonometric for n=2, local cubic for n=3).
class FieldInterpolator {
 public:
  explicit FieldInterpolator(const ScalarField& field);

  double operator()(const Vec3& direction) const;

 private:
  int dim_;
  std::unique_ptr<TrigInterpolant> trig_;
  std::unique_ptr<SphereInterpolator> sphere_;
};

}  // namespace gmink
