#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/SparseCore>

#include "gmink/body.hpp"
#include "gmink/gaussmeas.hpp"
#include "gmink/report.hpp"

namespace gmink {

struct HomotopyConfig {
  std::optional<double> c0;  // defaults to |mu| / Area
  int t_steps = 4;
  double newton_tol = 1e-10;
  int max_newton = 30;
  double damping = 0.5;  // backtracking factor beta
  double min_step = 1e-4;

  void validate(int dim) const;
};

struct NewtonState {
  SupportField h;
  std::vector<double> residual_field;
  double residual = 0.0;  // sup |G| / sup (2 pi)^{n/2} e^{rho^2/2} g
  std::size_t iterations = 0;
  double gamma = 0.0;
  std::vector<double> history;  // residual after each iterate, starting value first
};

// Largest root of (2 pi)^{-n/2} s^{n-1} e^{-s^2/2} = c0 on [sqrt(n-1), 12];
// throws NoAdmissibleConstant unless gamma_n(B_s0) > 1/2.
double constant_root(double c0, int dim);

// G(h) = det(Hess h + h I) - (2 pi)^{n/2} e^{(|grad h|^2 + h^2)/2} g
std::vector<double> newton_operator(const ScalarField& h, const ScalarField& g);

// Frechet derivative of G at h:
// phi -> tr(Cof(b) (Hess phi + phi I)) - (2 pi)^{n/2} e^{...} g (h phi + <grad h, grad phi>)
Eigen::SparseMatrix<double, Eigen::RowMajor> assemble_linearization(const ScalarField& h, const ScalarField& g);

// Damped Newton on G = 0. Throws NewtonStall, LeftBranch or ConvexityLoss.
NewtonState newton_solve(const ScalarField& g, const SupportField& h_init, const HomotopyConfig& cfg);

// Homotopy g_t = (1-t) c0 + t g from the constant solution s0. Throws
// MassTooLarge, NoAdmissibleConstant or HomotopyFailure.
SolveReport solve_gaussian_minkowski(const MeasureSpec& mu, const HomotopyConfig& cfg);

struct UniquenessReport {
  std::size_t attempted = 0;
  std::vector<SupportField> bodies;
  std::vector<std::string> failures;
  std::vector<std::string> rejected;  // starts with gamma <= 1/2
  double max_pairwise = 0.0;
};

// Re-solves from seeded smooth multiplicative perturbations of the constant
// seed; failures are recorded, not thrown.
UniquenessReport uniqueness_probe(const MeasureSpec& mu, const HomotopyConfig& cfg, int perturbations,
                                  std::uint64_t seed = 0);
UniquenessReport uniqueness_probe(const MeasureSpec& mu, const HomotopyConfig& cfg,
                                  const std::vector<ScalarField>& starts);

}  // namespace gmink
