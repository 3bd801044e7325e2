#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gmink/sphere.hpp"

namespace gmink {

struct ConvexityReport;
class SupportField;
ConvexityReport validate_convexity(const ScalarField& h);

// Smallest admissible principal radius at a node.
inline constexpr double kConvexityEps = 1e-8;

/// Support function of a convex body sampled on a grid. Only
/// validate_convexity / require_convex produce validated fields.
class SupportField {
 public:
  // Unvalidated wrapper; min_eig is still computed.
  explicit SupportField(ScalarField h);

  const ScalarField& h() const { return h_; }
  const DirectionGrid& grid() const { return h_.grid(); }
  const GridPtr& grid_ptr() const { return h_.grid_ptr(); }
  bool validated() const { return validated_; }
  double min_eig() const { return min_eig_; }

 private:
  friend ConvexityReport validate_convexity(const ScalarField& h);

  ScalarField h_;
  bool validated_ = false;
  double min_eig_ = 0.0;
};

struct ConvexityReport {
  bool ok = false;
  std::size_t worst_node = 0;
  double value = 0.0;       // h at the worst node
  double eigenvalue = 0.0;  // smallest eigenvalue of b_ij at the worst node
  std::string message;
  std::optional<SupportField> body;
};

// Checks h > 0 and min eig(b_ij) > kConvexityEps at every node. Never throws
// for non-convex input; the report names the worst node.
ConvexityReport validate_convexity(const ScalarField& h);
// Throws Error(NotConvex) with the report message.
SupportField require_convex(const ScalarField& h);

SupportField ball(GridPtr grid, double radius);

struct RadialField {
  ScalarField rho;
};

/// Boundary points X_i = h_i x_i + grad h_i (image of the inverse Gauss map),
/// point i coming from node i.
struct BoundaryCloud {
  GridPtr grid;
  std::vector<Vec3> points;
};

BoundaryCloud support_to_boundary(const SupportField& h);
RadialField support_to_radial(const SupportField& h);

enum class HullMode {
  Samples,  // support of the hull of the boundary samples rho_j u_j
  Refined,  // n=2: maximise over the trigonometric interpolant of rho
};

SupportField radial_to_support(const RadialField& rho, HullMode mode = HullMode::Samples);

// rho_{K*} = 1 / h_K on the same nodes, and the inverse pairing.
RadialField polar_dual(const SupportField& h);
SupportField polar_dual(const RadialField& rho);

// Support function of [f] = intersection of {y : <y, x_j> <= f_j}.
SupportField wulff_shape(const ScalarField& f);

}  // namespace gmink
