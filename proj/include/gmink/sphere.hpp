#pragma once

#include <array>
#include <cstddef>
#include <memory>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace gmink {

using Vec3 = Eigen::Vector3d;

/// Sparse row operator over node values (CSR layout). Every differential
/// operator on a grid is one of these, so the Newton assembly and the
/// pointwise evaluators share coefficients exactly.
class Stencil {
 public:
  Stencil() = default;
  explicit Stencil(std::size_t rows);

  // Rows must be appended in order.
  void push_row(std::span<const std::size_t> cols, std::span<const double> coefs);

  std::size_t rows() const { return row_start_.size() - 1; }
  std::span<const std::size_t> row_cols(std::size_t i) const;
  std::span<const double> row_coefs(std::size_t i) const;

  double apply_row(std::size_t i, std::span<const double> values) const;
  std::vector<double> apply(std::span<const double> values) const;
  double abs_row_sum(std::size_t i) const;

  // Sum over terms of diag(scale_k) * op_k. Empty scale means all ones.
  struct Term {
    const Stencil* op;
    std::vector<double> scale;
  };
  static Stencil combine(std::size_t rows, const std::vector<Term>& terms);
  static Stencil identity(std::size_t rows);
  // this * rhs (apply rhs first).
  Stencil compose(const Stencil& rhs) const;

 private:
  std::vector<std::size_t> row_start_{0};
  std::vector<std::size_t> cols_;
  std::vector<double> coefs_;
};

/// Quadrature nodes and weights on S^{n-1}, n in {2,3}, with a fixed
/// orthonormal tangent frame and differentiation stencils per node.
///
/// n=2: theta_i = 2*pi*i/N, uniform weights.
/// n=3: Gauss-Legendre in cos(colatitude) times uniform longitude; node
/// index = lat * lon_count + lon; colatitude ascending, never at a pole.
class DirectionGrid {
 public:
  static std::shared_ptr<const DirectionGrid> make(int dim, int resolution,
                                                   double longitude_offset = 0.0);

  int dim() const { return dim_; }
  std::size_t size() const { return nodes_.size(); }
  int resolution() const { return resolution_; }
  std::size_t lat_count() const { return lat_count_; }
  std::size_t lon_count() const { return lon_count_; }
  double longitude_offset() const { return longitude_offset_; }

  const Vec3& node(std::size_t i) const { return nodes_[i]; }
  const Vec3& tangent(std::size_t i, int k) const { return frame_[i][k]; }
  std::span<const double> weights() const { return weights_; }
  double weight(std::size_t i) const { return weights_[i]; }

  // n=2: theta_i. n=3: colatitude.
  double angle(std::size_t i) const { return angle_[i]; }
  // n=3 only.
  double longitude(std::size_t i) const { return longitude_[i]; }
  std::span<const double> colatitudes() const { return colatitudes_; }

  // Surface area of S^{n-1}.
  double area() const;
  // Largest distance between neighbouring nodes along a grid line.
  double spacing() const { return spacing_; }

  // Component k of the tangential gradient in the node frame.
  const Stencil& gradient_stencil(int k) const { return grad_ops_[k]; }
  // b_{ab} = (Hess h)_{ab} + h delta_{ab} in the node frame; (a,b) in
  // {(0,0)} for n=2, {(0,0),(0,1),(1,1)} for n=3.
  const Stencil& curvature_stencil(int a, int b) const;

 private:
  DirectionGrid() = default;
  void build_circle(int n);
  void build_sphere(int lat, double offset);

  int dim_ = 0;
  int resolution_ = 0;
  std::size_t lat_count_ = 0;
  std::size_t lon_count_ = 0;
  double longitude_offset_ = 0.0;
  double spacing_ = 0.0;
  std::vector<Vec3> nodes_;
  std::vector<std::array<Vec3, 2>> frame_;
  std::vector<double> weights_;
  std::vector<double> angle_;
  std::vector<double> longitude_;
  std::vector<double> colatitudes_;
  std::vector<Stencil> grad_ops_;
  std::vector<Stencil> curv_ops_;  // b11, b12, b22
};

using GridPtr = std::shared_ptr<const DirectionGrid>;

GridPtr make_grid(int dim, int resolution);

/// One finite real per grid node.
class ScalarField {
 public:
  ScalarField(GridPtr grid, std::vector<double> values);

  static ScalarField constant(GridPtr grid, double value);

  template <class Fn>
  static ScalarField sample(GridPtr grid, Fn&& fn) {
    std::vector<double> v(grid->size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = fn(grid->node(i));
    return ScalarField(std::move(grid), std::move(v));
  }

  const DirectionGrid& grid() const { return *grid_; }
  const GridPtr& grid_ptr() const { return grid_; }
  std::span<const double> values() const { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }
  std::size_t size() const { return values_.size(); }

  double min() const;
  double max() const;
  // Lowest index wins ties.
  std::size_t argmin() const;
  std::size_t argmax() const;

 private:
  GridPtr grid_;
  std::vector<double> values_;
};

/// Per-node gradient in the node frame (n-1 components used).
struct TangentField {
  GridPtr grid;
  std::vector<std::array<double, 2>> components;

  Vec3 ambient(std::size_t i) const;
  double norm2(std::size_t i) const;
};

struct Sym2 {
  double b11 = 0.0;
  double b12 = 0.0;
  double b22 = 0.0;
};

/// Per-node b_{ij} = Hess h + h I. For n=2 only b11 is meaningful.
struct HessianField {
  GridPtr grid;
  std::vector<Sym2> entries;

  double det(std::size_t i) const;
  double min_eig(std::size_t i) const;
  double max_eig(std::size_t i) const;
};

// Fixed-order Neumaier summation of sum w_i v_i.
double integrate(const DirectionGrid& grid, std::span<const double> values);
double integrate(const ScalarField& field);

TangentField gradient(const ScalarField& field);
HessianField curvature_matrix(const ScalarField& field);

}  // namespace gmink
