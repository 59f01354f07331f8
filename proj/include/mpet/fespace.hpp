#pragma once

#include <array>
#include <functional>
#include <vector>

#include "mpet/mesh.hpp"
#include "mpet/params.hpp"

namespace mpet {

enum class SpaceKind { BDM1, RT0, P0 };

[[nodiscard]] int dofs_per_cell(SpaceKind kind);

/// Vector field x -> c + G x. Every BDM1/RT0 basis function is of this form,
/// on the reference cell and after the Piola map.
struct AffineField {
  Vec2 c = Vec2::Zero();
  Mat2 G = Mat2::Zero();

  [[nodiscard]] Vec2 operator()(const Vec2& x) const { return c + G * x; }
  [[nodiscard]] double divergence() const { return G.trace(); }
  [[nodiscard]] Mat2 strain() const { return 0.5 * (G + G.transpose()); }
};

/// Basis on the reference triangle (0,0),(1,0),(0,1), dual to the edge
/// normal moments. Dof 2k+m (BDM1) or k (RT0) is the moment of order m on
/// edge k against L_0 = 1, L_1 = 2s - 1, with s the arc-length fraction from
/// vertex k+1 to vertex k+2 and n the outward unit normal.
class ReferenceElement {
 public:
  explicit ReferenceElement(SpaceKind kind);

  [[nodiscard]] SpaceKind kind() const { return kind_; }
  [[nodiscard]] int size() const { return static_cast<int>(basis_.size()); }
  [[nodiscard]] const AffineField& basis(int i) const { return basis_[i]; }

  /// Entry (i, j) = dof functional i applied to basis function j; the
  /// identity up to rounding.
  [[nodiscard]] DenseMatrix unisolvence_matrix() const;

  static const ReferenceElement& get(SpaceKind kind);

 private:
  SpaceKind kind_;
  std::vector<AffineField> basis_;
};

/// Affine map x = x0 + J xhat onto a mesh cell.
struct CellGeometry {
  Vec2 x0;
  Mat2 J;
  Mat2 Jinv;
  double detJ = 0.0;

  [[nodiscard]] double area() const { return 0.5 * detJ; }
  [[nodiscard]] Vec2 map(const Vec2& xhat) const { return x0 + J * xhat; }
  [[nodiscard]] Vec2 pull_back(const Vec2& x) const { return Jinv * (x - x0); }
};

/// Throws std::invalid_argument for a degenerate cell.
CellGeometry cell_geometry(const Mesh& mesh, int c);

/// Contravariant Piola map of a single reference value: J vhat / detJ.
[[nodiscard]] Vec2 piola_value(const CellGeometry& g, const Vec2& vhat);
[[nodiscard]] double piola_divergence(const CellGeometry& g, double div_hat);

/// Piola image of a reference field, expressed in physical coordinates.
[[nodiscard]] AffineField piola_map(const CellGeometry& g, const AffineField& ref);

/// Global numbering. BDM1: dof 2e+m is moment m on edge e against the
/// global normal, with s measured from the lower vertex. RT0: dof e. P0:
/// dof c. Local basis i of cell c contributes sign(c, i) times global dof
/// index(c, i).
class DofMap {
 public:
  DofMap(const Mesh& mesh, SpaceKind kind, bool mean_zero = false);

  [[nodiscard]] SpaceKind kind() const { return kind_; }
  [[nodiscard]] int num_dofs() const { return num_dofs_; }
  [[nodiscard]] int local_size() const { return local_size_; }
  [[nodiscard]] bool mean_zero() const { return mean_zero_; }
  [[nodiscard]] const Mesh& mesh() const { return *mesh_; }

  [[nodiscard]] int index(int c, int i) const { return idx_[c][i]; }
  [[nodiscard]] double sign(int c, int i) const { return sgn_[c][i]; }

  /// Signed physical basis of cell c (global basis functions restricted to c).
  void cell_basis(int c, std::array<AffineField, 6>& out) const;

 private:
  const Mesh* mesh_;
  SpaceKind kind_;
  int num_dofs_ = 0;
  int local_size_ = 0;
  bool mean_zero_ = false;
  std::vector<std::array<int, 6>> idx_;
  std::vector<std::array<double, 6>> sgn_;
};

using VectorFunction = std::function<Vec2(const Vec2&)>;
using ScalarFunction = std::function<double(const Vec2&)>;

/// Canonical interpolant from edge normal moments (BDM1 or RT0).
DenseVector interpolate_hdiv(const DofMap& space, const VectorFunction& field,
                             int quad_degree = 10);

/// Cellwise means; the area-weighted mean is removed when the map is
/// flagged mean-zero.
DenseVector l2_project(const DofMap& space, const ScalarFunction& field, int quad_degree = 10);

/// Subtracts the area-weighted mean of a P0 coefficient vector.
void remove_mean(const Mesh& mesh, Eigen::Ref<DenseVector> p);

/// Discrete field on cell c as an affine field (BDM1 or RT0 coefficients).
[[nodiscard]] AffineField cell_field(const DofMap& space, std::span<const double> coeffs, int c);

}  // namespace mpet
