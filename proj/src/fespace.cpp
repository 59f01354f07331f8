#include "mpet/fespace.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "mpet/quadrature.hpp"

namespace mpet {

namespace {

const std::array<Vec2, 3> kRefVertices = {Vec2(0.0, 0.0), Vec2(1.0, 0.0), Vec2(0.0, 1.0)};

AffineField constant_field(double a, double b) {
  AffineField f;
  f.c = Vec2(a, b);
  return f;
}

AffineField linear_field(double g00, double g01, double g10, double g11) {
  AffineField f;
  f.G << g00, g01, g10, g11;
  return f;
}

// Moment of order m of f . n on reference edge k.
double reference_moment(const AffineField& f, int k, int m) {
  const Vec2 a = kRefVertices[(k + 1) % 3];
  const Vec2 b = kRefVertices[(k + 2) % 3];
  const Vec2 t = b - a;
  const double len = t.norm();
  const Vec2 n = Vec2(t.y(), -t.x()) / len;
  const LineQuadrature q = line_quadrature(4);
  double s = 0.0;
  for (std::size_t j = 0; j < q.points.size(); ++j) {
    const double sj = q.points[j];
    const double leg = m == 0 ? 1.0 : 2.0 * sj - 1.0;
    s += q.weights[j] * f(a + sj * t).dot(n) * leg;
  }
  return len * s;
}

double dof_functional(SpaceKind kind, int i, const AffineField& f) {
  return kind == SpaceKind::BDM1 ? reference_moment(f, i / 2, i % 2) : reference_moment(f, i, 0);
}

}  // namespace

int dofs_per_cell(SpaceKind kind) {
  switch (kind) {
    case SpaceKind::BDM1:
      return 6;
    case SpaceKind::RT0:
      return 3;
    case SpaceKind::P0:
      return 1;
  }
  return 0;
}

ReferenceElement::ReferenceElement(SpaceKind kind) : kind_(kind) {
  if (kind == SpaceKind::P0) return;
  std::vector<AffineField> mono;
  mono.push_back(constant_field(1.0, 0.0));
  mono.push_back(constant_field(0.0, 1.0));
  if (kind == SpaceKind::BDM1) {
    mono.push_back(linear_field(1.0, 0.0, 0.0, 0.0));
    mono.push_back(linear_field(0.0, 1.0, 0.0, 0.0));
    mono.push_back(linear_field(0.0, 0.0, 1.0, 0.0));
    mono.push_back(linear_field(0.0, 0.0, 0.0, 1.0));
  } else {
    mono.push_back(linear_field(1.0, 0.0, 0.0, 1.0));
  }
  const int k = static_cast<int>(mono.size());
  DenseMatrix d(k, k);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) d(i, j) = dof_functional(kind, i, mono[j]);
  const DenseMatrix dinv = d.fullPivLu().inverse();
  basis_.resize(k);
  for (int j = 0; j < k; ++j)
    for (int l = 0; l < k; ++l) {
      basis_[j].c += dinv(l, j) * mono[l].c;
      basis_[j].G += dinv(l, j) * mono[l].G;
    }
}

DenseMatrix ReferenceElement::unisolvence_matrix() const {
  const int k = size();
  DenseMatrix u(k, k);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) u(i, j) = dof_functional(kind_, i, basis_[j]);
  return u;
}

const ReferenceElement& ReferenceElement::get(SpaceKind kind) {
  static const ReferenceElement bdm(SpaceKind::BDM1);
  static const ReferenceElement rt(SpaceKind::RT0);
  static const ReferenceElement p0(SpaceKind::P0);
  switch (kind) {
    case SpaceKind::BDM1:
      return bdm;
    case SpaceKind::RT0:
      return rt;
    case SpaceKind::P0:
      break;
  }
  return p0;
}

CellGeometry cell_geometry(const Mesh& mesh, int c) {
  const auto& v = mesh.cell_vertices(c);
  CellGeometry g;
  g.x0 = mesh.vertex(v[0]);
  g.J.col(0) = mesh.vertex(v[1]) - g.x0;
  g.J.col(1) = mesh.vertex(v[2]) - g.x0;
  g.detJ = g.J.determinant();
  if (!(std::abs(g.detJ) > 0.0))
    throw std::invalid_argument("cell_geometry: degenerate cell " + std::to_string(c));
  g.Jinv = g.J.inverse();
  return g;
}

Vec2 piola_value(const CellGeometry& g, const Vec2& vhat) { return g.J * vhat / g.detJ; }

double piola_divergence(const CellGeometry& g, double div_hat) { return div_hat / g.detJ; }

AffineField piola_map(const CellGeometry& g, const AffineField& ref) {
  AffineField f;
  f.G = g.J * ref.G * g.Jinv / g.detJ;
  f.c = g.J * ref.c / g.detJ - f.G * g.x0;
  return f;
}

DofMap::DofMap(const Mesh& mesh, SpaceKind kind, bool mean_zero)
    : mesh_(&mesh), kind_(kind), local_size_(dofs_per_cell(kind)), mean_zero_(mean_zero) {
  if (mean_zero && kind != SpaceKind::P0)
    throw std::invalid_argument("DofMap: mean-zero flag applies to P0 only");
  const int nc = mesh.num_cells();
  idx_.assign(nc, {});
  sgn_.assign(nc, {});
  switch (kind) {
    case SpaceKind::BDM1:
      num_dofs_ = 2 * mesh.num_edges();
      break;
    case SpaceKind::RT0:
      num_dofs_ = mesh.num_edges();
      break;
    case SpaceKind::P0:
      num_dofs_ = nc;
      break;
  }
  for (int c = 0; c < nc; ++c) {
    const auto& ce = mesh.cell_edges(c);
    const auto& cs = mesh.cell_edge_signs(c);
    if (kind == SpaceKind::P0) {
      idx_[c][0] = c;
      sgn_[c][0] = 1.0;
      continue;
    }
    for (int k = 0; k < 3; ++k) {
      if (kind == SpaceKind::BDM1) {
        // The odd moment flips twice (normal and parameter direction).
        idx_[c][2 * k] = 2 * ce[k];
        sgn_[c][2 * k] = cs[k];
        idx_[c][2 * k + 1] = 2 * ce[k] + 1;
        sgn_[c][2 * k + 1] = 1.0;
      } else {
        idx_[c][k] = ce[k];
        sgn_[c][k] = cs[k];
      }
    }
  }
}

void DofMap::cell_basis(int c, std::array<AffineField, 6>& out) const {
  if (kind_ == SpaceKind::P0) throw std::logic_error("DofMap::cell_basis: P0 has no vector basis");
  const CellGeometry g = cell_geometry(*mesh_, c);
  const ReferenceElement& ref = ReferenceElement::get(kind_);
  for (int i = 0; i < local_size_; ++i) {
    out[i] = piola_map(g, ref.basis(i));
    out[i].c *= sgn_[c][i];
    out[i].G *= sgn_[c][i];
  }
}

DenseVector interpolate_hdiv(const DofMap& space, const VectorFunction& field, int quad_degree) {
  if (space.kind() == SpaceKind::P0)
    throw std::invalid_argument("interpolate_hdiv: needs a BDM1 or RT0 space");
  const Mesh& mesh = space.mesh();
  const LineQuadrature q = line_quadrature(quad_degree);
  const bool bdm = space.kind() == SpaceKind::BDM1;
  DenseVector x = DenseVector::Zero(space.num_dofs());
  for (int e = 0; e < mesh.num_edges(); ++e) {
    const Vec2& n = mesh.edge_normal(e);
    const double len = mesh.edge_length(e);
    double m0 = 0.0, m1 = 0.0;
    for (std::size_t j = 0; j < q.points.size(); ++j) {
      const double s = q.points[j];
      const double fn = field(mesh.edge_point(e, s)).dot(n);
      m0 += q.weights[j] * fn;
      m1 += q.weights[j] * fn * (2.0 * s - 1.0);
    }
    if (bdm) {
      x[2 * e] = len * m0;
      x[2 * e + 1] = len * m1;
    } else {
      x[e] = len * m0;
    }
  }
  return x;
}

DenseVector l2_project(const DofMap& space, const ScalarFunction& field, int quad_degree) {
  if (space.kind() != SpaceKind::P0) throw std::invalid_argument("l2_project: needs a P0 space");
  const Mesh& mesh = space.mesh();
  const TriangleQuadrature q = triangle_quadrature(quad_degree);
  DenseVector p(mesh.num_cells());
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const CellGeometry g = cell_geometry(mesh, c);
    double s = 0.0;
    for (std::size_t j = 0; j < q.points.size(); ++j) s += q.weights[j] * field(g.map(q.points[j]));
    p[c] = s * g.detJ / g.area();
  }
  if (space.mean_zero()) remove_mean(mesh, p);
  return p;
}

void remove_mean(const Mesh& mesh, Eigen::Ref<DenseVector> p) {
  double s = 0.0, a = 0.0;
  for (int c = 0; c < mesh.num_cells(); ++c) {
    s += mesh.cell_area(c) * p[c];
    a += mesh.cell_area(c);
  }
  p.array() -= s / a;
}

AffineField cell_field(const DofMap& space, std::span<const double> coeffs, int c) {
  std::array<AffineField, 6> basis;
  space.cell_basis(c, basis);
  AffineField f;
  for (int i = 0; i < space.local_size(); ++i) {
    const double a = coeffs[space.index(c, i)];
    f.c += a * basis[i].c;
    f.G += a * basis[i].G;
  }
  return f;
}

}  // namespace mpet
