#include "mpet/assembly.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <string>

#include "mpet/quadrature.hpp"

namespace mpet {

namespace {

using Triplets = std::vector<Eigen::Triplet<double, int>>;

bool has_side(const std::vector<BoundarySegment>& sides, BoundarySegment s) {
  return std::find(sides.begin(), sides.end(), s) != sides.end();
}

void check_partition(const std::vector<BoundarySegment>& a, const std::vector<BoundarySegment>& b,
                     const std::string& field) {
  std::array<int, kNumSegments> count{};
  for (auto s : a) ++count[static_cast<int>(s)];
  for (auto s : b) ++count[static_cast<int>(s)];
  for (int k = 0; k < kNumSegments; ++k) {
    if (count[k] > 1)
      throw std::invalid_argument(field + ": boundary side " + std::to_string(k + 1) +
                                  " assigned more than once");
    if (count[k] == 0)
      throw std::invalid_argument(field + ": boundary side " + std::to_string(k + 1) +
                                  " has no condition");
  }
}

// Outward normal of the single cell at boundary edge e.
Vec2 outward_normal(const Mesh& mesh, int e) {
  const int c = mesh.edge_cells(e)[0];
  return mesh.cell_edge_signs(c)[mesh.local_edge_index(c, e)] * mesh.edge_normal(e);
}

Vec2 tangent_of(const Vec2& n) { return Vec2(-n.y(), n.x()); }

void place(Triplets& t, const SparseMatrix& a, int row_off, int col_off, double scale,
           bool transpose = false) {
  if (scale == 0.0) return;
  for (int r = 0; r < a.outerSize(); ++r)
    for (SparseMatrix::InnerIterator it(a, r); it; ++it) {
      const int i = transpose ? static_cast<int>(it.col()) : r;
      const int j = transpose ? r : static_cast<int>(it.col());
      t.emplace_back(row_off + i, col_off + j, scale * it.value());
    }
}

SparseMatrix from_triplets(int rows, int cols, Triplets& t) {
  SparseMatrix a(rows, cols);
  a.setFromTriplets(t.begin(), t.end());
  a.makeCompressed();
  return a;
}

FreeDofs free_from_mask(const std::vector<bool>& constrained) {
  FreeDofs f;
  f.to_free.assign(constrained.size(), -1);
  for (std::size_t d = 0; d < constrained.size(); ++d)
    if (!constrained[d]) {
      f.to_free[d] = static_cast<int>(f.free.size());
      f.free.push_back(static_cast<int>(d));
    }
  return f;
}

double boundary_scalar(const BoundaryScalarData& fn, BoundarySegment s, const Vec2& x) {
  return fn ? fn(s, x) : 0.0;
}

Vec2 boundary_vector(const BoundaryVectorData& fn, BoundarySegment s, const Vec2& x) {
  return fn ? fn(s, x) : Vec2::Zero();
}

}  // namespace

void BoundaryConditions::validate(int n) const {
  check_partition(u_dirichlet, u_traction, "displacement");
  if (u_dirichlet.empty())
    throw std::invalid_argument("displacement: at least one Dirichlet side is required");
  if (static_cast<int>(networks.size()) != n)
    throw std::invalid_argument("networks: expected " + std::to_string(n) + " boundary sets, got " +
                                std::to_string(networks.size()));
  for (int i = 0; i < n; ++i)
    check_partition(networks[i].pressure, networks[i].flux, "network " + std::to_string(i + 1));
}

BoundaryConditions BoundaryConditions::clamped(int n) {
  const std::vector<BoundarySegment> all = {BoundarySegment::Bottom, BoundarySegment::Right,
                                            BoundarySegment::Top, BoundarySegment::Left};
  BoundaryConditions bc;
  bc.u_dirichlet = all;
  bc.networks.resize(n);
  for (auto& net : bc.networks) net.flux = all;
  return bc;
}

void AssemblyConfig::validate() const {
  if (!(penalty > 0.0)) throw std::invalid_argument("penalty: must be > 0");
  if (quad_degree < 2) throw std::invalid_argument("quad_degree: must be >= 2");
  if (rhs_quad_degree < 0) throw std::invalid_argument("rhs_quad_degree: must be >= 0");
}

std::vector<int> dg_edges(const Mesh& mesh, const std::vector<BoundarySegment>& sides) {
  std::vector<int> edges(mesh.interior_edges().begin(), mesh.interior_edges().end());
  for (int e : mesh.boundary_edges())
    if (has_side(sides, mesh.boundary_segment(e))) edges.push_back(e);
  return edges;
}

SparseMatrix assemble_dg_form(const DofMap& u, const std::vector<int>& edges,
                              const DgFormOptions& opt, const AssemblyConfig& cfg) {
  const Mesh& mesh = u.mesh();
  const int nc = mesh.num_cells();
  const int ne = static_cast<int>(edges.size());
  const LineQuadrature lq = line_quadrature(cfg.quad_degree);

  auto op = [&](const AffineField& f) -> Mat2 { return opt.strain ? f.strain() : f.G; };

  LocalKernel kernel = [&](int item, LocalBlock& out) {
    std::array<AffineField, 6> b0, b1;
    if (item < nc) {
      const int c = item;
      u.cell_basis(c, b0);
      const double area = mesh.cell_area(c);
      out.rows.resize(6);
      out.values.resize(6, 6);
      for (int i = 0; i < 6; ++i) out.rows[i] = u.index(c, i);
      for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j) {
          const double vol = (op(b0[i]).array() * op(b0[j]).array()).sum();
          out.values(i, j) = area * (vol + opt.lambda * b0[i].divergence() * b0[j].divergence());
        }
      out.cols = out.rows;
      return;
    }
    const int e = edges[item - nc];
    const auto& ec = mesh.edge_cells(e);
    const bool interior = ec[1] >= 0;
    const int sides = interior ? 2 : 1;
    const int k = 6 * sides;
    u.cell_basis(ec[0], b0);
    if (interior) u.cell_basis(ec[1], b1);
    const Vec2 n1 = mesh.cell_edge_signs(ec[0])[mesh.local_edge_index(ec[0], e)] * mesh.edge_normal(e);
    const Vec2 t = tangent_of(n1);
    const double len = mesh.edge_length(e);
    const double avg_w = interior ? 0.5 : 1.0;

    out.rows.resize(k);
    for (int i = 0; i < 6; ++i) {
      out.rows[i] = u.index(ec[0], i);
      if (interior) out.rows[6 + i] = u.index(ec[1], i);
    }
    out.cols = out.rows;
    out.values = DenseMatrix::Zero(k, k);

    std::vector<double> avg(k);
    for (int i = 0; i < k; ++i) {
      const AffineField& f = i < 6 ? b0[i] : b1[i - 6];
      avg[i] = avg_w * t.dot(op(f) * n1);
    }
    std::vector<double> jump(k);
    for (std::size_t q = 0; q < lq.points.size(); ++q) {
      const Vec2 x = mesh.edge_point(e, lq.points[q]);
      const double w = lq.weights[q] * len;
      for (int i = 0; i < k; ++i) jump[i] = i < 6 ? b0[i](x).dot(t) : -b1[i - 6](x).dot(t);
      for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) {
          double v = opt.penalty / len * jump[i] * jump[j];
          if (opt.consistency) v -= avg[j] * jump[i] + avg[i] * jump[j];
          out.values(i, j) += w * v;
        }
    }
  };
  return assemble_blocks(u.num_dofs(), u.num_dofs(), nc + ne, kernel, cfg.policy);
}

SparseMatrix assemble_elasticity_dg(const DofMap& u, const BoundaryConditions& bc, double lambda,
                                    const AssemblyConfig& cfg) {
  DgFormOptions opt;
  opt.penalty = cfg.jump_penalty();
  opt.lambda = lambda;
  return assemble_dg_form(u, dg_edges(u.mesh(), bc.u_dirichlet), opt, cfg);
}

SparseMatrix assemble_vector_mass(const DofMap& space, const AssemblyConfig& cfg) {
  const Mesh& mesh = space.mesh();
  const TriangleQuadrature tq = triangle_quadrature(cfg.quad_degree);
  const int k = space.local_size();
  LocalKernel kernel = [&](int c, LocalBlock& out) {
    std::array<AffineField, 6> b;
    space.cell_basis(c, b);
    const CellGeometry g = cell_geometry(mesh, c);
    out.rows.resize(k);
    for (int i = 0; i < k; ++i) out.rows[i] = space.index(c, i);
    out.cols = out.rows;
    out.values = DenseMatrix::Zero(k, k);
    for (std::size_t q = 0; q < tq.points.size(); ++q) {
      const Vec2 x = g.map(tq.points[q]);
      const double w = tq.weights[q] * g.detJ;
      for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) out.values(i, j) += w * b[i](x).dot(b[j](x));
    }
  };
  return assemble_blocks(space.num_dofs(), space.num_dofs(), mesh.num_cells(), kernel, cfg.policy);
}

SparseMatrix assemble_divdiv(const DofMap& space, const AssemblyConfig& cfg) {
  const Mesh& mesh = space.mesh();
  const int k = space.local_size();
  LocalKernel kernel = [&](int c, LocalBlock& out) {
    std::array<AffineField, 6> b;
    space.cell_basis(c, b);
    out.rows.resize(k);
    for (int i = 0; i < k; ++i) out.rows[i] = space.index(c, i);
    out.cols = out.rows;
    out.values.resize(k, k);
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j)
        out.values(i, j) = mesh.cell_area(c) * b[i].divergence() * b[j].divergence();
  };
  return assemble_blocks(space.num_dofs(), space.num_dofs(), mesh.num_cells(), kernel, cfg.policy);
}

SparseMatrix assemble_divergence(const DofMap& space, const DofMap& p, const AssemblyConfig& cfg) {
  const Mesh& mesh = space.mesh();
  const int k = space.local_size();
  LocalKernel kernel = [&](int c, LocalBlock& out) {
    std::array<AffineField, 6> b;
    space.cell_basis(c, b);
    out.rows = {p.index(c, 0)};
    out.cols.resize(k);
    out.values.resize(1, k);
    for (int j = 0; j < k; ++j) {
      out.cols[j] = space.index(c, j);
      out.values(0, j) = mesh.cell_area(c) * b[j].divergence();
    }
  };
  return assemble_blocks(p.num_dofs(), space.num_dofs(), mesh.num_cells(), kernel, cfg.policy);
}

FluxBlocks assemble_flux_blocks(const DofMap& v, const DofMap& p, double r_inv,
                                const AssemblyConfig& cfg) {
  FluxBlocks fb;
  fb.mass = r_inv * assemble_vector_mass(v, cfg);
  fb.div = assemble_divergence(v, p, cfg);
  return fb;
}

SparseMatrix assemble_pressure_block(const RescaledParameters& rp, const DofMap& p) {
  const Mesh& mesh = p.mesh();
  const int n = rp.n, nc = mesh.num_cells();
  DenseMatrix coef = rp.alpha_ij;
  for (int i = 0; i < n; ++i) coef(i, i) = -(rp.alpha_p[i] + rp.aggregate_transfer(i));
  Triplets t;
  for (int i = 0; i < n; ++i)
    for (int c = 0; c < nc; ++c)
      for (int j = 0; j < n; ++j)
        if (coef(i, j) != 0.0) t.emplace_back(i * nc + c, j * nc + c, coef(i, j) * mesh.cell_area(c));
  return from_triplets(n * nc, n * nc, t);
}

int BlockLayout::v_offset(int i) const {
  int off = nu;
  for (int k = 0; k < i; ++k) off += nv[k];
  return off;
}

int BlockLayout::v_total() const {
  int s = 0;
  for (int k : nv) s += k;
  return s;
}

int BlockLayout::p_offset(int i) const { return nu + v_total() + i * np; }

BlockSystem::BlockSystem(const Mesh& m, const RescaledParameters& r, const BoundaryConditions& b,
                         const AssemblyConfig& c)
    : mesh(&m),
      rp(r),
      bc(b),
      cfg(c),
      u_space(m, SpaceKind::BDM1),
      v_space(m, SpaceKind::RT0),
      p_space(m, SpaceKind::P0) {
  rp.validate();
  cfg.validate();
  bc.validate(rp.n);
  const int n = rp.n;
  const int ne = m.num_edges(), nc = m.num_cells();
  const int nu_full = 2 * ne;

  // Essential dofs and their data.
  const int full_size = nu_full + n * ne + n * nc;
  std::vector<bool> constrained(full_size, false);
  DenseVector essential = DenseVector::Zero(full_size);
  const LineQuadrature lq = line_quadrature(cfg.rhs_quad_degree);
  std::vector<bool> u_mask(nu_full, false);
  std::vector<std::vector<bool>> v_mask(n, std::vector<bool>(ne, false));
  for (int e : m.boundary_edges()) {
    const BoundarySegment s = m.boundary_segment(e);
    const Vec2& ng = m.edge_normal(e);
    const double len = m.edge_length(e);
    const double orient = outward_normal(m, e).dot(ng);
    if (has_side(bc.u_dirichlet, s)) {
      double m0 = 0.0, m1 = 0.0;
      for (std::size_t q = 0; q < lq.points.size(); ++q) {
        const double sq = lq.points[q];
        const double un = boundary_vector(bc.u_data, s, m.edge_point(e, sq)).dot(ng);
        m0 += lq.weights[q] * un;
        m1 += lq.weights[q] * un * (2.0 * sq - 1.0);
      }
      u_mask[2 * e] = u_mask[2 * e + 1] = true;
      essential[2 * e] = len * m0;
      essential[2 * e + 1] = len * m1;
    }
    for (int i = 0; i < n; ++i) {
      if (!has_side(bc.networks[i].flux, s)) continue;
      double m0 = 0.0;
      for (std::size_t q = 0; q < lq.points.size(); ++q)
        m0 += lq.weights[q] * boundary_scalar(bc.networks[i].q_data, s, m.edge_point(e, lq.points[q]));
      v_mask[i][e] = true;
      essential[nu_full + i * ne + e] = orient * len * m0;
    }
  }
  for (int d = 0; d < nu_full; ++d) constrained[d] = u_mask[d];
  for (int i = 0; i < n; ++i)
    for (int e = 0; e < ne; ++e) constrained[nu_full + i * ne + e] = v_mask[i][e];

  u_free = free_from_mask(u_mask);
  v_free.resize(n);
  for (int i = 0; i < n; ++i) v_free[i] = free_from_mask(v_mask[i]);
  mean_zero.resize(n);
  for (int i = 0; i < n; ++i) mean_zero[i] = bc.mean_zero(i);

  layout.n = n;
  layout.nu = u_free.size();
  layout.nv.resize(n);
  for (int i = 0; i < n; ++i) layout.nv[i] = v_free[i].size();
  layout.np = nc;

  // Full-dof blocks.
  a_uu = assemble_elasticity_dg(u_space, bc, rp.lambda, cfg);
  rt_mass = assemble_vector_mass(v_space, cfg);
  rt_divdiv = assemble_divdiv(v_space, cfg);
  div_u = assemble_divergence(u_space, p_space, cfg);
  div_v = assemble_divergence(v_space, p_space, cfg);
  const SparseMatrix cpp = assemble_pressure_block(rp, p_space);
  cell_areas.resize(nc);
  for (int k = 0; k < nc; ++k) cell_areas[k] = m.cell_area(k);

  const int pu = nu_full + n * ne;
  Triplets t;
  place(t, a_uu, 0, 0, 1.0);
  for (int i = 0; i < n; ++i) place(t, div_u, 0, pu + i * nc, -1.0, true);
  for (int i = 0; i < n; ++i) {
    place(t, rt_mass, nu_full + i * ne, nu_full + i * ne, rp.r_inv[i]);
    place(t, div_v, nu_full + i * ne, pu + i * nc, -1.0, true);
  }
  for (int i = 0; i < n; ++i) {
    place(t, div_u, pu + i * nc, 0, -1.0);
    place(t, div_v, pu + i * nc, nu_full + i * ne, -1.0);
  }
  place(t, cpp, pu, pu, 1.0);
  const SparseMatrix full = from_triplets(full_size, full_size, t);

  const FreeDofs sys_free = free_from_mask(constrained);
  std::vector<bool> inverse(full_size);
  for (int d = 0; d < full_size; ++d) inverse[d] = !constrained[d];
  const FreeDofs sys_fixed = free_from_mask(inverse);
  matrix = extract(full, sys_free, sys_free);
  lift = extract(full, sys_free, sys_fixed);
  constrained_index = sys_fixed.free;
  constrained_values.resize(sys_fixed.size());
  for (int k = 0; k < sys_fixed.size(); ++k) constrained_values[k] = essential[sys_fixed.free[k]];
}

DenseVector BlockSystem::full_u(const DenseVector& x) const {
  DenseVector u = DenseVector::Zero(u_space.num_dofs());
  for (std::size_t k = 0; k < constrained_index.size(); ++k)
    if (constrained_index[k] < u.size()) u[constrained_index[k]] = constrained_values[k];
  for (int k = 0; k < u_free.size(); ++k) u[u_free.free[k]] = x[k];
  return u;
}

DenseVector BlockSystem::full_v(int i, const DenseVector& x) const {
  const int ne = mesh->num_edges();
  const int base = u_space.num_dofs() + i * ne;
  DenseVector v = DenseVector::Zero(ne);
  for (std::size_t k = 0; k < constrained_index.size(); ++k) {
    const int d = constrained_index[k] - base;
    if (d >= 0 && d < ne) v[d] = constrained_values[k];
  }
  const int off = layout.v_offset(i);
  for (int k = 0; k < v_free[i].size(); ++k) v[v_free[i].free[k]] = x[off + k];
  return v;
}

DenseVector BlockSystem::pressure(int i, const DenseVector& x) const {
  return x.segment(layout.p_offset(i), layout.np);
}

DenseVector BlockSystem::pack(const DenseVector& u_full, const std::vector<DenseVector>& v_full,
                              const std::vector<DenseVector>& p) const {
  DenseVector x(size());
  for (int k = 0; k < u_free.size(); ++k) x[k] = u_full[u_free.free[k]];
  for (int i = 0; i < layout.n; ++i) {
    const int off = layout.v_offset(i);
    for (int k = 0; k < v_free[i].size(); ++k) x[off + k] = v_full[i][v_free[i].free[k]];
    x.segment(layout.p_offset(i), layout.np) = p[i];
  }
  return x;
}

BlockSystem assemble_full_operator(const Mesh& mesh, const RescaledParameters& rp,
                                   const BoundaryConditions& bc, const AssemblyConfig& cfg) {
  return BlockSystem(mesh, rp, bc, cfg);
}

DenseVector assemble_load(const BlockSystem& sys, const ProblemData& data) {
  const Mesh& m = *sys.mesh;
  const int n = sys.rp.n, ne = m.num_edges(), nc = m.num_cells();
  const int nu_full = 2 * ne, pu = nu_full + n * ne;
  if (!data.g.empty() && static_cast<int>(data.g.size()) != n)
    throw std::invalid_argument("ProblemData.g: expected one source per network");
  DenseVector b = DenseVector::Zero(pu + n * nc);
  const TriangleQuadrature tq = triangle_quadrature(sys.cfg.rhs_quad_degree);
  const LineQuadrature lq = line_quadrature(sys.cfg.rhs_quad_degree);
  std::array<AffineField, 6> bu, bv;

  for (int c = 0; c < nc; ++c) {
    const CellGeometry g = cell_geometry(m, c);
    if (data.f) {
      sys.u_space.cell_basis(c, bu);
      for (std::size_t q = 0; q < tq.points.size(); ++q) {
        const Vec2 x = g.map(tq.points[q]);
        const Vec2 f = data.f(x);
        const double w = tq.weights[q] * g.detJ;
        for (int i = 0; i < 6; ++i) b[sys.u_space.index(c, i)] += w * f.dot(bu[i](x));
      }
    }
    for (int i = 0; i < n && !data.g.empty(); ++i) {
      if (!data.g[i]) continue;
      double s = 0.0;
      for (std::size_t q = 0; q < tq.points.size(); ++q)
        s += tq.weights[q] * data.g[i](g.map(tq.points[q]));
      b[pu + i * nc + c] += s * g.detJ;
    }
  }

  const auto& bc = sys.bc;
  for (int e : m.boundary_edges()) {
    const BoundarySegment s = m.boundary_segment(e);
    const int c = m.edge_cells(e)[0];
    const Vec2 nout = outward_normal(m, e);
    const Vec2 t = tangent_of(nout);
    const double len = m.edge_length(e);
    const bool dirichlet = has_side(bc.u_dirichlet, s);
    if ((dirichlet && bc.u_data) || (!dirichlet && bc.traction)) {
      sys.u_space.cell_basis(c, bu);
      for (std::size_t q = 0; q < lq.points.size(); ++q) {
        const Vec2 x = m.edge_point(e, lq.points[q]);
        const double w = lq.weights[q] * len;
        if (dirichlet) {
          const double udt = bc.u_data(s, x).dot(t);
          for (int i = 0; i < 6; ++i) {
            const double cons = t.dot(bu[i].strain() * nout);
            const double pen = sys.cfg.jump_penalty() / len * bu[i](x).dot(t);
            b[sys.u_space.index(c, i)] += w * udt * (pen - cons);
          }
        } else {
          const Vec2 gn = bc.traction(s, x);
          for (int i = 0; i < 6; ++i) b[sys.u_space.index(c, i)] += w * gn.dot(bu[i](x));
        }
      }
    }
    for (int k = 0; k < n; ++k) {
      const auto& net = bc.networks[k];
      if (!has_side(net.pressure, s) || !net.p_data) continue;
      sys.v_space.cell_basis(c, bv);
      for (std::size_t q = 0; q < lq.points.size(); ++q) {
        const Vec2 x = m.edge_point(e, lq.points[q]);
        const double w = lq.weights[q] * len * net.p_data(s, x);
        for (int i = 0; i < 3; ++i) b[nu_full + k * ne + sys.v_space.index(c, i)] += w * bv[i](x).dot(nout);
      }
    }
  }
  return b;
}

DenseVector reduce_load(const BlockSystem& sys, const DenseVector& load) {
  const int n = sys.rp.n, ne = sys.mesh->num_edges();
  const int nu_full = 2 * ne, pu = nu_full + n * ne;
  DenseVector r(sys.size());
  for (int k = 0; k < sys.u_free.size(); ++k) r[k] = load[sys.u_free.free[k]];
  for (int i = 0; i < n; ++i) {
    const int off = sys.layout.v_offset(i);
    for (int k = 0; k < sys.v_free[i].size(); ++k) r[off + k] = load[nu_full + i * ne + sys.v_free[i].free[k]];
    r.segment(sys.layout.p_offset(i), sys.layout.np) = load.segment(pu + i * sys.layout.np, sys.layout.np);
  }
  if (sys.constrained_values.size() > 0) r -= sys.lift * sys.constrained_values;
  return r;
}

DenseVector assemble_rhs(const BlockSystem& sys, const ProblemData& data) {
  return reduce_load(sys, assemble_load(sys, data));
}

PreconditionerBlocks assemble_preconditioner_blocks(const BlockSystem& sys, const LambdaMatrices& lm) {
  const int n = sys.rp.n;
  if (lm.size() != n) throw std::invalid_argument("assemble_preconditioner_blocks: Lambda size mismatch");
  PreconditionerBlocks pb;
  pb.bu = extract(sys.a_uu, sys.u_free, sys.u_free);
  const NormGrams g = assemble_norm_grams(sys, lm);
  pb.bv = g.v;
  pb.bp = g.p;
  pb.lambda = lm.lambda;
  pb.cell_areas = sys.cell_areas;
  return pb;
}

NormGrams assemble_norm_grams(const BlockSystem& sys, const LambdaMatrices& lm) {
  const int n = sys.rp.n, nc = sys.layout.np;
  if (lm.size() != n) throw std::invalid_argument("assemble_norm_grams: Lambda size mismatch");
  NormGrams g;
  DgFormOptions opt;
  opt.strain = false;
  opt.consistency = false;
  opt.penalty = 1.0;
  opt.lambda = sys.rp.lambda;
  const SparseMatrix gu = assemble_dg_form(sys.u_space, dg_edges(*sys.mesh, sys.bc.u_dirichlet), opt, sys.cfg);
  g.u = extract(gu, sys.u_free, sys.u_free);

  Triplets t;
  const int v0 = sys.layout.v_offset(0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == j)
        place(t, extract(sys.rt_mass, sys.v_free[i], sys.v_free[i]), sys.layout.v_offset(i) - v0,
              sys.layout.v_offset(i) - v0, sys.rp.r_inv[i]);
      place(t, extract(sys.rt_divdiv, sys.v_free[i], sys.v_free[j]), sys.layout.v_offset(i) - v0,
            sys.layout.v_offset(j) - v0, lm.lambda_inv(i, j));
    }
  g.v = from_triplets(sys.layout.v_total(), sys.layout.v_total(), t);

  Triplets tp;
  for (int i = 0; i < n; ++i)
    for (int c = 0; c < nc; ++c)
      for (int j = 0; j < n; ++j) tp.emplace_back(i * nc + c, j * nc + c, lm.lambda(i, j) * sys.cell_areas[c]);
  g.p = from_triplets(n * nc, n * nc, tp);
  return g;
}

SparseMatrix extract(const SparseMatrix& full, const FreeDofs& rows, const FreeDofs& cols) {
  Triplets t;
  for (int r = 0; r < rows.size(); ++r)
    for (SparseMatrix::InnerIterator it(full, rows.free[r]); it; ++it) {
      const int c = cols.to_free[it.col()];
      if (c >= 0) t.emplace_back(r, c, it.value());
    }
  return from_triplets(rows.size(), cols.size(), t);
}

void write_matrix_market(std::ostream& os, const SparseMatrix& a) {
  os << "%%MatrixMarket matrix coordinate real general\n";
  os << a.rows() << ' ' << a.cols() << ' ' << a.nonZeros() << '\n';
  char buf[64];
  for (int r = 0; r < a.outerSize(); ++r)
    for (SparseMatrix::InnerIterator it(a, r); it; ++it) {
      std::snprintf(buf, sizeof buf, "%.17g", it.value());
      os << r + 1 << ' ' << it.col() + 1 << ' ' << buf << '\n';
    }
}

}  // namespace mpet
