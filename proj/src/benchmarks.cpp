#include "mpet/benchmarks.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

#include "mpet/quadrature.hpp"

namespace mpet {

namespace {

// a(t) = t^2 (t-1)^2 and its derivatives.
double a0(double t) { return t * t * (t - 1.0) * (t - 1.0); }
double a1(double t) { return 2.0 * t * (t - 1.0) * (2.0 * t - 1.0); }
double a2(double t) { return 12.0 * t * t - 12.0 * t + 2.0; }
double a3(double t) { return 24.0 * t - 12.0; }

constexpr double kPhiScale = 900.0;

const std::vector<BoundarySegment> kAllSides = {BoundarySegment::Bottom, BoundarySegment::Right,
                                                BoundarySegment::Top, BoundarySegment::Left};

BoundaryConditions cantilever_boundary(const std::vector<double>& p_values) {
  BoundaryConditions bc;
  bc.u_dirichlet = {BoundarySegment::Left};
  bc.u_traction = {BoundarySegment::Bottom, BoundarySegment::Right, BoundarySegment::Top};
  bc.traction = [](BoundarySegment s, const Vec2&) {
    return s == BoundarySegment::Top ? Vec2(0.0, -1.0) : Vec2(0.0, 0.0);
  };
  for (double pv : p_values) {
    NetworkBoundary nb;
    nb.pressure = kAllSides;
    nb.p_data = [pv](BoundarySegment, const Vec2&) { return pv; };
    bc.networks.push_back(nb);
  }
  return bc;
}

template <class Task>
std::vector<BenchmarkResult> run_tasks(int count, bool parallel, const Task& task) {
  std::vector<BenchmarkResult> out(count);
  std::vector<std::string> errors(count);
  auto run = [&](int i) {
    try {
      out[i] = task(i);
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  };
  if (parallel) {
#pragma omp parallel for schedule(dynamic, 1)
    for (int i = 0; i < count; ++i) run(i);
  } else {
    for (int i = 0; i < count; ++i) run(i);
  }
  for (const auto& e : errors)
    if (!e.empty()) throw std::runtime_error(e);
  return out;
}

std::map<int, Mesh> build_meshes(const std::vector<int>& n_list) {
  std::map<int, Mesh> meshes;
  for (int n : n_list)
    if (!meshes.count(n)) meshes.emplace(n, Mesh::structured(n));
  return meshes;
}

}  // namespace

double ManufacturedBiot::phi(const Vec2& x) const { return a0(x.x()) * a0(x.y()); }

Vec2 ManufacturedBiot::u(const Vec2& x) const {
  return Vec2(a0(x.x()) * a1(x.y()), -a1(x.x()) * a0(x.y()));
}

Mat2 ManufacturedBiot::grad_u(const Vec2& x) const {
  const double X = x.x(), Y = x.y();
  Mat2 g;
  g << a1(X) * a1(Y), a0(X) * a2(Y), -a2(X) * a0(Y), -a1(X) * a1(Y);
  return g;
}

std::array<Mat2, 2> ManufacturedBiot::hess_u(const Vec2& x) const {
  const double X = x.x(), Y = x.y();
  std::array<Mat2, 2> h;
  h[0] << a2(X) * a1(Y), a1(X) * a2(Y), a1(X) * a2(Y), a0(X) * a3(Y);
  h[1] << -a3(X) * a0(Y), -a2(X) * a1(Y), -a2(X) * a1(Y), -a1(X) * a2(Y);
  return h;
}

double ManufacturedBiot::p(const Vec2& x) const { return kPhiScale * phi(x) - 1.0; }

Vec2 ManufacturedBiot::grad_p(const Vec2& x) const {
  return kPhiScale * Vec2(a1(x.x()) * a0(x.y()), a0(x.x()) * a1(x.y()));
}

double ManufacturedBiot::lap_p(const Vec2& x) const {
  return kPhiScale * (a2(x.x()) * a0(x.y()) + a0(x.x()) * a2(x.y()));
}

Vec2 ManufacturedBiot::v(const Vec2& x) const { return -grad_p(x) / r_inv; }

double ManufacturedBiot::div_v(const Vec2& x) const { return -lap_p(x) / r_inv; }

Vec2 ManufacturedBiot::f(const Vec2& x) const {
  // div u = 0, so -div eps(u) - lambda grad div u = -lap(u) / 2.
  const double X = x.x(), Y = x.y();
  const Vec2 lap_u(a2(X) * a1(Y) + a0(X) * a3(Y), -(a3(X) * a0(Y) + a1(X) * a2(Y)));
  return -0.5 * lap_u + grad_p(x);
}

double ManufacturedBiot::g(const Vec2& x) const { return lap_p(x) / r_inv - alpha_p * p(x); }

RescaledParameters ManufacturedBiot::parameters() const {
  return RescaledParameters::direct(lambda, {r_inv}, {alpha_p});
}

ProblemData ManufacturedBiot::data() const {
  ProblemData d;
  const ManufacturedBiot self = *this;
  d.f = [self](const Vec2& x) { return self.f(x); };
  d.g = {[self](const Vec2& x) { return self.g(x); }};
  return d;
}

ExactSolution exact_solution(const ManufacturedBiot& mb) {
  ExactSolution ex;
  ex.u = [mb](const Vec2& x) { return mb.u(x); };
  ex.grad_u = [mb](const Vec2& x) { return mb.grad_u(x); };
  ex.hess_u = [mb](const Vec2& x) { return mb.hess_u(x); };
  ex.v = {[mb](const Vec2& x) { return mb.v(x); }};
  ex.div_v = {[mb](const Vec2& x) { return mb.div_v(x); }};
  ex.p = {[mb](const Vec2& x) { return mb.p(x); }};
  return ex;
}

ErrorNorms compute_error_norms(const BlockSystem& sys, const DenseVector& x,
                               const ExactSolution& exact, const LambdaMatrices& lm,
                               int quad_degree, bool include_h2_term) {
  const Mesh& m = *sys.mesh;
  const int n = sys.rp.n, nc = m.num_cells();
  if (static_cast<int>(exact.p.size()) != n || static_cast<int>(exact.v.size()) != n ||
      static_cast<int>(exact.div_v.size()) != n)
    throw std::invalid_argument("compute_error_norms: exact fields must cover every network");
  const TriangleQuadrature tq = triangle_quadrature(quad_degree);
  const LineQuadrature lq = line_quadrature(quad_degree);

  const DenseVector uf = sys.full_u(x);
  std::vector<DenseVector> vf(n), pf(n);
  for (int i = 0; i < n; ++i) {
    vf[i] = sys.full_v(i, x);
    pf[i] = sys.pressure(i, x);
  }
  const std::span<const double> us(uf.data(), static_cast<std::size_t>(uf.size()));

  double ep = 0.0, ev = 0.0, eu = 0.0;
  DenseVector dp(n), dd(n);
  for (int c = 0; c < nc; ++c) {
    const CellGeometry g = cell_geometry(m, c);
    const AffineField uh = cell_field(sys.u_space, us, c);
    std::vector<AffineField> vh(n);
    for (int i = 0; i < n; ++i)
      vh[i] = cell_field(sys.v_space, std::span<const double>(vf[i].data(), vf[i].size()), c);
    double hk = 0.0;
    for (int e : m.cell_edges(c)) hk = std::max(hk, m.edge_length(e));
    for (std::size_t q = 0; q < tq.points.size(); ++q) {
      const Vec2 xq = g.map(tq.points[q]);
      const double w = tq.weights[q] * g.detJ;
      const Mat2 gu = exact.grad_u(xq) - uh.G;
      const double du = gu.trace();
      eu += w * (gu.squaredNorm() + sys.rp.lambda * du * du);
      if (include_h2_term && exact.hess_u) {
        const auto hs = exact.hess_u(xq);
        eu += w * hk * hk * (hs[0].squaredNorm() + hs[1].squaredNorm());
      }
      for (int i = 0; i < n; ++i) {
        dp[i] = exact.p[i](xq) - pf[i][c];
        dd[i] = exact.div_v[i](xq) - vh[i].divergence();
        ev += w * sys.rp.r_inv[i] * (exact.v[i](xq) - vh[i](xq)).squaredNorm();
      }
      ep += w * dp.dot(lm.lambda * dp);
      ev += w * dd.dot(lm.lambda_inv * dd);
    }
  }

  for (int e : dg_edges(m, sys.bc.u_dirichlet)) {
    const auto& ec = m.edge_cells(e);
    const Vec2 n1 = m.cell_edge_signs(ec[0])[m.local_edge_index(ec[0], e)] * m.edge_normal(e);
    const Vec2 t(-n1.y(), n1.x());
    const AffineField u0 = cell_field(sys.u_space, us, ec[0]);
    AffineField u1;
    if (ec[1] >= 0) u1 = cell_field(sys.u_space, us, ec[1]);
    for (std::size_t q = 0; q < lq.points.size(); ++q) {
      const Vec2 xq = m.edge_point(e, lq.points[q]);
      // The exact field is continuous, so only the discrete jump survives
      // inside; on the boundary the reference trace is the exact one.
      const double jump = ec[1] >= 0 ? (u0(xq) - u1(xq)).dot(t) : (u0(xq) - exact.u(xq)).dot(t);
      // h_e^{-1} cancels the edge length in ds.
      eu += lq.weights[q] * jump * jump;
    }
  }
  return {std::sqrt(ep), std::sqrt(ev), std::sqrt(eu)};
}

MassBalance check_mass_conservation(const BlockSystem& sys, const DenseVector& x,
                                    const ProblemData& data, int quad_degree) {
  const Mesh& m = *sys.mesh;
  const int n = sys.rp.n, nc = m.num_cells();
  const TriangleQuadrature tq = triangle_quadrature(quad_degree);
  const DenseVector divu = sys.div_u * sys.full_u(x);
  const DenseVector absu = sys.div_u.cwiseAbs() * sys.full_u(x).cwiseAbs();
  std::vector<DenseVector> divv(n), absv(n), p(n);
  for (int i = 0; i < n; ++i) {
    divv[i] = sys.div_v * sys.full_v(i, x);
    absv[i] = sys.div_v.cwiseAbs() * sys.full_v(i, x).cwiseAbs();
    p[i] = sys.pressure(i, x);
  }
  constexpr double eps = std::numeric_limits<double>::epsilon();
  MassBalance mb;
  for (int c = 0; c < nc; ++c) {
    const double area = sys.cell_areas[c];
    const CellGeometry g = cell_geometry(m, c);
    for (int i = 0; i < n; ++i) {
      double qg = 0.0;
      if (!data.g.empty() && data.g[i]) {
        for (std::size_t q = 0; q < tq.points.size(); ++q) qg += tq.weights[q] * data.g[i](g.map(tq.points[q]));
        qg *= g.detJ / area;
      }
      const double du = divu[c] / area, dv = divv[i][c] / area;
      const double storage = (sys.rp.alpha_p[i] + sys.rp.aggregate_transfer(i)) * p[i][c];
      double transfer = 0.0;
      for (int j = 0; j < n; ++j)
        if (j != i) transfer += sys.rp.alpha_ij(i, j) * p[j][c];
      const double res = -du - dv - storage + transfer - qg;
      mb.max_abs = std::max(mb.max_abs, std::abs(res));
      mb.floor_abs = std::max(mb.floor_abs, eps * ((absu[c] + absv[i][c]) / area + std::abs(storage) +
                                                   std::abs(transfer) + std::abs(qg)));
      mb.scale = std::max({mb.scale, std::abs(du), std::abs(dv), std::abs(storage), std::abs(transfer),
                           std::abs(qg)});
    }
  }
  return mb;
}

BenchmarkResult solve_point(const Mesh& mesh, const RescaledParameters& rp,
                            const BoundaryConditions& bc, const ProblemData& data,
                            const ExactSolution* exact, const RunOptions& opt) {
  BenchmarkResult r;
  r.n_subdiv = mesh.subdivisions();
  r.h = mesh.h();
  const BlockSystem sys(mesh, rp, bc, opt.assembly);
  const LambdaMatrices lm = build_lambda_matrices(rp);
  const DenseVector rhs = assemble_rhs(sys, data);
  DenseVector x;
  if (opt.iterations) {
    const BlockPreconditioner pre = factor_preconditioner(sys, assemble_preconditioner_blocks(sys, lm));
    MinresResult res = minres_solve(sys, pre, rhs, opt.solver);
    r.iterations = res.report.iterations;
    r.factor = res.report.rho;
    r.converged = res.report.converged;
    x = std::move(res.x);
  }
  if (opt.errors) {
    x = direct_solve(sys, rhs);
    if (exact) {
      r.errors = compute_error_norms(sys, x, *exact, lm, opt.assembly.rhs_quad_degree, opt.include_h2_term);
      r.has_errors = true;
    }
  }
  if (x.size() > 0) {
    const MassBalance mb = check_mass_conservation(sys, x, data);
    r.mass_residual = mb.relative();
    r.mass_floor = mb.relative_floor();
  }
  return r;
}

std::vector<BenchmarkResult> run_biot_table(const std::vector<int>& n_list,
                                            const std::vector<BiotPoint>& points,
                                            const RunOptions& opt) {
  const auto meshes = build_meshes(n_list);
  const int np = static_cast<int>(points.size());
  const int count = static_cast<int>(n_list.size()) * np;
  return run_tasks(count, opt.parallel_sweep, [&](int k) {
    const BiotPoint& pt = points[k % np];
    ManufacturedBiot mb{pt.r_inv, pt.alpha_p, pt.lambda};
    const ExactSolution ex = exact_solution(mb);
    BenchmarkResult r = solve_point(meshes.at(n_list[k / np]), mb.parameters(),
                                    BoundaryConditions::clamped(1), mb.data(), &ex, opt);
    r.point = {pt.alpha_p, pt.lambda, pt.r_inv};
    return r;
  });
}

ModelParameters barenblatt_parameters(double k1_factor, double k2_factor, double beta12, double tau) {
  ModelParameters mp;
  mp.n = 2;
  mp.lambda = 4.2e6;
  mp.mu = 2.4e6;
  mp.alpha = {0.95, 0.12};
  mp.c_p = {54e-9, 14e-9};
  mp.beta = DenseMatrix::Zero(2, 2);
  mp.beta(0, 1) = mp.beta(1, 0) = beta12;
  mp.K = {6.18e-15 * k1_factor, 27.2e-15 * k2_factor};
  mp.tau = tau;
  return mp;
}

BoundaryConditions barenblatt_boundary() { return cantilever_boundary({2.0, 20.0}); }

std::vector<BenchmarkResult> run_barenblatt(const std::vector<int>& n_list,
                                            const std::vector<double>& k1_factors,
                                            const std::vector<double>& k2_factors,
                                            const std::vector<double>& betas, const RunOptions& opt,
                                            double tau) {
  const auto meshes = build_meshes(n_list);
  const int n1 = static_cast<int>(k1_factors.size()), n2 = static_cast<int>(k2_factors.size());
  const int nb = static_cast<int>(betas.size());
  const int per_mesh = n1 * n2 * nb;
  const BoundaryConditions bc = barenblatt_boundary();
  return run_tasks(static_cast<int>(n_list.size()) * per_mesh, opt.parallel_sweep, [&](int k) {
    const int mesh_i = k / per_mesh, rem = k % per_mesh;
    const int bi = rem / (n2 * n1), k2i = (rem / n1) % n2, k1i = rem % n1;
    const ModelParameters mp = barenblatt_parameters(k1_factors[k1i], k2_factors[k2i], betas[bi], tau);
    BenchmarkResult r = solve_point(meshes.at(n_list[mesh_i]), rescale_parameters(mp), bc, ProblemData{},
                                    nullptr, opt);
    r.point = {betas[bi], k2_factors[k2i], k1_factors[k1i]};
    return r;
  });
}

ModelParameters four_network_parameters(double lambda_factor, double k_factor, double k3_factor,
                                        double tau) {
  ModelParameters mp;
  mp.n = 4;
  mp.lambda = 505.0 * lambda_factor;
  mp.mu = 216.0;
  mp.alpha = {0.99, 0.99, 0.99, 0.99};
  mp.c_p = {4.5e-10, 4.5e-10, 4.5e-10, 4.5e-10};
  mp.beta = DenseMatrix::Zero(4, 4);
  auto set = [&](int i, int j, double b) { mp.beta(i, j) = mp.beta(j, i) = b; };
  set(0, 1, 1.5e-19);
  set(1, 3, 1.5e-19);
  set(1, 2, 2.0e-19);
  set(2, 3, 1.0e-13);
  const double k = 1.0e-10 / 2.67e-3 * k_factor;
  mp.K = {k, k, 1.4e-14 / 8.9e-4 * k3_factor, k};
  mp.tau = tau;
  return mp;
}

BoundaryConditions four_network_boundary() { return cantilever_boundary({2.0, 20.0, 30.0, 40.0}); }

std::vector<BenchmarkResult> run_four_network(const std::vector<int>& n_list,
                                              const std::vector<double>& lambda_factors,
                                              const std::vector<double>& k_factors,
                                              const std::vector<double>& k3_factors,
                                              const RunOptions& opt, double tau) {
  const auto meshes = build_meshes(n_list);
  const int nl = static_cast<int>(lambda_factors.size()), nk = static_cast<int>(k_factors.size());
  const int n3 = static_cast<int>(k3_factors.size());
  const int per_mesh = nl * nk * n3;
  const BoundaryConditions bc = four_network_boundary();
  return run_tasks(static_cast<int>(n_list.size()) * per_mesh, opt.parallel_sweep, [&](int k) {
    const int mesh_i = k / per_mesh, rem = k % per_mesh;
    const int li = rem / (nk * n3), ki = (rem / n3) % nk, k3i = rem % n3;
    const ModelParameters mp = four_network_parameters(lambda_factors[li], k_factors[ki], k3_factors[k3i], tau);
    BenchmarkResult r = solve_point(meshes.at(n_list[mesh_i]), rescale_parameters(mp), bc, ProblemData{},
                                    nullptr, opt);
    r.point = {lambda_factors[li], k_factors[ki], k3_factors[k3i]};
    return r;
  });
}

}  // namespace mpet
