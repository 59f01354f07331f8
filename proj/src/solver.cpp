#include "mpet/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>
#include <Eigen/UmfPackSupport>

namespace mpet {

namespace {

using ColMatrix = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;

}  // namespace

void SolverConfig::validate() const {
  if (!(reduction_tol > 0.0 && reduction_tol < 1.0))
    throw std::invalid_argument("reduction_tol: must lie in (0, 1)");
  if (polish_tol < 0.0 || polish_tol >= 1.0) throw std::invalid_argument("polish_tol: must lie in [0, 1)");
  if (refine_passes < 0) throw std::invalid_argument("refine_passes: must be >= 0");
  if (max_iters < 1) throw std::invalid_argument("max_iters: must be >= 1");
}

int SolveReport::iterations_to(double tol) const {
  if (history.empty()) return -1;
  for (std::size_t j = 0; j < history.size(); ++j)
    if (history[j] <= tol * history[0]) return static_cast<int>(j);
  return -1;
}

double SolveReport::factor_to(double tol) const {
  const int k = iterations_to(tol);
  if (k <= 0) return 0.0;
  return std::pow(history[k] / history[0], 1.0 / k);
}

SolveReport minres(const LinearMap& op, const LinearMap& precond, const DenseVector& b,
                   DenseVector& x, const SolverConfig& cfg) {
  cfg.validate();
  const Eigen::Index n = b.size();
  SolveReport rep;
  x = DenseVector::Zero(n);
  DenseVector r1 = b, r2 = b, y(n), v(n), w = DenseVector::Zero(n), w1(n), w2 = DenseVector::Zero(n);
  precond(r1, y);
  double beta1 = r1.dot(y);
  if (beta1 < 0.0) throw std::runtime_error("minres: preconditioner is not positive definite");
  beta1 = std::sqrt(beta1);
  rep.history.push_back(beta1);
  if (beta1 == 0.0) {
    rep.converged = true;
    return rep;
  }
  const double stop = (cfg.polish_tol > 0.0 && cfg.polish_tol < cfg.reduction_tol) ? cfg.polish_tol
                                                                                    : cfg.reduction_tol;
  double oldb = 0.0, beta = beta1, dbar = 0.0, epsln = 0.0, phibar = beta1;
  double cs = -1.0, sn = 0.0;
  constexpr double tiny = std::numeric_limits<double>::epsilon();
  for (int itn = 1; itn <= cfg.max_iters; ++itn) {
    v = y / beta;
    op(v, y);
    if (itn >= 2) y -= (beta / oldb) * r1;
    const double alfa = v.dot(y);
    y -= (alfa / beta) * r2;
    r1.swap(r2);
    r2 = y;
    precond(r2, y);
    oldb = beta;
    const double bb = r2.dot(y);
    if (bb < 0.0) throw std::runtime_error("minres: preconditioner is not positive definite");
    beta = std::sqrt(bb);
    const double oldeps = epsln;
    const double delta = cs * dbar + sn * alfa;
    const double gbar = sn * dbar - cs * alfa;
    epsln = sn * beta;
    dbar = -cs * beta;
    const double gamma = std::max(std::hypot(gbar, beta), tiny);
    cs = gbar / gamma;
    sn = beta / gamma;
    const double phi = cs * phibar;
    phibar = sn * phibar;
    w1.swap(w2);
    w2.swap(w);
    w = (v - oldeps * w1 - delta * w2) / gamma;
    x += phi * w;
    rep.history.push_back(phibar);
    if (phibar <= stop * beta1 || beta == 0.0) break;
  }
  const int k = rep.iterations_to(cfg.reduction_tol);
  rep.converged = k >= 0;
  rep.iterations = rep.converged ? k : static_cast<int>(rep.history.size()) - 1;
  if (rep.iterations > 0)
    rep.rho = std::pow(rep.history[rep.iterations] / rep.history[0], 1.0 / rep.iterations);
  return rep;
}

MeanZeroProjector::MeanZeroProjector(const BlockSystem& sys) : areas_(sys.cell_areas) {
  total_area_ = areas_.sum();
  for (int i = 0; i < sys.rp.n; ++i)
    if (sys.mean_zero[i]) {
      networks_.push_back(i);
      offsets_.push_back(sys.layout.p_offset(i));
    }
}

void MeanZeroProjector::apply(DenseVector& x) const {
  const Eigen::Index nc = areas_.size();
  for (int off : offsets_) {
    auto seg = x.segment(off, nc);
    seg.array() -= areas_.dot(seg) / total_area_;
  }
}

void MeanZeroProjector::apply_dual(DenseVector& r) const {
  const Eigen::Index nc = areas_.size();
  for (int off : offsets_) {
    auto seg = r.segment(off, nc);
    seg -= areas_ * (seg.sum() / total_area_);
  }
}

struct BlockPreconditioner::Impl {
  Eigen::SimplicialLLT<ColMatrix> llt_u;
  Eigen::SimplicialLLT<ColMatrix> llt_v;
  DenseMatrix lambda_inv;
  DenseVector areas;
  BlockLayout layout;
  MeanZeroProjector projector;

  explicit Impl(const BlockSystem& sys) : layout(sys.layout), projector(sys) {}
};

BlockPreconditioner::BlockPreconditioner(const BlockSystem& sys, const PreconditionerBlocks& blocks)
    : impl_(std::make_unique<Impl>(sys)) {
  const ColMatrix bu = blocks.bu;
  const ColMatrix bv = blocks.bv;
  impl_->llt_u.compute(bu);
  if (impl_->llt_u.info() != Eigen::Success)
    throw std::runtime_error("factor_preconditioner: displacement block is not SPD");
  impl_->llt_v.compute(bv);
  if (impl_->llt_v.info() != Eigen::Success)
    throw std::runtime_error("factor_preconditioner: flux block is not SPD");
  Eigen::LLT<DenseMatrix> lam(blocks.lambda);
  if (lam.info() != Eigen::Success) throw std::runtime_error("factor_preconditioner: Lambda is not SPD");
  impl_->lambda_inv = lam.solve(DenseMatrix::Identity(blocks.lambda.rows(), blocks.lambda.cols()));
  impl_->areas = blocks.cell_areas;
}

BlockPreconditioner::~BlockPreconditioner() = default;
BlockPreconditioner::BlockPreconditioner(BlockPreconditioner&&) noexcept = default;

void BlockPreconditioner::apply_unprojected(const DenseVector& r, DenseVector& z) const {
  const Impl& m = *impl_;
  const BlockLayout& l = m.layout;
  z.resize(r.size());
  z.head(l.nu) = m.llt_u.solve(r.head(l.nu));
  z.segment(l.v_offset(0), l.v_total()) = m.llt_v.solve(r.segment(l.v_offset(0), l.v_total()));
  const int n = l.n, nc = l.np, p0 = l.p_offset(0);
  Eigen::VectorXd rc(n);
  for (int c = 0; c < nc; ++c) {
    for (int i = 0; i < n; ++i) rc[i] = r[p0 + i * nc + c];
    const Eigen::VectorXd zc = m.lambda_inv * rc / m.areas[c];
    for (int i = 0; i < n; ++i) z[p0 + i * nc + c] = zc[i];
  }
}

void BlockPreconditioner::apply(const DenseVector& r, DenseVector& z) const {
  if (!impl_->projector.active()) {
    apply_unprojected(r, z);
    return;
  }
  DenseVector rp = r;
  impl_->projector.apply_dual(rp);
  apply_unprojected(rp, z);
  impl_->projector.apply(z);
}

BlockPreconditioner factor_preconditioner(const BlockSystem& sys, const PreconditionerBlocks& blocks) {
  return BlockPreconditioner(sys, blocks);
}

MinresResult minres_solve(const BlockSystem& sys, const BlockPreconditioner& pre,
                          const DenseVector& rhs, const SolverConfig& cfg) {
  if (rhs.size() != sys.size()) throw std::invalid_argument("minres_solve: rhs size mismatch");
  const MeanZeroProjector proj(sys);
  const ExecPolicy policy = cfg.policy;
  LinearMap op = [&](const DenseVector& in, DenseVector& out) {
    out.resize(in.size());
    if (!proj.active()) {
      spmv(sys.matrix, in.data(), out.data(), policy);
      return;
    }
    DenseVector t = in;
    proj.apply(t);
    spmv(sys.matrix, t.data(), out.data(), policy);
    proj.apply_dual(out);
  };
  LinearMap prec = [&](const DenseVector& in, DenseVector& out) { pre.apply(in, out); };
  DenseVector b = rhs;
  proj.apply_dual(b);
  MinresResult res;
  res.report = minres(op, prec, b, res.x, cfg);
  if (cfg.polish_tol > 0.0) {
    SolverConfig inner = cfg;
    inner.reduction_tol = cfg.polish_tol;
    inner.polish_tol = 0.0;
    DenseVector r(b.size()), d, z;
    double last = std::numeric_limits<double>::infinity();
    for (int pass = 0; pass < cfg.refine_passes; ++pass) {
      op(res.x, r);
      r = b - r;
      prec(r, z);
      // The B-norm is dominated by the displacement rows, so the pressure
      // rows keep improving below polish_tol; stop only on stagnation.
      const double now = std::sqrt(std::max(0.0, r.dot(z)));
      if (!(now < 0.5 * last) || now == 0.0) break;
      last = now;
      d = DenseVector::Zero(b.size());
      (void)minres(op, prec, r, d, inner);
      res.x += d;
    }
  }
  proj.apply(res.x);
  return res;
}

DenseVector direct_solve(const BlockSystem& sys, const DenseVector& rhs) {
  const int n = sys.size();
  if (rhs.size() != n) throw std::invalid_argument("direct_solve: rhs size mismatch");
  std::vector<int> borders;
  for (int i = 0; i < sys.rp.n; ++i)
    if (sys.mean_zero[i]) borders.push_back(sys.layout.p_offset(i));
  const int nb = static_cast<int>(borders.size());
  const int nc = sys.layout.np;

  std::vector<Eigen::Triplet<double, int>> t;
  t.reserve(sys.matrix.nonZeros() + 2 * nb * nc);
  for (int r = 0; r < n; ++r)
    for (SparseMatrix::InnerIterator it(sys.matrix, r); it; ++it) t.emplace_back(r, it.col(), it.value());
  for (int k = 0; k < nb; ++k)
    for (int c = 0; c < nc; ++c) {
      t.emplace_back(borders[k] + c, n + k, sys.cell_areas[c]);
      t.emplace_back(n + k, borders[k] + c, sys.cell_areas[c]);
    }
  ColMatrix k(n + nb, n + nb);
  k.setFromTriplets(t.begin(), t.end());

  DenseVector rowmax = DenseVector::Zero(n + nb);
  for (int c = 0; c < k.outerSize(); ++c)
    for (ColMatrix::InnerIterator it(k, c); it; ++it)
      rowmax[it.row()] = std::max(rowmax[it.row()], std::abs(it.value()));
  DenseVector s(n + nb);
  for (int i = 0; i < n + nb; ++i) s[i] = rowmax[i] > 0.0 ? 1.0 / std::sqrt(rowmax[i]) : 1.0;
  ColMatrix ks = s.asDiagonal() * k * s.asDiagonal();
  ks.makeCompressed();

  Eigen::UmfPackLU<ColMatrix> lu;
  // The scaled matrix is structurally symmetric with tiny pressure diagonals;
  // a strict diagonal tolerance delays pivots and multiplies the fill. The
  // refinement passes absorb the weaker pivoting.
  lu.umfpackControl()(UMFPACK_STRATEGY) = UMFPACK_STRATEGY_SYMMETRIC;
  lu.umfpackControl()(UMFPACK_SYM_PIVOT_TOLERANCE) = 1e-6;
  lu.compute(ks);
  if (lu.info() != Eigen::Success) throw std::runtime_error("direct_solve: factorization failed");

  DenseVector b = DenseVector::Zero(n + nb);
  b.head(n) = rhs;
  DenseVector x = DenseVector::Zero(n + nb);
  for (int pass = 0; pass < 3; ++pass) {
    const DenseVector r = b - k * x;
    const DenseVector sr = s.cwiseProduct(r);
    const DenseVector dy = lu.solve(sr);
    x += s.cwiseProduct(dy);
  }
  return x.head(n);
}

DenseMatrix mean_zero_basis(const BlockSystem& sys) {
  const int n = sys.size(), nc = sys.layout.np;
  int removed = 0;
  for (int i = 0; i < sys.rp.n; ++i) removed += sys.mean_zero[i] ? 1 : 0;
  DenseMatrix z = DenseMatrix::Zero(n, n - removed);
  int col = 0;
  for (int r = 0; r < n; ++r) {
    int net = -1;
    for (int i = 0; i < sys.rp.n; ++i)
      if (sys.mean_zero[i] && r >= sys.layout.p_offset(i) && r < sys.layout.p_offset(i) + nc) net = i;
    if (net < 0) {
      z(r, col++) = 1.0;
      continue;
    }
    const int off = sys.layout.p_offset(net);
    const int last = off + nc - 1;
    if (r == last) continue;
    // e_c - (w_c / w_last) e_last lies in the zero-mean hyperplane.
    z(r, col) = 1.0;
    z(last, col) = -sys.cell_areas[r - off] / sys.cell_areas[nc - 1];
    ++col;
  }
  return z;
}

ConditionReport condition_diagnostic(const BlockSystem& sys, const PreconditionerBlocks& blocks,
                                     int max_dofs) {
  const int n = sys.size();
  if (n > max_dofs)
    throw std::invalid_argument("condition_diagnostic: " + std::to_string(n) + " dofs exceed the limit " +
                                std::to_string(max_dofs));
  const DenseMatrix a = DenseMatrix(sys.matrix);
  DenseMatrix b = DenseMatrix::Zero(n, n);
  const BlockLayout& l = sys.layout;
  b.topLeftCorner(l.nu, l.nu) = DenseMatrix(blocks.bu);
  b.block(l.v_offset(0), l.v_offset(0), l.v_total(), l.v_total()) = DenseMatrix(blocks.bv);
  b.bottomRightCorner(l.n * l.np, l.n * l.np) = DenseMatrix(blocks.bp);

  const DenseMatrix z = mean_zero_basis(sys);
  DenseMatrix az = z.transpose() * a * z;
  DenseMatrix bz = z.transpose() * b * z;
  // Diagonal scaling leaves the pencil's eigenvalues unchanged and evens out
  // the block magnitudes before the Cholesky step.
  const DenseVector d = bz.diagonal().cwiseSqrt().cwiseInverse();
  az = d.asDiagonal() * az * d.asDiagonal();
  bz = d.asDiagonal() * bz * d.asDiagonal();
  az = 0.5 * (az + az.transpose()).eval();
  bz = 0.5 * (bz + bz.transpose()).eval();

  Eigen::GeneralizedSelfAdjointEigenSolver<DenseMatrix> es(az, bz, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw std::runtime_error("condition_diagnostic: eigensolve failed");
  const DenseVector ev = es.eigenvalues();
  ConditionReport rep;
  rep.dimension = static_cast<int>(ev.size());
  rep.min_eig = ev.minCoeff();
  rep.max_eig = ev.maxCoeff();
  rep.min_abs = ev.cwiseAbs().minCoeff();
  rep.max_abs = ev.cwiseAbs().maxCoeff();
  rep.kappa = rep.max_abs / rep.min_abs;
  return rep;
}

DenseVector backward_euler_rhs(const BlockSystem& sys, const ModelParameters& mp,
                               const TransientSources& src, double t, const DenseVector& prev) {
  const int n = sys.rp.n;
  const double two_mu = 2.0 * mp.mu;
  ProblemData data;
  if (src.f) data.f = [&](const Vec2& x) -> Vec2 { return src.f(t, x) / two_mu; };
  if (!src.g.empty()) {
    if (static_cast<int>(src.g.size()) != n)
      throw std::invalid_argument("backward_euler_rhs: expected one source per network");
    data.g.resize(n);
    for (int i = 0; i < n; ++i) {
      if (!src.g[i]) continue;
      const double scale = mp.tau / mp.alpha[i];
      data.g[i] = [&src, i, scale, t](const Vec2& x) { return scale * src.g[i](t, x); };
    }
  }
  DenseVector load = assemble_load(sys, data);
  const int ne = sys.mesh->num_edges(), nc = sys.layout.np;
  const int pu = 2 * ne + n * ne;
  const DenseVector divu = sys.div_u * sys.full_u(prev);
  for (int i = 0; i < n; ++i) {
    const DenseVector p = sys.pressure(i, prev);
    for (int c = 0; c < nc; ++c)
      load[pu + i * nc + c] -= divu[c] + sys.rp.alpha_p[i] * sys.cell_areas[c] * p[c];
  }
  return reduce_load(sys, load);
}

Trajectory backward_euler_drive(const Mesh& mesh, const ModelParameters& mp,
                                const BoundaryConditions& bc, const DenseVector& initial,
                                int steps, const TransientSources& src,
                                const AssemblyConfig& acfg, const SolverConfig& scfg) {
  if (steps < 0) throw std::invalid_argument("backward_euler_drive: steps must be >= 0");
  const RescaledParameters rp = rescale_parameters(mp);
  const BlockSystem sys(mesh, rp, bc, acfg);
  if (initial.size() != sys.size()) throw std::invalid_argument("backward_euler_drive: initial state size mismatch");
  const LambdaMatrices lm = build_lambda_matrices(rp);
  const BlockPreconditioner pre = factor_preconditioner(sys, assemble_preconditioner_blocks(sys, lm));
  Trajectory tr;
  tr.times.push_back(0.0);
  tr.states.push_back(initial);
  for (int k = 1; k <= steps; ++k) {
    const double t = k * mp.tau;
    const DenseVector rhs = backward_euler_rhs(sys, mp, src, t, tr.states.back());
    MinresResult res = minres_solve(sys, pre, rhs, scfg);
    if (!res.report.converged)
      throw std::runtime_error("backward_euler_drive: step " + std::to_string(k) + " did not converge");
    tr.times.push_back(t);
    tr.states.push_back(std::move(res.x));
    tr.reports.push_back(std::move(res.report));
  }
  return tr;
}

}  // namespace mpet
