#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "mpet/benchmarks.hpp"
#include "mpet/solver.hpp"

namespace {

using namespace mpet;

TEST(Minres, SolvesIndefiniteDiagonalSystem) {
  const int n = 40;
  DenseVector d(n);
  for (int i = 0; i < n; ++i) d[i] = (i % 2 ? -1.0 : 1.0) * (1.0 + i);
  const DenseVector b = DenseVector::Ones(n);
  DenseVector x = DenseVector::Zero(n);
  SolverConfig cfg;
  cfg.reduction_tol = 1e-12;
  const SolveReport rep = minres([&](const DenseVector& in, DenseVector& out) { out = d.cwiseProduct(in); },
                                 [&](const DenseVector& in, DenseVector& out) { out = in.cwiseQuotient(d.cwiseAbs()); },
                                 b, x, cfg);
  EXPECT_TRUE(rep.converged);
  EXPECT_LE((d.cwiseProduct(x) - b).norm(), 1e-10 * b.norm());
  // Preconditioned spectrum is {+1, -1}: two iterations suffice.
  EXPECT_LE(rep.iterations, 3);
}

TEST(Minres, ResidualHistoryIsMonotone) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> nd;
  const int n = 60;
  DenseMatrix q = DenseMatrix::NullaryExpr(n, n, [&]() { return nd(rng); });
  q = q.householderQr().householderQ();
  DenseVector ev = DenseVector::LinSpaced(n, -5.0, 7.0);
  for (int i = 0; i < n; ++i)
    if (std::abs(ev[i]) < 0.3) ev[i] = 0.3;
  const DenseMatrix a = q * ev.asDiagonal() * q.transpose();
  const DenseVector b = DenseVector::NullaryExpr(n, [&]() { return nd(rng); });
  DenseVector x = DenseVector::Zero(n);
  const SolveReport rep = minres([&](const DenseVector& in, DenseVector& out) { out = a * in; },
                                 [](const DenseVector& in, DenseVector& out) { out = in; }, b, x, {});
  ASSERT_TRUE(rep.converged);
  for (std::size_t k = 1; k < rep.history.size(); ++k) EXPECT_LE(rep.history[k], rep.history[k - 1] * (1 + 1e-12));
  EXPECT_EQ(rep.iterations_to(1e-8), rep.iterations);
  const double f = rep.factor_to(1e-8);
  EXPECT_NEAR(std::pow(f, rep.iterations), rep.history[rep.iterations] / rep.history[0], 1e-12);
}

TEST(Minres, ReportsNonConvergence) {
  const int n = 50;
  const DenseVector d = DenseVector::LinSpaced(n, 1.0, 1e6);
  DenseVector x = DenseVector::Zero(n);
  SolverConfig cfg;
  cfg.max_iters = 3;
  const SolveReport rep = minres([&](const DenseVector& in, DenseVector& out) { out = d.cwiseProduct(in); },
                                 [](const DenseVector& in, DenseVector& out) { out = in; }, DenseVector::Ones(n), x, cfg);
  EXPECT_FALSE(rep.converged);
  EXPECT_EQ(rep.iterations_to(1e-8), -1);
}

TEST(Solver, MinresAgreesWithDirectSolve) {
  const ManufacturedBiot mb{1e2, 1e-4, 1e4};
  const Mesh m = Mesh::structured(8);
  const BlockSystem sys(m, mb.parameters(), BoundaryConditions::clamped(1), {});
  const DenseVector rhs = assemble_rhs(sys, mb.data());
  const DenseVector xd = direct_solve(sys, rhs);
  const auto pre = factor_preconditioner(sys, assemble_preconditioner_blocks(sys, build_lambda_matrices(sys.rp)));
  SolverConfig cfg;
  cfg.reduction_tol = 1e-12;
  const MinresResult mr = minres_solve(sys, pre, rhs, cfg);
  ASSERT_TRUE(mr.report.converged);
  EXPECT_LE((mr.x - xd).norm(), 1e-7 * xd.norm());
  // Both respect the mean-zero constraint of the pressure.
  const DenseVector p = sys.pressure(0, xd);
  EXPECT_NEAR(p.dot(sys.cell_areas), 0.0, 1e-10);
}

TEST(Solver, DirectSolveResidual) {
  const Mesh m = Mesh::structured(4);
  const auto rp = RescaledParameters::direct(1e8, {1e8}, {0.0});
  const BlockSystem sys(m, rp, BoundaryConditions::clamped(1), {});
  DenseVector rhs = DenseVector::LinSpaced(sys.size(), 0.0, 1.0).array().sin();
  MeanZeroProjector(sys).apply_dual(rhs);
  const DenseVector x = direct_solve(sys, rhs);
  DenseVector r = rhs - sys.matrix * x;
  EXPECT_LE(r.norm(), 1e-8 * rhs.norm());
}

TEST(Solver, ProjectorIsIdempotent) {
  const Mesh m = Mesh::structured(3);
  const BlockSystem sys(m, RescaledParameters::direct(1.0, {1.0, 2.0}, {0.0, 0.0}), BoundaryConditions::clamped(2), {});
  const MeanZeroProjector proj(sys);
  ASSERT_TRUE(proj.active());
  DenseVector x = DenseVector::LinSpaced(sys.size(), 1.0, 2.0);
  proj.apply(x);
  DenseVector y = x;
  proj.apply(y);
  EXPECT_LE((x - y).norm(), 1e-14 * x.norm());
  for (int i = 0; i < 2; ++i) EXPECT_NEAR(sys.pressure(i, x).dot(sys.cell_areas), 0.0, 1e-14);
}

TEST(Solver, ConditionDiagnosticSmallForCanonicalPreconditioner) {
  const Mesh m = Mesh::structured(2);
  const auto rp = RescaledParameters::direct(1e4, {1.0}, {1e-4});
  const BlockSystem sys(m, rp, BoundaryConditions::clamped(1), {});
  const ConditionReport rep = condition_diagnostic(sys, assemble_preconditioner_blocks(sys, build_lambda_matrices(rp)));
  EXPECT_GT(rep.min_abs, 0.3);
  EXPECT_LT(rep.max_abs, 2.0);
  EXPECT_NEAR(rep.kappa, rep.max_abs / rep.min_abs, 1e-12 * rep.kappa);
  EXPECT_EQ(rep.dimension, sys.size() - 1);
  EXPECT_THROW(condition_diagnostic(sys, assemble_preconditioner_blocks(sys, build_lambda_matrices(rp)), 10),
               std::invalid_argument);
}

TEST(Solver, BackwardEulerKeepsZeroStateWithoutData) {
  ModelParameters mp;
  mp.n = 1;
  mp.lambda = 2.0;
  mp.mu = 1.0;
  mp.alpha = {1.0};
  mp.c_p = {0.1};
  mp.K = {1.0};
  mp.beta = DenseMatrix::Zero(1, 1);
  BoundaryConditions bc;
  bc.u_dirichlet = {BoundarySegment::Bottom, BoundarySegment::Right, BoundarySegment::Top, BoundarySegment::Left};
  bc.networks.resize(1);
  bc.networks[0].pressure = bc.u_dirichlet;
  const Mesh m = Mesh::structured(4);
  const BlockSystem probe(m, rescale_parameters(mp), bc, {});
  const DenseVector x0 = DenseVector::Zero(probe.size());
  const Trajectory tr = backward_euler_drive(m, mp, bc, x0, 3, {}, {}, {});
  ASSERT_EQ(tr.states.size(), 4u);
  for (const auto& s : tr.states) EXPECT_LE(s.norm(), 1e-14);
}

TEST(Solver, ConfigValidation) {
  SolverConfig c;
  c.reduction_tol = 1.5;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = {};
  c.max_iters = 0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
}

}  // namespace
