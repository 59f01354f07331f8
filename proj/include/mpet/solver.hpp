#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "mpet/assembly.hpp"

namespace mpet {

struct SolverConfig {
  /// Relative reduction of the preconditioner-norm residual that defines
  /// convergence and the reported iteration count.
  double reduction_tol = 1e-8;
  /// When > 0 and smaller than reduction_tol, iterations continue to this
  /// reduction; the report still counts iterations to reduction_tol.
  double polish_tol = 0.0;
  /// Defect-correction passes after a polished solve: the true residual
  /// b - A x is re-solved with MinRes and added back. The short recurrence
  /// drifts from the true residual, which these passes remove.
  int refine_passes = 0;
  int max_iters = 1000;
  ExecPolicy policy = ExecPolicy::Parallel;

  void validate() const;
};

struct SolveReport {
  int iterations = 0;
  /// ||r_j||_B for j = 0..(iterations performed).
  std::vector<double> history;
  double rho = 0.0;
  bool converged = false;

  /// First j with history[j] <= tol * history[0]; -1 if never reached.
  [[nodiscard]] int iterations_to(double tol) const;
  /// (history[k] / history[0])^(1/k) for k = iterations_to(tol).
  [[nodiscard]] double factor_to(double tol) const;
};

using LinearMap = std::function<void(const DenseVector& in, DenseVector& out)>;

/// Preconditioned MinRes (Paige-Saunders recurrence) from a zero initial
/// guess. `precond` must be symmetric positive semidefinite and definite on
/// the range the iteration lives in.
SolveReport minres(const LinearMap& op, const LinearMap& precond, const DenseVector& b,
                   DenseVector& x, const SolverConfig& cfg);

/// Per-network removal of the area-weighted mean. `apply` acts on primal
/// vectors (P), `apply_dual` on residuals (P^T).
class MeanZeroProjector {
 public:
  explicit MeanZeroProjector(const BlockSystem& sys);
  void apply(DenseVector& x) const;
  void apply_dual(DenseVector& r) const;
  [[nodiscard]] bool active() const { return !networks_.empty(); }

 private:
  std::vector<int> networks_;
  std::vector<int> offsets_;
  DenseVector areas_;
  double total_area_ = 0.0;
};

/// Exact block-diagonal Riesz map: sparse Cholesky for the displacement and
/// flux blocks, cellwise Lambda^{-1} for pressures, wrapped by the projector.
class BlockPreconditioner {
 public:
  BlockPreconditioner(const BlockSystem& sys, const PreconditionerBlocks& blocks);
  ~BlockPreconditioner();
  BlockPreconditioner(BlockPreconditioner&&) noexcept;

  /// z = P B^{-1} P^T r
  void apply(const DenseVector& r, DenseVector& z) const;
  /// z = B^{-1} r without projection.
  void apply_unprojected(const DenseVector& r, DenseVector& z) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Factors the three blocks; throws std::runtime_error if one is not SPD.
BlockPreconditioner factor_preconditioner(const BlockSystem& sys, const PreconditionerBlocks& blocks);

struct MinresResult {
  DenseVector x;
  SolveReport report;
};

/// MinRes on P^T A P x = P^T b with the block preconditioner.
MinresResult minres_solve(const BlockSystem& sys, const BlockPreconditioner& pre,
                          const DenseVector& rhs, const SolverConfig& cfg);

/// Sparse LU (UMFPACK) of the system bordered by one mean-value multiplier
/// per mean-zero network, with symmetric scaling and three refinement steps.
DenseVector direct_solve(const BlockSystem& sys, const DenseVector& rhs);

struct ConditionReport {
  double kappa = 0.0;
  double min_abs = 0.0;
  double max_abs = 0.0;
  double min_eig = 0.0;
  double max_eig = 0.0;
  int dimension = 0;
};

/// Generalized eigenvalues of (A, B) on the mean-zero subspace by dense
/// solve. Throws std::invalid_argument above `max_dofs`.
ConditionReport condition_diagnostic(const BlockSystem& sys, const PreconditionerBlocks& blocks,
                                     int max_dofs = 3000);

/// Dense basis (columns) of the free space with every mean-zero network
/// constrained; the identity when no network is.
DenseMatrix mean_zero_basis(const BlockSystem& sys);

/// Physical, time-dependent sources.
struct TransientSources {
  std::function<Vec2(double, const Vec2&)> f;
  std::vector<std::function<double(double, const Vec2&)>> g;
};

/// Free right-hand side of one backward-Euler step in rescaled variables:
/// loads f / 2mu and (tau / alpha_i) g_i at time t, then subtracts
/// (div u_prev, q) + alpha_p_i (p_prev_i, q) in every pressure row.
DenseVector backward_euler_rhs(const BlockSystem& sys, const ModelParameters& mp,
                               const TransientSources& src, double t, const DenseVector& prev);

struct Trajectory {
  std::vector<double> times;
  std::vector<DenseVector> states;  // rescaled free vectors, states[0] = initial
  std::vector<SolveReport> reports;
};

/// Repeated static solves with one assembly and one factorization. Boundary
/// data are taken from `bc` (rescaled units) and held fixed in time. Throws
/// std::runtime_error naming the step if a solve does not converge.
Trajectory backward_euler_drive(const Mesh& mesh, const ModelParameters& mp,
                                const BoundaryConditions& bc, const DenseVector& initial,
                                int steps, const TransientSources& src,
                                const AssemblyConfig& acfg, const SolverConfig& scfg);

}  // namespace mpet
