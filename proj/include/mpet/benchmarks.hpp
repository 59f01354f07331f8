#pragma once

#include <array>
#include <string>
#include <vector>

#include "mpet/solver.hpp"

namespace mpet {

/// Smooth single-network solution on the unit square with
/// phi = x^2 (x-1)^2 y^2 (y-1)^2, u = curl(phi), p = 900 phi - 1,
/// v = -R grad p. u and v . n vanish on the boundary and p has zero mean.
/// The network source is the strong-form residual
/// g = -div u - div v - alpha_p p = R lap p - alpha_p p.
struct ManufacturedBiot {
  double r_inv = 1.0;
  double alpha_p = 0.0;
  double lambda = 1.0;

  [[nodiscard]] double phi(const Vec2& x) const;
  [[nodiscard]] Vec2 u(const Vec2& x) const;
  [[nodiscard]] Mat2 grad_u(const Vec2& x) const;
  /// Second derivatives: [k](i, j) = d^2 u_k / dx_i dx_j.
  [[nodiscard]] std::array<Mat2, 2> hess_u(const Vec2& x) const;
  [[nodiscard]] double p(const Vec2& x) const;
  [[nodiscard]] Vec2 grad_p(const Vec2& x) const;
  [[nodiscard]] double lap_p(const Vec2& x) const;
  [[nodiscard]] Vec2 v(const Vec2& x) const;
  [[nodiscard]] double div_v(const Vec2& x) const;
  [[nodiscard]] Vec2 f(const Vec2& x) const;
  [[nodiscard]] double g(const Vec2& x) const;

  [[nodiscard]] RescaledParameters parameters() const;
  [[nodiscard]] ProblemData data() const;
};

/// Exact fields for the error norms; one entry per network in the vectors.
struct ExactSolution {
  VectorFunction u;
  std::function<Mat2(const Vec2&)> grad_u;
  std::function<std::array<Mat2, 2>(const Vec2&)> hess_u;  // optional
  std::vector<VectorFunction> v;
  std::vector<ScalarFunction> div_v;
  std::vector<ScalarFunction> p;
};

ExactSolution exact_solution(const ManufacturedBiot& mb);

struct ErrorNorms {
  double p = 0.0;  // ||p - p_h||_P
  double v = 0.0;  // ||v - v_h||_V
  double u = 0.0;  // ||u - u_h||_{U_h}
};

/// Errors in the parameter-dependent norms by quadrature of the given
/// degree. The displacement norm is grad:grad plus h_e^{-1} tangential
/// jumps on interior and Dirichlet edges plus h_K^2 |u - u_h|_{2,K}^2 plus
/// lambda div-div. u_h is affine per cell, so the second-order term only
/// sees the exact solution (h_K = cell diameter); `include_h2_term = false`
/// drops it and leaves the broken H1 energy.
ErrorNorms compute_error_norms(const BlockSystem& sys, const DenseVector& x,
                               const ExactSolution& exact, const LambdaMatrices& lm,
                               int quad_degree = 10, bool include_h2_term = true);

struct MassBalance {
  double max_abs = 0.0;   // max over cells and networks of |residual|
  double scale = 0.0;     // max magnitude of any single term
  /// max over cells of eps * sum |div entry * coefficient| / |K|: the
  /// residual a solution rounded to double can show even if exact.
  double floor_abs = 0.0;
  [[nodiscard]] double relative() const { return scale > 0.0 ? max_abs / scale : max_abs; }
  [[nodiscard]] double relative_floor() const { return scale > 0.0 ? floor_abs / scale : floor_abs; }
};

/// Cellwise -div u_h - div v_i,h - (alpha_p_i + alpha_ii) p_i,h
/// + sum_j alpha_ij p_j,h - Q_h g_i.
MassBalance check_mass_conservation(const BlockSystem& sys, const DenseVector& x,
                                    const ProblemData& data, int quad_degree = 10);

/// One sweep point of the manufactured single-network tables.
struct BiotPoint {
  double alpha_p = 0.0;
  double lambda = 1.0;
  double r_inv = 1.0;
};

struct BenchmarkResult {
  int n_subdiv = 0;
  double h = 0.0;
  std::vector<double> point;  // experiment-specific sweep coordinates
  bool has_errors = false;
  ErrorNorms errors;
  int iterations = 0;
  double factor = 0.0;
  bool converged = true;
  double mass_residual = 0.0;  // relative
  double mass_floor = 0.0;     // relative rounding floor of the same check
};

struct RunOptions {
  bool errors = true;           // direct solve + error norms
  bool iterations = true;       // preconditioned MinRes
  bool include_h2_term = true;
  bool parallel_sweep = true;   // sweep points run concurrently
  AssemblyConfig assembly;
  SolverConfig solver;
};

/// Every (N, point) pair in row-major order (N outer).
std::vector<BenchmarkResult> run_biot_table(const std::vector<int>& n_list,
                                            const std::vector<BiotPoint>& points,
                                            const RunOptions& opt);

/// Physical data of the two-network cantilever example.
ModelParameters barenblatt_parameters(double k1_factor, double k2_factor, double beta12, double tau = 1.0);
BoundaryConditions barenblatt_boundary();

/// Point = (beta, K2 factor, K1 factor) for every N (N outer, then beta,
/// K2, K1).
std::vector<BenchmarkResult> run_barenblatt(const std::vector<int>& n_list,
                                            const std::vector<double>& k1_factors,
                                            const std::vector<double>& k2_factors,
                                            const std::vector<double>& betas, const RunOptions& opt,
                                            double tau = 1.0);

ModelParameters four_network_parameters(double lambda_factor, double k_factor, double k3_factor,
                                        double tau = 1.0);
BoundaryConditions four_network_boundary();

/// Point = (lambda factor, K factor, K3 factor) for every N.
std::vector<BenchmarkResult> run_four_network(const std::vector<int>& n_list,
                                              const std::vector<double>& lambda_factors,
                                              const std::vector<double>& k_factors,
                                              const std::vector<double>& k3_factors,
                                              const RunOptions& opt, double tau = 1.0);

/// Assemble, solve and measure one static problem. Used by every driver.
BenchmarkResult solve_point(const Mesh& mesh, const RescaledParameters& rp,
                            const BoundaryConditions& bc, const ProblemData& data,
                            const ExactSolution* exact, const RunOptions& opt);

}  // namespace mpet
