#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

namespace mpet {

using DenseMatrix = Eigen::MatrixXd;
using DenseVector = Eigen::VectorXd;

/// Physical coefficients of the n-network poroelastic model.
///
/// `beta` holds the pairwise transfer coefficients with a zero diagonal; the
/// aggregate transfer of network i is always derived from the off-diagonals.
struct ModelParameters {
  int n = 1;
  double lambda = 1.0;
  double mu = 0.5;
  std::vector<double> alpha;
  std::vector<double> c_p;
  DenseMatrix beta;
  std::vector<double> K;
  double tau = 1.0;

  /// Throws std::invalid_argument naming the first violated bound.
  void validate() const;
};

/// Dimensionless coefficients after division by 2*mu and the alpha-weighted
/// substitution of fluxes and pressures. Everything downstream of the
/// parameter module consumes only this type.
struct RescaledParameters {
  int n = 1;
  double lambda = 1.0;
  std::vector<double> r_inv;    // R_i^{-1}
  std::vector<double> alpha_p;  // storage
  DenseMatrix alpha_ij;         // transfer, symmetric with zero diagonal
  double lambda0 = 1.0;         // max(1, lambda)
  double r = 1.0;               // 1 / max_i R_i^{-1}

  /// Builds directly from dimensionless values (the manufactured Biot tables
  /// are stated this way). An empty `alpha_ij` means no transfer.
  static RescaledParameters direct(double lambda, std::vector<double> r_inv,
                                   std::vector<double> alpha_p,
                                   DenseMatrix alpha_ij = {});

  void validate() const;

  /// alpha_ii = sum_{j != i} alpha_ij
  [[nodiscard]] double aggregate_transfer(int i) const;
};

RescaledParameters rescale_parameters(const ModelParameters& mp);

struct LambdaMatrices {
  DenseMatrix lambda1;  // transfer Laplacian, rows sum to zero
  DenseMatrix lambda2;  // diag(alpha_p)
  DenseMatrix lambda3;  // R * I
  DenseMatrix lambda4;  // all entries 1/lambda0
  DenseMatrix lambda;   // sum of the four parts, SPD
  DenseMatrix lambda_inv;

  [[nodiscard]] int size() const { return static_cast<int>(lambda.rows()); }
  /// Entries gamma_ij of Lambda.
  [[nodiscard]] const DenseMatrix& gamma() const { return lambda; }
  /// Entries of Lambda^{-1}.
  [[nodiscard]] const DenseMatrix& gamma_tilde() const { return lambda_inv; }
};

LambdaMatrices build_lambda_matrices(const RescaledParameters& rp);

/// Inverse of Lambda3 + Lambda4 from the rank-one update formula:
/// diagonal 1/R - 1/(R(R lambda0 + n)), off-diagonal -1/(R(R lambda0 + n)).
DenseMatrix tilde_lambda_inverse_closed_form(int n, double r, double lambda0);
DenseMatrix tilde_lambda_inverse_closed_form(const RescaledParameters& rp);

enum class LambdaForm { Full, Inverse, TransferStorage };

/// x^T M x for M in {Lambda, Lambda^{-1}, Lambda1 + Lambda2}.
double lambda_quadratic_form(const LambdaMatrices& lm, std::span<const double> x,
                             LambdaForm which);

}  // namespace mpet
