#include "mpet/params.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace mpet {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument(what);
}

void check_length(std::size_t got, int n, const char* name) {
  require(got == static_cast<std::size_t>(n),
          std::string(name) + ": expected " + std::to_string(n) + " entries, got " +
              std::to_string(got));
}

void check_transfer_matrix(const DenseMatrix& m, int n, const char* name) {
  require(m.rows() == n && m.cols() == n, std::string(name) + ": must be n x n");
  for (int i = 0; i < n; ++i) {
    require(m(i, i) == 0.0, std::string(name) + ": diagonal must be zero (aggregate is derived)");
    for (int j = 0; j < n; ++j) {
      require(m(i, j) >= 0.0, std::string(name) + ": entries must be nonnegative");
      require(m(i, j) == m(j, i), std::string(name) + ": must be symmetric");
    }
  }
}

}  // namespace

void ModelParameters::validate() const {
  require(n >= 1, "n: network count must be >= 1");
  require(lambda > 0.0, "lambda: must be > 0");
  require(mu > 0.0, "mu: must be > 0");
  require(tau > 0.0, "tau: must be > 0");
  check_length(alpha.size(), n, "alpha");
  check_length(c_p.size(), n, "c_p");
  check_length(K.size(), n, "K");
  for (int i = 0; i < n; ++i) {
    require(alpha[i] > 0.0, "alpha: entries must be > 0");
    require(c_p[i] >= 0.0, "c_p: entries must be >= 0");
    require(K[i] > 0.0, "K: entries must be > 0");
  }
  check_transfer_matrix(beta, n, "beta");
}

RescaledParameters RescaledParameters::direct(double lambda, std::vector<double> r_inv,
                                              std::vector<double> alpha_p,
                                              DenseMatrix alpha_ij) {
  RescaledParameters rp;
  rp.n = static_cast<int>(r_inv.size());
  rp.lambda = lambda;
  rp.r_inv = std::move(r_inv);
  rp.alpha_p = std::move(alpha_p);
  rp.alpha_ij = alpha_ij.size() == 0 ? DenseMatrix::Zero(rp.n, rp.n) : std::move(alpha_ij);
  rp.validate();
  rp.lambda0 = std::max(1.0, rp.lambda);
  rp.r = 1.0 / *std::max_element(rp.r_inv.begin(), rp.r_inv.end());
  return rp;
}

void RescaledParameters::validate() const {
  require(n >= 1, "n: network count must be >= 1");
  require(lambda > 0.0, "lambda: must be > 0");
  check_length(r_inv.size(), n, "r_inv");
  check_length(alpha_p.size(), n, "alpha_p");
  for (int i = 0; i < n; ++i) {
    require(r_inv[i] > 0.0 && std::isfinite(r_inv[i]), "r_inv: entries must be finite and > 0");
    require(alpha_p[i] >= 0.0, "alpha_p: entries must be >= 0");
  }
  check_transfer_matrix(alpha_ij, n, "alpha_ij");
}

double RescaledParameters::aggregate_transfer(int i) const {
  double s = 0.0;
  for (int j = 0; j < n; ++j)
    if (j != i) s += alpha_ij(i, j);
  return s;
}

// Division of the whole system by 2*mu rescales lambda, alpha_i, c_p and tau;
// the flux/pressure substitution then folds alpha_i into every coefficient.
RescaledParameters rescale_parameters(const ModelParameters& mp) {
  mp.validate();
  const double two_mu = 2.0 * mp.mu;
  const double tau = mp.tau / two_mu;
  std::vector<double> a(mp.n), r_inv(mp.n), alpha_p(mp.n);
  for (int i = 0; i < mp.n; ++i) {
    a[i] = mp.alpha[i] / two_mu;
    r_inv[i] = a[i] * a[i] / (tau * mp.K[i]);
    alpha_p[i] = (mp.c_p[i] / two_mu) / (a[i] * a[i]);
  }
  DenseMatrix alpha_ij = DenseMatrix::Zero(mp.n, mp.n);
  for (int i = 0; i < mp.n; ++i)
    for (int j = 0; j < mp.n; ++j)
      if (i != j) alpha_ij(i, j) = tau * mp.beta(i, j) / (a[i] * a[j]);
  // Exact symmetry: the product above can differ in the last bit.
  alpha_ij = 0.5 * (alpha_ij + alpha_ij.transpose()).eval();
  return RescaledParameters::direct(mp.lambda / two_mu, std::move(r_inv), std::move(alpha_p),
                                    std::move(alpha_ij));
}

LambdaMatrices build_lambda_matrices(const RescaledParameters& rp) {
  rp.validate();
  const int n = rp.n;
  LambdaMatrices lm;
  lm.lambda1 = -rp.alpha_ij;
  for (int i = 0; i < n; ++i) lm.lambda1(i, i) = rp.aggregate_transfer(i);
  lm.lambda2 = DenseMatrix::Zero(n, n);
  for (int i = 0; i < n; ++i) lm.lambda2(i, i) = rp.alpha_p[i];
  lm.lambda3 = rp.r * DenseMatrix::Identity(n, n);
  lm.lambda4 = DenseMatrix::Constant(n, n, 1.0 / rp.lambda0);
  lm.lambda = lm.lambda1 + lm.lambda2 + lm.lambda3 + lm.lambda4;

  Eigen::LLT<DenseMatrix> llt(lm.lambda);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("build_lambda_matrices: Lambda is not numerically SPD");
  lm.lambda_inv = llt.solve(DenseMatrix::Identity(n, n));
  lm.lambda_inv = 0.5 * (lm.lambda_inv + lm.lambda_inv.transpose()).eval();
  return lm;
}

DenseMatrix tilde_lambda_inverse_closed_form(int n, double r, double lambda0) {
  if (n < 1 || !(r > 0.0) || !(lambda0 >= 1.0))
    throw std::invalid_argument("tilde_lambda_inverse_closed_form: need n >= 1, R > 0, lambda0 >= 1");
  // The diagonal is written over a common denominator: 1/R - 1/(R(R lambda0 + n))
  // cancels catastrophically for n = 1 and R lambda0 << 1.
  const double denom = r * (r * lambda0 + n);
  DenseMatrix b = DenseMatrix::Constant(n, n, -1.0 / denom);
  b.diagonal().setConstant((r * lambda0 + (n - 1)) / denom);
  return b;
}

DenseMatrix tilde_lambda_inverse_closed_form(const RescaledParameters& rp) {
  return tilde_lambda_inverse_closed_form(rp.n, rp.r, rp.lambda0);
}

double lambda_quadratic_form(const LambdaMatrices& lm, std::span<const double> x,
                             LambdaForm which) {
  if (static_cast<Eigen::Index>(x.size()) != lm.lambda.rows())
    throw std::invalid_argument("lambda_quadratic_form: dimension mismatch");
  const Eigen::Map<const DenseVector> v(x.data(), static_cast<Eigen::Index>(x.size()));
  switch (which) {
    case LambdaForm::Full:
      return v.dot(lm.lambda * v);
    case LambdaForm::Inverse:
      return v.dot(lm.lambda_inv * v);
    case LambdaForm::TransferStorage:
      return v.dot((lm.lambda1 + lm.lambda2) * v);
  }
  return 0.0;
}

}  // namespace mpet
