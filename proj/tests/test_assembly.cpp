#include <gtest/gtest.h>
#include <omp.h>

#include <cmath>
#include <sstream>

#include "mpet/assembly.hpp"
#include "mpet/solver.hpp"

namespace {

using namespace mpet;

const std::vector<BoundarySegment> kAllSides = {BoundarySegment::Bottom, BoundarySegment::Right,
                                                 BoundarySegment::Top, BoundarySegment::Left};

BoundaryConditions pressure_everywhere(int n) {
  BoundaryConditions bc;
  bc.u_dirichlet = kAllSides;
  bc.networks.resize(n);
  for (auto& nb : bc.networks) nb.pressure = kAllSides;
  return bc;
}

DenseMatrix dense(const SparseMatrix& a) { return DenseMatrix(a); }

// Smallest eigenvalue of the pencil (A, B), B SPD.
double min_pencil_eig(const DenseMatrix& a, const DenseMatrix& b) {
  Eigen::GeneralizedSelfAdjointEigenSolver<DenseMatrix> es(a, b);
  return es.eigenvalues().minCoeff();
}

// Discrete inf-sup constant of (div w, q) over the free part of a space
// normed by `gram`, with q mean-zero in P0 normed by the L2 mass.
double inf_sup(const SparseMatrix& div_full, const FreeDofs& free, const SparseMatrix& gram, const Mesh& m) {
  FreeDofs all;
  for (int c = 0; c < m.num_cells(); ++c) {
    all.free.push_back(c);
    all.to_free.push_back(c);
  }
  const DenseMatrix d = dense(extract(div_full, all, free));
  const DenseMatrix s = d * dense(gram).llt().solve(d.transpose());
  DenseVector areas(m.num_cells());
  for (int c = 0; c < m.num_cells(); ++c) areas[c] = m.cell_area(c);
  // Orthonormal basis of the complement of the constants (area weighted).
  Eigen::HouseholderQR<DenseMatrix> qr(areas);
  const DenseMatrix q = qr.householderQ();
  const DenseMatrix z = q.rightCols(m.num_cells() - 1);
  const DenseMatrix mass = areas.asDiagonal();
  return std::sqrt(min_pencil_eig(z.transpose() * s * z, z.transpose() * mass * z));
}

TEST(Assembly, OperatorIsSymmetric) {
  for (int n_net : {1, 2}) {
    const Mesh m = Mesh::structured(4);
    DenseMatrix a = DenseMatrix::Zero(n_net, n_net);
    if (n_net == 2) a(0, 1) = a(1, 0) = 0.7;
    const auto rp = RescaledParameters::direct(100.0, std::vector<double>(n_net, 10.0),
                                               std::vector<double>(n_net, 0.5), a);
    const BlockSystem sys(m, rp, pressure_everywhere(n_net), {});
    const SparseMatrix diff = sys.matrix - SparseMatrix(sys.matrix.transpose());
    EXPECT_LE(diff.coeffs().cwiseAbs().maxCoeff(), 1e-12 * sys.matrix.coeffs().cwiseAbs().maxCoeff());
  }
}

TEST(Assembly, SaddlePointInertia) {
  const Mesh m = Mesh::structured(3);
  const auto rp = RescaledParameters::direct(10.0, {1.0, 100.0}, {0.1, 0.0});
  const BlockSystem sys(m, rp, pressure_everywhere(2), {});
  Eigen::SelfAdjointEigenSolver<DenseMatrix> es(dense(sys.matrix));
  const auto& ev = es.eigenvalues();
  const int positive = static_cast<int>((ev.array() > 0.0).count());
  const int negative = static_cast<int>((ev.array() < 0.0).count());
  EXPECT_EQ(positive, sys.layout.nu + sys.layout.v_total());
  EXPECT_EQ(negative, 2 * sys.layout.np);
}

TEST(Assembly, PreconditionerBlocksAreSpd) {
  const Mesh m = Mesh::structured(4);
  for (double lambda : {1.0, 1e8})
    for (double r_inv : {1.0, 1e8}) {
      const auto rp = RescaledParameters::direct(lambda, {r_inv, 3.0}, {1e-4, 0.0});
      const BlockSystem sys(m, rp, BoundaryConditions::clamped(2), {});
      const PreconditionerBlocks b = assemble_preconditioner_blocks(sys, build_lambda_matrices(rp));
      for (const SparseMatrix* blk : {&b.bu, &b.bv, &b.bp}) {
        const DenseMatrix d = dense(*blk);
        EXPECT_TRUE(d.isApprox(d.transpose(), 1e-13));
        EXPECT_EQ(d.llt().info(), Eigen::Success);
      }
    }
}

// a_h with eta = 10 is coercive in the DG energy norm, uniformly in h.
TEST(Assembly, ElasticityFormCoerciveAtDefaultPenalty) {
  std::vector<double> mins;
  for (int n : {2, 4, 8}) {
    const Mesh m = Mesh::structured(n);
    const auto rp = RescaledParameters::direct(1e-12, {1.0}, {0.0});
    const BlockSystem sys(m, rp, BoundaryConditions::clamped(1), {});
    const SparseMatrix a = extract(sys.a_uu, sys.u_free, sys.u_free);
    const NormGrams g = assemble_norm_grams(sys, build_lambda_matrices(rp));
    mins.push_back(min_pencil_eig(dense(a), dense(g.u)));
  }
  for (double c : mins) EXPECT_GT(c, 0.05);
  EXPECT_LT(std::abs(mins.back() / mins[1] - 1.0), 0.2);
}

TEST(Assembly, InfSupStableUnderRefinement) {
  std::vector<double> beta_u, beta_v;
  for (int n : {4, 8}) {
    const Mesh m = Mesh::structured(n);
    const auto rp = RescaledParameters::direct(1e-12, {1.0}, {0.0});
    const BlockSystem sys(m, rp, BoundaryConditions::clamped(1), {});
    const NormGrams g = assemble_norm_grams(sys, build_lambda_matrices(rp));
    beta_u.push_back(inf_sup(sys.div_u, sys.u_free, g.u, m));
    const SparseMatrix hdiv = extract(sys.rt_mass, sys.v_free[0], sys.v_free[0]) +
                              extract(sys.rt_divdiv, sys.v_free[0], sys.v_free[0]);
    beta_v.push_back(inf_sup(sys.div_v, sys.v_free[0], hdiv, m));
  }
  for (const auto* b : {&beta_u, &beta_v}) {
    EXPECT_GT((*b)[0], 0.1);
    EXPECT_GT((*b)[1], 0.1);
    EXPECT_GT((*b)[1] / (*b)[0], 0.8);
  }
}

TEST(Assembly, SerialAndParallelAreBitwiseEqual) {
  const int saved = omp_get_max_threads();
  omp_set_num_threads(4);
  const Mesh m = Mesh::structured(8);
  const auto rp = RescaledParameters::direct(1e4, {1e2, 5.0}, {1e-4, 1.0});
  AssemblyConfig serial, parallel;
  serial.policy = ExecPolicy::Serial;
  parallel.policy = ExecPolicy::Parallel;
  const BlockSystem s(m, rp, pressure_everywhere(2), serial);
  const BlockSystem p(m, rp, pressure_everywhere(2), parallel);
  omp_set_num_threads(saved);
  ASSERT_EQ(s.matrix.nonZeros(), p.matrix.nonZeros());
  for (Eigen::Index k = 0; k < s.matrix.nonZeros(); ++k) {
    ASSERT_EQ(s.matrix.innerIndexPtr()[k], p.matrix.innerIndexPtr()[k]);
    ASSERT_EQ(s.matrix.valuePtr()[k], p.matrix.valuePtr()[k]);
  }
}

TEST(Kernels, SpmvSerialParallelBitwise) {
  const int saved = omp_get_max_threads();
  omp_set_num_threads(3);
  const Mesh m = Mesh::structured(8);
  const BlockSystem sys(m, RescaledParameters::direct(1.0, {1.0}, {1.0}), pressure_everywhere(1), {});
  const DenseVector x = DenseVector::LinSpaced(sys.size(), -3.0, 1.0).array().cos();
  DenseVector ys(sys.size()), yp(sys.size());
  spmv(sys.matrix, x.data(), ys.data(), ExecPolicy::Serial);
  spmv(sys.matrix, x.data(), yp.data(), ExecPolicy::Parallel);
  omp_set_num_threads(saved);
  for (int i = 0; i < sys.size(); ++i) ASSERT_EQ(ys[i], yp[i]);
  EXPECT_LE((ys - sys.matrix * x).norm(), 1e-12 * ys.norm());
}

TEST(Kernels, AssembleBlocksDropsNegativeIndices) {
  const SparseMatrix a = assemble_blocks(
      2, 2, 3,
      [](int item, LocalBlock& out) {
        out.rows = {item % 2, -1};
        out.cols = {0, 1};
        out.values = DenseMatrix::Constant(2, 2, 1.0 + item);
      },
      ExecPolicy::Serial);
  EXPECT_DOUBLE_EQ(a.coeff(0, 0), 1.0 + 3.0);
  EXPECT_DOUBLE_EQ(a.coeff(1, 1), 2.0);
  EXPECT_EQ(a.nonZeros(), 4);
}

TEST(Assembly, PressureBlockCarriesStorageAndTransfer) {
  const Mesh m = Mesh::structured(2);
  DenseMatrix a = DenseMatrix::Zero(2, 2);
  a(0, 1) = a(1, 0) = 0.25;
  const auto rp = RescaledParameters::direct(1.0, {1.0, 1.0}, {2.0, 0.0}, a);
  const DofMap p(m, SpaceKind::P0);
  const DenseMatrix blk = dense(assemble_pressure_block(rp, p));
  const double area = m.cell_area(0);
  EXPECT_NEAR(blk(0, 0), -(2.0 + 0.25) * area, 1e-15);
  EXPECT_NEAR(blk(0, m.num_cells()), 0.25 * area, 1e-15);
}

TEST(Assembly, MatrixMarketExport) {
  SparseMatrix a(2, 3);
  a.insert(0, 2) = 1.5;
  a.insert(1, 0) = -2.0;
  std::ostringstream os;
  write_matrix_market(os, a);
  std::istringstream is(os.str());
  std::string banner;
  std::getline(is, banner);
  EXPECT_EQ(banner.rfind("%%MatrixMarket", 0), 0u);
  int r = 0, c = 0, nnz = 0;
  is >> r >> c >> nnz;
  EXPECT_EQ(r, 2);
  EXPECT_EQ(c, 3);
  EXPECT_EQ(nnz, 2);
}

TEST(Assembly, ConfigValidation) {
  AssemblyConfig c;
  c.penalty = 0.0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  EXPECT_DOUBLE_EQ(AssemblyConfig{}.jump_penalty(), 5.0);
}

}  // namespace
