#include <gtest/gtest.h>

#include <cmath>

#include "mpet/benchmarks.hpp"

namespace {

using namespace mpet;

constexpr double kFdStep = 1e-4;

// Central second differences; independent of the closed-form derivatives.
Vec2 fd_laplacian(const ManufacturedBiot& mb, const Vec2& x) {
  const Vec2 ex(kFdStep, 0.0), ey(0.0, kFdStep);
  return (mb.u(x + ex) + mb.u(x - ex) + mb.u(x + ey) + mb.u(x - ey) - 4.0 * mb.u(x)) / (kFdStep * kFdStep);
}

Vec2 fd_grad_p(const ManufacturedBiot& mb, const Vec2& x) {
  const Vec2 ex(kFdStep, 0.0), ey(0.0, kFdStep);
  return Vec2(mb.p(x + ex) - mb.p(x - ex), mb.p(x + ey) - mb.p(x - ey)) / (2.0 * kFdStep);
}

double fd_div(const std::function<Vec2(const Vec2&)>& w, const Vec2& x) {
  const Vec2 ex(kFdStep, 0.0), ey(0.0, kFdStep);
  return (w(x + ex).x() - w(x - ex).x() + w(x + ey).y() - w(x - ey).y()) / (2.0 * kFdStep);
}

const std::vector<Vec2> kProbe = {{0.5, 0.5}, {0.2, 0.7}, {0.9, 0.15}, {0.33, 0.41}};

TEST(Manufactured, PointValues) {
  const ManufacturedBiot mb{1.0, 0.0, 1.0};
  // phi(1/2, 1/2) = (1/16)^2.
  EXPECT_NEAR(mb.p({0.5, 0.5}), 900.0 / 256.0 - 1.0, 1e-13);
  EXPECT_NEAR(mb.u({0.5, 0.5}).norm(), 0.0, 1e-15);
  for (const Vec2& x : {Vec2(0.0, 0.3), Vec2(1.0, 0.6), Vec2(0.4, 0.0), Vec2(0.7, 1.0)}) {
    EXPECT_NEAR(mb.u(x).norm(), 0.0, 1e-15);
    EXPECT_NEAR(mb.v(x).norm(), 0.0, 1e-13);
  }
}

TEST(Manufactured, DisplacementIsDivergenceFree) {
  const ManufacturedBiot mb{1.0, 0.0, 1.0};
  for (const Vec2& x : kProbe) {
    EXPECT_NEAR(mb.grad_u(x).trace(), 0.0, 1e-15);
    EXPECT_NEAR(fd_div([&](const Vec2& y) { return mb.u(y); }, x), 0.0, 1e-7);
  }
}

TEST(Manufactured, PressureHasZeroMean) {
  // int_0^1 t^2 (t-1)^2 dt = 1/30, so int phi = 1/900.
  const ManufacturedBiot mb{1.0, 0.0, 1.0};
  const Mesh m = Mesh::structured(16);
  const DofMap p0(m, SpaceKind::P0);
  const DenseVector q = l2_project(p0, [&](const Vec2& x) { return mb.p(x); });
  double mean = 0.0;
  for (int c = 0; c < m.num_cells(); ++c) mean += q[c] * m.cell_area(c);
  EXPECT_NEAR(mean, 0.0, 1e-12);
}

// f and g are the strong-form residuals of the exact fields:
//   f = -div eps(u) - lambda grad div u + grad p = -1/2 lap u + grad p,
//   g = -div u - div v - alpha_p p.
TEST(Manufactured, SourcesMatchStrongFormResidual) {
  for (double r_inv : {1.0, 1e4})
    for (double alpha_p : {0.0, 1e-4, 1.0}) {
      const ManufacturedBiot mb{r_inv, alpha_p, 1e4};
      for (const Vec2& x : kProbe) {
        const Vec2 f_fd = -0.5 * fd_laplacian(mb, x) + fd_grad_p(mb, x);
        EXPECT_NEAR((mb.f(x) - f_fd).norm(), 0.0, 1e-4 * (1.0 + mb.f(x).norm()));
        const double div_v = fd_div([&](const Vec2& y) { return mb.v(y); }, x);
        const double g_fd = -div_v - alpha_p * mb.p(x);
        EXPECT_NEAR(mb.g(x), g_fd, 1e-5 * (1.0 + std::abs(mb.g(x))));
        EXPECT_NEAR(mb.div_v(x), div_v, 1e-5 * (1.0 + std::abs(div_v)));
      }
    }
}

TEST(Manufactured, ErrorsHalveUnderRefinement) {
  RunOptions opt;
  opt.iterations = false;
  const auto res = run_biot_table({8, 16, 32}, {{1e-4, 1e4, 1.0}}, opt);
  ASSERT_EQ(res.size(), 3u);
  for (int k = 1; k < 3; ++k) {
    const ErrorNorms& a = res[k - 1].errors;
    const ErrorNorms& b = res[k].errors;
    EXPECT_NEAR(a.u / b.u, 2.0, 0.15);
    EXPECT_NEAR(a.p / b.p, 2.0, 0.15);
    EXPECT_NEAR(a.v / b.v, 2.0, 0.15);
  }
}

TEST(Manufactured, InterpolantHasSmallError) {
  // The error of the exact solution's own interpolant bounds the discrete
  // error from below; the solver error stays within a modest multiple.
  const ManufacturedBiot mb{1.0, 1e-4, 1.0};
  const Mesh m = Mesh::structured(16);
  const BlockSystem sys(m, mb.parameters(), BoundaryConditions::clamped(1), {});
  const DenseVector x = direct_solve(sys, assemble_rhs(sys, mb.data()));
  const ErrorNorms e = compute_error_norms(sys, x, exact_solution(mb), build_lambda_matrices(sys.rp));
  const DenseVector ui = interpolate_hdiv(sys.u_space, [&](const Vec2& y) { return mb.u(y); });
  const DenseVector vi = interpolate_hdiv(sys.v_space, [&](const Vec2& y) { return mb.v(y); });
  DenseVector pi = l2_project(sys.p_space, [&](const Vec2& y) { return mb.p(y); });
  const DenseVector xi = sys.pack(ui, {vi}, {pi});
  const ErrorNorms ei = compute_error_norms(sys, xi, exact_solution(mb), build_lambda_matrices(sys.rp));
  EXPECT_LT(e.u, 3.0 * ei.u);
  EXPECT_LT(e.v, 3.0 * ei.v);
  EXPECT_LT(ei.p, e.p * 1.0001);
}

TEST(Manufactured, MassConservedPerCell) {
  const ManufacturedBiot mb{1e3, 1e-4, 1e4};
  const Mesh m = Mesh::structured(8);
  const BlockSystem sys(m, mb.parameters(), BoundaryConditions::clamped(1), {});
  const ProblemData data = mb.data();
  const DenseVector x = direct_solve(sys, assemble_rhs(sys, data));
  EXPECT_LE(check_mass_conservation(sys, x, data).relative(), 1e-10);
  // A perturbed state is not conservative.
  DenseVector y = x;
  y[sys.layout.p_offset(0)] += 1e-3;
  EXPECT_GT(check_mass_conservation(sys, y, data).relative(), 1e-8);
}

TEST(Physical, BarenblattRescaledValues) {
  const RescaledParameters rp = rescale_parameters(barenblatt_parameters(1.0, 1.0, 5e-10));
  EXPECT_NEAR(rp.lambda, 0.875, 1e-12);
  EXPECT_NEAR(rp.r_inv[0] / 3.0424e7, 1.0, 1e-3);
  EXPECT_NEAR(rp.r_inv[1] / 1.1029e5, 1.0, 1e-3);
  EXPECT_NEAR(rp.alpha_p[0], 0.28720, 1e-4);
  EXPECT_NEAR(rp.alpha_p[1], 4.66667, 1e-4);
  EXPECT_NEAR(rp.alpha_ij(0, 1), 0.0210526, 1e-6);
}

TEST(Physical, FourNetworkRescaledValues) {
  const RescaledParameters rp = rescale_parameters(four_network_parameters(1.0, 1.0, 1.0));
  EXPECT_EQ(rp.n, 4);
  EXPECT_NEAR(rp.lambda, 505.0 / 432.0, 1e-12);
  EXPECT_NEAR(rp.r_inv[0] / 6.0576e4, 1.0, 1e-3);
  EXPECT_NEAR(rp.r_inv[2] / 1.44228e8, 1.0, 1e-3);
  EXPECT_EQ(rp.r_inv[0], rp.r_inv[1]);
  EXPECT_EQ(rp.r_inv[0], rp.r_inv[3]);
}

TEST(Physical, CantileverBoundaryIsComplete) {
  EXPECT_NO_THROW(barenblatt_boundary().validate(2));
  EXPECT_NO_THROW(four_network_boundary().validate(4));
  EXPECT_THROW(barenblatt_boundary().validate(3), std::invalid_argument);
}

TEST(Sweeps, SerialAndParallelSweepsAgree) {
  RunOptions a;
  a.parallel_sweep = false;
  RunOptions b = a;
  b.parallel_sweep = true;
  const std::vector<BiotPoint> pts = {{1.0, 1.0, 1.0}, {0.0, 1e8, 1e4}};
  const auto ra = run_biot_table({4, 8}, pts, a);
  const auto rb = run_biot_table({4, 8}, pts, b);
  ASSERT_EQ(ra.size(), rb.size());
  for (std::size_t k = 0; k < ra.size(); ++k) {
    EXPECT_EQ(ra[k].n_subdiv, rb[k].n_subdiv);
    EXPECT_EQ(ra[k].point, rb[k].point);
    EXPECT_EQ(ra[k].iterations, rb[k].iterations);
    EXPECT_EQ(ra[k].errors.u, rb[k].errors.u);
    EXPECT_EQ(ra[k].errors.p, rb[k].errors.p);
  }
  EXPECT_EQ(ra[0].n_subdiv, 4);
  EXPECT_EQ(ra[2].n_subdiv, 8);
}

TEST(Sweeps, BarenblattSmallMeshConverges) {
  const auto res = run_barenblatt({4}, {1.0}, {1.0, 1e6}, {5e-10}, {});
  ASSERT_EQ(res.size(), 2u);
  for (const auto& r : res) {
    EXPECT_TRUE(r.converged);
    EXPECT_LT(r.iterations, 60);
    EXPECT_LE(r.mass_residual, 1e-10);
  }
  EXPECT_EQ(res[1].point, (std::vector<double>{5e-10, 1e6, 1.0}));
}

}  // namespace
