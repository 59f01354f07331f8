#include "mpet/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace mpet {

namespace {

// Gauss-Legendre nodes/weights on [-1,1] by Newton iteration on P_m.
void gauss_legendre(int m, std::vector<double>& x, std::vector<double>& w) {
  x.assign(m, 0.0);
  w.assign(m, 0.0);
  for (int i = 0; i < (m + 1) / 2; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (m + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int k = 1; k <= m; ++k) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p2) / k;
      }
      dp = m * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    x[i] = -z;
    x[m - 1 - i] = z;
    w[i] = w[m - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
}

}  // namespace

LineQuadrature line_quadrature(int degree) {
  if (degree < 0) throw std::invalid_argument("line_quadrature: negative degree");
  const int m = degree / 2 + 1;
  std::vector<double> x, w;
  gauss_legendre(m, x, w);
  LineQuadrature q;
  for (int i = 0; i < m; ++i) {
    q.points.push_back(0.5 * (x[i] + 1.0));
    q.weights.push_back(0.5 * w[i]);
  }
  return q;
}

TriangleQuadrature triangle_quadrature(int degree) {
  if (degree < 0) throw std::invalid_argument("triangle_quadrature: negative degree");
  // (x, y) = (a, b (1 - a)) with Jacobian (1 - a): one extra degree in a.
  const int m = (degree + 1) / 2 + 1;
  std::vector<double> x, w;
  gauss_legendre(m, x, w);
  TriangleQuadrature q;
  q.degree = degree;
  for (int i = 0; i < m; ++i) {
    const double a = 0.5 * (x[i] + 1.0);
    for (int j = 0; j < m; ++j) {
      const double b = 0.5 * (x[j] + 1.0);
      q.points.emplace_back(a, b * (1.0 - a));
      q.weights.push_back(0.25 * w[i] * w[j] * (1.0 - a));
    }
  }
  return q;
}

}  // namespace mpet
