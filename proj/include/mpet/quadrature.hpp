#pragma once

#include <vector>

#include "mpet/mesh.hpp"

namespace mpet {

/// Gauss-Legendre rule on [0,1]; weights sum to 1.
struct LineQuadrature {
  std::vector<double> points;
  std::vector<double> weights;
};

/// Rule on the reference triangle (0,0),(1,0),(0,1); weights sum to 1/2.
struct TriangleQuadrature {
  std::vector<Vec2> points;
  std::vector<double> weights;
  int degree = 0;
};

/// Exact for polynomials of degree <= `degree`.
LineQuadrature line_quadrature(int degree);

/// Collapsed (Duffy) tensor Gauss rule, exact for total degree <= `degree`.
TriangleQuadrature triangle_quadrature(int degree);

}  // namespace mpet
