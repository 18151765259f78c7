#pragma once

#include <array>
#include <vector>

namespace modeconv {

struct QuadPoint1D {
  double t;  // in [0, 1]
  double w;  // weights sum to 1
};

// Gauss-Legendre rule mapped to [0, 1]; exact for polynomials of degree 2n-1.
std::vector<QuadPoint1D> gauss_legendre(int n);

struct QuadPointTri {
  double xi, eta;  // reference coordinates on {xi, eta >= 0, xi + eta <= 1}
  double w;        // weights sum to 1/2 (reference area)
};

// Six-point symmetric rule, exact for degree 4.
const std::array<QuadPointTri, 6>& triangle_rule_deg4();

// Sixteen-point symmetric rule, exact for degree 8; used for error norms.
const std::array<QuadPointTri, 16>& triangle_rule_deg8();

}  // namespace modeconv
