#include "modeconv/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace modeconv {

std::vector<QuadPoint1D> gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n must be positive");
  std::vector<QuadPoint1D> rule(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // recompute derivative at the converged node
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule[i] = {0.5 * (1.0 - x), 0.5 * w};
    rule[n - 1 - i] = {0.5 * (1.0 + x), 0.5 * w};
  }
  return rule;
}

namespace {

template <std::size_t N>
struct TriRuleBuilder {
  std::array<QuadPointTri, N> pts{};
  std::size_t k = 0;
  void centroid(double w) { pts[k++] = {1.0 / 3, 1.0 / 3, 0.5 * w}; }
  void orbit3(double a, double w) {
    double b = 1.0 - 2.0 * a;
    pts[k++] = {a, a, 0.5 * w};
    pts[k++] = {b, a, 0.5 * w};
    pts[k++] = {a, b, 0.5 * w};
  }
  void orbit6(double a, double b, double w) {
    double c = 1.0 - a - b;
    pts[k++] = {a, b, 0.5 * w};
    pts[k++] = {b, a, 0.5 * w};
    pts[k++] = {a, c, 0.5 * w};
    pts[k++] = {c, a, 0.5 * w};
    pts[k++] = {b, c, 0.5 * w};
    pts[k++] = {c, b, 0.5 * w};
  }
};

}  // namespace

const std::array<QuadPointTri, 6>& triangle_rule_deg4() {
  static const auto rule = [] {
    TriRuleBuilder<6> b;
    b.orbit3(0.445948490915965, 0.223381589678011);
    b.orbit3(0.091576213509771, 0.109951743655322);
    return b.pts;
  }();
  return rule;
}

const std::array<QuadPointTri, 16>& triangle_rule_deg8() {
  static const auto rule = [] {
    TriRuleBuilder<16> b;
    b.centroid(0.144315607677787);
    b.orbit3(0.459292588292723, 0.095091634267285);
    b.orbit3(0.170569307751760, 0.103217370534718);
    b.orbit3(0.050547228317031, 0.032458497623198);
    b.orbit6(0.008394777409958, 0.263112829634638, 0.027230314174435);
    return b.pts;
  }();
  return rule;
}

}  // namespace modeconv
