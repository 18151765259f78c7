#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <numbers>
#include <type_traits>

#include "modeconv/constants.hpp"
#include "modeconv/errors.hpp"
#include "modeconv/modes.hpp"

using namespace modeconv;
using std::numbers::pi;

namespace {

const double kOmega = 1.5 * pi;

// Independent oracle: image-sum representation of the Neumann Green's function of the
// semi-infinite channel, regular part evaluated at the source point.
cplx gamma_series(double a, double omega) {
  cplx s = cplx(0, 1) / omega;
  for (int n = 1; n <= 400000; ++n) {
    double k = n * pi;
    double c = std::cos(k * a);
    cplx inv_beta = k < omega ? cplx(0, 1) / std::sqrt(omega * omega - k * k)
                              : cplx(1.0 / std::sqrt(k * k - omega * omega));
    s += 2 * c * c * (inv_beta - 1 / k);
  }
  return s - std::log(pi) / pi - std::log(2 * std::sin(pi * a)) / pi;
}

// Conformal-map oracle for the strip/half-plane junction constant.
const double kCXiExact = (1 + std::log(pi / 2)) / pi;

double y_minus() { return std::acos(-std::sqrt(std::sqrt(5.0) / 6)) / pi; }

}  // namespace

TEST_CASE("series oracle reproduces frozen values") {
  CHECK(std::abs(gamma_series(y_minus(), kOmega) - cplx(-0.69340729, 0.42441318)) < 1e-7);
  CHECK(std::abs(gamma_series(0.25, kOmega) - cplx(-0.75620683, 0.49691161)) < 1e-7);
  CHECK(std::abs(gamma_series(0.5, kOmega) - cplx(-0.40243343, 0.21220659)) < 1e-7);
}

TEST_CASE("C_Xi junction constant") {
  static_assert(std::is_same_v<decltype(CXiResult::value), double>);
  CXiResult c = compute_c_xi(5.0, 3.0);
  CHECK(c.flux_residual < 1e-10);
  CHECK(std::abs(c.value - kCXiExact) < 1e-4);
  CHECK(c.error < 1e-4);

  CXiResult d = compute_c_xi(10.0, 6.0);
  CHECK(std::abs(d.value - c.value) < 1e-3);
  CHECK(std::abs(d.value - kCXiExact) < 1e-4);

  CHECK_THROWS_AS(compute_c_xi(4.0, 3.0), ConfigError);
  CHECK_THROWS_AS(solve_c_xi_truncated(5.25, 3.0), ConfigError);
}

TEST_CASE("Gamma against the series oracle") {
  for (double y : {y_minus(), 0.25, 0.5}) {
    CAPTURE(y);
    GammaResult g = compute_gamma(y, kOmega);
    CHECK(std::abs(g.gamma - gamma_series(y, kOmega)) < 1e-4);
    CHECK(g.error < 5e-4);
  }
}

TEST_CASE("Gamma imaginary-part identity and far field on a y grid") {
  ModeBasis basis(kOmega, 2);
  const double b1 = basis.beta(0).real(), b2 = basis.beta(1).real();
  for (int k = 0; k < 9; ++k) {
    double y = 0.14 + 0.09 * k;
    CAPTURE(y);
    GammaResult g = compute_gamma(y, kOmega);
    CHECK(std::abs(g.identity_residual()) < 1e-2);
    CHECK(std::abs(g.identity_residual()) <= 10 * g.error);
    CHECK(std::abs(g.s1 - cplx(0, 1 / std::sqrt(b1))) < 1e-2);
    CHECK(std::abs(g.s2 - cplx(0, std::cos(pi * y) * std::sqrt(2.0) / std::sqrt(b2))) < 1e-2);
  }
  CHECK(gamma_imag_identity(0.5, kOmega) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(gamma_imag_identity(y_minus(), kOmega) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("Gamma symmetry and cutoff independence") {
  GammaResult a = solve_gamma(0.3, kOmega), b = solve_gamma(0.7, kOmega);
  CHECK(std::abs(a.gamma - b.gamma) < 1e-6);
  CHECK(std::abs(a.s2 + b.s2) < 1e-6);

  GammaParams p;
  p.h = 0.025;
  p.local_ratio = 16;
  p.r0 = 0.12;
  GammaResult big = solve_gamma(0.3, kOmega, p);
  p.r0 = 0.06;
  GammaResult small = solve_gamma(0.3, kOmega, p);
  CHECK(std::abs(big.gamma - small.gamma) < 1e-4);
}

TEST_CASE("Gamma input errors") {
  GammaParams p;
  p.r0 = 0.3;
  CHECK_THROWS_WITH_AS(solve_gamma(0.5, kOmega, p), doctest::Contains("cutoff too large"),
                       ConfigError);
  CHECK_THROWS_AS(solve_gamma(0.0, kOmega), ConfigError);
  CHECK_THROWS_AS(solve_gamma(0.5, 2.5 * pi), ConfigError);
}

TEST_CASE("constants cache round trip") {
  auto path = std::filesystem::temp_directory_path() / "modeconv_cache_test.json";
  std::filesystem::remove(path);
  GammaParams p;
  {
    ConstantsCache cache(path.string());
    bool hit = true;
    GammaResult g = cache.gamma(kOmega, 0.5, p, &hit);
    CHECK_FALSE(hit);
    cache.gamma(kOmega, 0.5, p, &hit);
    CHECK(hit);
    CXiResult c;
    c.value = 0.46;
    c.rho = 5;
    c.L = 3;
    cache.put_c_xi(c);
    cache.save();
    CHECK(g.error > 0);
  }
  ConstantsCache again(path.string());
  auto g = again.find_gamma(kOmega, 0.5, p);
  REQUIRE(g);
  CHECK(std::abs(g->gamma - cplx(-0.40243343, 0.21220659)) < 1e-4);
  CHECK_FALSE(again.find_gamma(kOmega, 0.4, p));
  auto c = again.find_c_xi(5, 3);
  REQUIRE(c);
  CHECK(c->value == 0.46);
  std::filesystem::remove(path);
}
