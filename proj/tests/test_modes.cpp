#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "modeconv/errors.hpp"
#include "modeconv/modes.hpp"
#include "modeconv/quadrature.hpp"

using namespace modeconv;
using std::numbers::pi;

namespace {
const double kOmega = 1.5 * pi;
}

TEST_CASE("propagation constants at omega = 3 pi / 2") {
  auto b = propagation_constants(kOmega, 4);
  REQUIRE(b.size() == 4);
  CHECK(b[0].real() == doctest::Approx(kOmega).epsilon(1e-15));
  CHECK(b[0].imag() == 0.0);
  CHECK(b[1].real() == doctest::Approx(3.5124074).epsilon(1e-7));
  CHECK(b[1].real() == doctest::Approx(pi * std::sqrt(5.0) / 2).epsilon(1e-14));
  CHECK(b[2].real() == 0.0);
  CHECK(b[2].imag() == doctest::Approx(pi * std::sqrt(7.0) / 2).epsilon(1e-14));
  for (int n = 0; n < 4; ++n) {
    cplx s = b[n] * b[n] + n * n * pi * pi;
    CHECK(std::abs(s - kOmega * kOmega) < 1e-12);
  }
  ModeBasis basis(kOmega, 15);
  CHECK(basis.propagating() == 2);
  for (int n = 2; n < 15; ++n) CHECK(basis.beta(n).imag() > 0.0);
}

TEST_CASE("cut-off wavenumbers are rejected") {
  CHECK_THROWS_AS(propagation_constants(pi, 4), ConfigError);
  CHECK_THROWS_AS(propagation_constants(2 * pi + 1e-12, 4), ConfigError);
  CHECK_THROWS_AS(propagation_constants(kOmega, 1), ConfigError);
  CHECK_THROWS_AS(propagation_constants(-1.0, 4), ConfigError);
  CHECK_NOTHROW(propagation_constants(pi + 1e-3, 4));
}

TEST_CASE("mode traces") {
  ModeBasis basis(kOmega, 4);
  cplx v = mode_trace(basis, 0, Direction::Forward, 0.0, 0.3);
  CHECK(v.real() == doctest::Approx(0.46065886).epsilon(1e-7));
  CHECK(std::abs(mode_trace(basis, 1, Direction::Forward, 0.0, 0.5)) < 1e-15);
  CHECK_THROWS_AS(mode_trace(basis, 2, Direction::Forward, 0.0, 0.5), ConfigError);
  // squared modulus integrates to 1 / beta
  for (int n = 0; n < 2; ++n) {
    auto f = [&](double y) { return cplx(std::norm(mode_trace(basis, n, Direction::Backward, 0.7, y))); };
    double integral = 0.0;
    for (const auto& q : gauss_legendre(20)) integral += q.w * f(q.t).real();
    CHECK(integral == doctest::Approx(1.0 / basis.beta(n).real()).epsilon(1e-13));
  }
}

TEST_CASE("transverse profiles are orthonormal under a 16-point rule") {
  auto rule = gauss_legendre(16);
  for (int m = 0; m < 4; ++m) {
    for (int n = 0; n < 4; ++n) {
      double s = 0.0;
      for (const auto& q : rule) s += q.w * transverse_profile(m, q.t) * transverse_profile(n, q.t);
      CHECK(std::abs(s - (m == n ? 1.0 : 0.0)) <= 1e-12);
    }
  }
}

TEST_CASE("gauss-legendre exactness") {
  for (int n = 1; n <= 12; ++n) {
    auto rule = gauss_legendre(n);
    for (int k = 0; k <= 2 * n - 1; ++k) {
      double s = 0.0;
      for (const auto& q : rule) s += q.w * std::pow(q.t, k);
      CHECK(s == doctest::Approx(1.0 / (k + 1)).epsilon(1e-13));
    }
  }
}

TEST_CASE("triangle rules integrate monomials exactly") {
  auto exact = [](int a, int b) {  // int xi^a eta^b over the reference triangle = a! b! / (a+b+2)!
    return std::tgamma(a + 1) * std::tgamma(b + 1) / std::tgamma(a + b + 3);
  };
  for (int a = 0; a <= 4; ++a)
    for (int b = 0; a + b <= 4; ++b) {
      double s = 0.0;
      for (const auto& q : triangle_rule_deg4()) s += q.w * std::pow(q.xi, a) * std::pow(q.eta, b);
      CHECK(s == doctest::Approx(exact(a, b)).epsilon(1e-12));
    }
  for (int a = 0; a <= 8; ++a)
    for (int b = 0; a + b <= 8; ++b) {
      double s = 0.0;
      for (const auto& q : triangle_rule_deg8()) s += q.w * std::pow(q.xi, a) * std::pow(q.eta, b);
      CHECK(s == doctest::Approx(exact(a, b)).epsilon(1e-11));
    }
}

TEST_CASE("extraction of manufactured traces") {
  ModeBasis basis(kOmega, 6);
  const double R = 1.5, x = -R, xr = x + 0.5;
  SUBCASE("pure incident wave gives zero coefficients") {
    auto tr = [&](double y) { return mode_trace(basis, 0, Direction::Forward, xr, y); };
    auto p = project_trace(basis, tr, {}, 16);
    auto c = extract_coefficients(basis, p, x, Side::Left, 0);
    for (cplx r : c.outgoing) CHECK(std::abs(r) < 1e-13);
  }
  SUBCASE("w+_1 + 0.3 w-_2") {
    auto tr = [&](double y) {
      return mode_trace(basis, 0, Direction::Forward, xr, y) +
             0.3 * mode_trace(basis, 1, Direction::Backward, xr, y);
    };
    auto p = project_trace(basis, tr, {}, 16);
    auto c = extract_coefficients(basis, p, x, Side::Left, 0);
    CHECK(std::abs(c.outgoing[0]) < 1e-12);
    CHECK(std::abs(c.outgoing[1] - 0.3) < 1e-12);
    CHECK_FALSE(c.contaminated);
  }
}

TEST_CASE("round trip for random coefficients and abscissae") {
  ModeBasis basis(kOmega, 6);
  std::mt19937 gen(12345);
  std::uniform_real_distribution<double> U(-1.0, 1.0), RR(0.6, 3.0);
  for (int trial = 0; trial < 50; ++trial) {
    const int inc = trial % 2;
    cplx c0(U(gen), U(gen)), c1(U(gen), U(gen));
    const double R = RR(gen);
    const double xl = -R, xr_rel = xl + 0.5;
    auto left = [&](double y) {
      return mode_trace(basis, inc, Direction::Forward, xr_rel, y) +
             c0 * mode_trace(basis, 0, Direction::Backward, xr_rel, y) +
             c1 * mode_trace(basis, 1, Direction::Backward, xr_rel, y);
    };
    auto cl = extract_coefficients(basis, project_trace(basis, left, {}, 16), xl, Side::Left, inc);
    CHECK(std::abs(cl.outgoing[0] - c0) < 1e-12);
    CHECK(std::abs(cl.outgoing[1] - c1) < 1e-12);

    const double xrgt = R, rel = R - 0.5;
    auto right = [&](double y) {
      return c0 * mode_trace(basis, 0, Direction::Forward, rel, y) +
             c1 * mode_trace(basis, 1, Direction::Forward, rel, y);
    };
    auto cr = extract_coefficients(basis, project_trace(basis, right, {}, 16), xrgt, Side::Right,
                                   std::nullopt);
    CHECK(std::abs(cr.outgoing[0] - c0) < 1e-12);
    CHECK(std::abs(cr.outgoing[1] - c1) < 1e-12);
  }
}

TEST_CASE("evanescent content is flagged and does not leak into propagating coefficients") {
  ModeBasis basis(kOmega, 6);
  const double x = -1.0, xr = x + 0.5;
  const cplx b2 = basis.beta(2);
  auto tr = [&](double y) {
    return mode_trace(basis, 0, Direction::Forward, xr, y) +
           0.2 * std::exp(cplx(0, -1) * b2 * xr) * transverse_profile(2, y);
  };
  auto c = extract_coefficients(basis, project_trace(basis, tr, {}, 16), x, Side::Left, 0);
  CHECK(std::abs(c.outgoing[0]) < 1e-12);
  CHECK(std::abs(c.outgoing[1]) < 1e-12);
  CHECK(c.contaminated);
  CHECK(c.evanescent_level > 1e-3);
}

TEST_CASE("extraction cross-section must lie in the straight channel") {
  ModeBasis basis(kOmega, 4);
  std::vector<cplx> p(4, 0.0);
  CHECK_THROWS_AS(extract_coefficients(basis, p, -0.3, Side::Left, 0), GeometryError);
  CHECK_THROWS_AS(extract_coefficients(basis, p, 0.3, Side::Right, std::nullopt), GeometryError);
}

TEST_CASE("phase consistency between two abscissae") {
  ModeBasis basis(kOmega, 8);
  const cplx r0(0.2, -0.1), r1(-0.4, 0.3), e2(0.5, 0.5);
  auto trace_at = [&](double x) {
    double xr = x + 0.5;
    return [=, &basis](double y) {
      return mode_trace(basis, 1, Direction::Forward, xr, y) +
             r0 * mode_trace(basis, 0, Direction::Backward, xr, y) +
             r1 * mode_trace(basis, 1, Direction::Backward, xr, y) +
             e2 * std::exp(cplx(0, -1) * basis.beta(2) * xr) * transverse_profile(2, y);
    };
  };
  auto a = extract_coefficients(basis, project_trace(basis, trace_at(-1.0), {}, 16), -1.0, Side::Left, 1);
  auto b = extract_coefficients(basis, project_trace(basis, trace_at(-2.0), {}, 16), -2.0, Side::Left, 1);
  for (int j = 0; j < 2; ++j) CHECK(std::abs(a.outgoing[j] - b.outgoing[j]) < 1e-12);
  double decay = std::exp(-std::sqrt(4 * pi * pi - kOmega * kOmega) * 1.0);
  CHECK(b.evanescent_level == doctest::Approx(a.evanescent_level * decay).epsilon(1e-10));
}

TEST_CASE("csv serialization") {
  ModeCoefficients c;
  c.abscissa = -1.5;
  c.outgoing = {cplx(0.5, -0.25), cplx(0.0, 1.0)};
  std::ostringstream os;
  write_csv_header(os);
  write_csv(os, c);
  std::string s = os.str();
  CHECK(s.find("mode,re,im,abs2,abscissa") == 0);
  CHECK(s.find("1,0.5,-0.25,0.3125,-1.5") != std::string::npos);
  CHECK(s.find("2,0,1,1,-1.5") != std::string::npos);
}
