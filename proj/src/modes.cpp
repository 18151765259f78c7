#include "modeconv/modes.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <string>

#include "modeconv/errors.hpp"
#include "modeconv/quadrature.hpp"

namespace modeconv {

using std::numbers::pi;

std::vector<cplx> propagation_constants(double omega, int n_modes, double cutoff_tol) {
  if (!(omega > 0.0)) throw ConfigError("omega must be positive");
  if (n_modes < 2) throw ConfigError("n_modes must be at least 2");
  for (int n = 1; n <= n_modes + 1; ++n) {
    if (std::abs(omega - n * pi) <= cutoff_tol * std::max(1.0, omega))
      throw ConfigError("cut-off wavenumber: omega is within tolerance of " + std::to_string(n) +
                        " pi");
  }
  std::vector<cplx> betas(n_modes);
  for (int n = 0; n < n_modes; ++n) {
    double k = n * pi;
    // (omega - k)(omega + k) keeps beta_n^2 + k^2 = omega^2 accurate near cut-off
    double d = (omega - k) * (omega + k);
    betas[n] = d > 0 ? cplx(std::sqrt(d), 0.0) : cplx(0.0, std::sqrt(-d));
  }
  return betas;
}

ModeBasis::ModeBasis(double omega, int n_modes, double cutoff_tol)
    : omega_(omega), betas_(propagation_constants(omega, n_modes, cutoff_tol)) {
  n_prop_ = static_cast<int>(std::count_if(betas_.begin(), betas_.end(),
                                           [](cplx b) { return b.imag() == 0.0; }));
}

double transverse_profile(int n, double y) {
  return n == 0 ? 1.0 : std::numbers::sqrt2 * std::cos(n * pi * y);
}

cplx mode_trace(const ModeBasis& basis, int n, Direction dir, double x_rel, double y) {
  if (!basis.is_propagating(n))
    throw ConfigError("mode_trace: mode " + std::to_string(n + 1) + " is not propagating");
  double b = basis.beta(n).real();
  double s = static_cast<int>(dir);
  return std::polar(1.0 / std::sqrt(b), s * b * x_rel) * transverse_profile(n, y);
}

std::vector<cplx> project_trace(const ModeBasis& basis, const std::function<cplx(double)>& trace,
                                std::span<const double> breakpoints, int order) {
  std::vector<double> cuts{0.0};
  for (double b : breakpoints)
    if (b > 0.0 && b < 1.0) cuts.push_back(b);
  cuts.push_back(1.0);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  const auto rule = gauss_legendre(order);
  std::vector<cplx> proj(basis.size(), 0.0);
  for (std::size_t s = 0; s + 1 < cuts.size(); ++s) {
    double a = cuts[s], len = cuts[s + 1] - cuts[s];
    for (const auto& q : rule) {
      double y = a + q.t * len;
      cplx u = trace(y) * (q.w * len);
      for (int n = 0; n < basis.size(); ++n) proj[n] += u * transverse_profile(n, y);
    }
  }
  return proj;
}

ModeCoefficients extract_coefficients(const ModeBasis& basis, std::span<const cplx> projections,
                                      double abscissa, Side side, std::optional<int> incident,
                                      double contamination_tol, double junction) {
  if (static_cast<int>(projections.size()) < basis.propagating())
    throw ConfigError("extract_coefficients: too few projections");
  if (side == Side::Left && !(abscissa < -junction))
    throw GeometryError("extraction cross-section intersects the junction region");
  if (side == Side::Right && !(abscissa > junction))
    throw GeometryError("extraction cross-section intersects the junction region");
  if (incident && (side == Side::Right || !basis.is_propagating(*incident)))
    throw ConfigError("extract_coefficients: invalid incident mode");

  ModeCoefficients c;
  c.side = side;
  c.abscissa = abscissa;
  c.incident = incident;
  const double x_rel = side == Side::Left ? abscissa + junction : abscissa - junction;
  for (int j = 0; j < basis.propagating(); ++j) {
    double b = basis.beta(j).real();
    double sb = std::sqrt(b);
    cplx p = projections[j];
    if (side == Side::Left) {
      if (incident && *incident == j) p -= std::polar(1.0 / sb, b * x_rel);
      c.outgoing.push_back(sb * std::polar(1.0, b * x_rel) * p);
    } else {
      c.outgoing.push_back(sb * std::polar(1.0, -b * x_rel) * p);
    }
  }
  for (std::size_t n = basis.propagating(); n < projections.size(); ++n) {
    c.evanescent.push_back(projections[n]);
    c.evanescent_level = std::max(c.evanescent_level, std::abs(projections[n]));
  }
  c.contaminated = c.evanescent_level > contamination_tol;
  return c;
}

void write_csv_header(std::ostream& os) { os << "mode,re,im,abs2,abscissa\n"; }

void write_csv(std::ostream& os, const ModeCoefficients& c) {
  auto old = os.precision(17);
  for (std::size_t j = 0; j < c.outgoing.size(); ++j) {
    cplx v = c.outgoing[j];
    os << j + 1 << ',' << v.real() << ',' << v.imag() << ',' << std::norm(v) << ',' << c.abscissa
       << '\n';
  }
  os.precision(old);
}

}  // namespace modeconv
