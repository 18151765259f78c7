#include "modeconv/design.hpp"

#include <cmath>
#include <json.hpp>
#include <numbers>

#include "modeconv/errors.hpp"
#include "modeconv/modes.hpp"

namespace modeconv {

using std::numbers::pi;

namespace {

void check_omega(double omega) {
  if (!(omega > pi && omega < 2 * pi)) throw ConfigError("omega must lie in (pi, 2 pi)");
}

struct Betas {
  double b1, b2;
};
Betas betas(double omega) { return {omega, std::sqrt(omega * omega - pi * pi)}; }

}  // namespace

Attachments solve_attachments(double omega) {
  check_omega(omega);
  auto [b1, b2] = betas(omega);
  double c = std::sqrt(b2 / (2 * b1));
  return {std::acos(-c) / pi, std::acos(c) / pi};
}

Lengths resonance_lengths(double omega, int m_minus, int m_plus) {
  if (!(omega > 0)) throw ConfigError("omega must be positive");
  if (m_minus < 0 || m_plus < 1) throw ConfigError("need m- >= 0 and m+ >= 1");
  Lengths l{pi * (m_minus + 0.5) / omega, pi * m_plus / omega};
  if (l.minus <= 0.5 || l.plus <= 0.5)
    throw GeometryError("ligament cannot reach symmetry axis");
  return l;
}

AsymptoticConstants gather_constants(ConstantsCache& cache, double omega, const Attachments& y,
                                     const GammaParams& gp, double rho, double L) {
  AsymptoticConstants c;
  c.omega = omega;
  c.y_minus = y.y_minus;
  c.y_plus = y.y_plus;
  CXiResult cx = cache.c_xi(rho, L);
  c.c_xi = cx.value;
  c.c_xi_error = cx.error;
  c.rho = rho;
  c.L = L;
  c.h = gp.h;
  GammaResult gm = cache.gamma(omega, y.y_minus, gp);
  GammaResult gpl = cache.gamma(omega, y.y_plus, gp);
  c.gamma_minus = gm.gamma;
  c.gamma_plus = gpl.gamma;
  c.gamma_error = std::max(gm.error, gpl.error);
  return c;
}

double length_deficit(double epsilon, double c_xi, double re_gamma) {
  if (epsilon == 0.0) return 0.0;
  return epsilon * (std::abs(std::log(epsilon)) / pi + c_xi + re_gamma);
}

double detuning(double omega, double epsilon, double c_xi, double re_gamma, double ell_prime) {
  return omega * (std::abs(std::log(epsilon)) / pi + c_xi + re_gamma + ell_prime);
}

CorrectedLengths corrected_lengths(double omega, int m_minus, int m_plus, double epsilon,
                                   const AsymptoticConstants& c) {
  if (epsilon < 0 || epsilon >= 0.5) throw ConfigError("epsilon must lie in [0, 1/2)");
  CorrectedLengths r;
  r.critical = resonance_lengths(omega, m_minus, m_plus);
  r.deficit_minus = length_deficit(epsilon, c.c_xi, c.gamma_minus.real());
  r.deficit_plus = length_deficit(epsilon, c.c_xi, c.gamma_plus.real());
  r.corrected = {r.critical.minus - r.deficit_minus, r.critical.plus - r.deficit_plus};
  if (std::abs(r.deficit_minus) > 0.2 * r.critical.minus ||
      std::abs(r.deficit_plus) > 0.2 * r.critical.plus)
    r.warnings.push_back("asymptotic regime questionable");
  return r;
}

HalfPrediction predict_half_matrix(double omega, double y, double eta) {
  check_omega(omega);
  if (!(y > 0 && y < 1)) throw ConfigError("attachment ordinate must lie in (0, 1)");
  auto [b1, b2] = betas(omega);
  const double c = std::cos(pi * y);
  const double a = 2 * b1 * c * c / b2;
  const cplx I(0, 1);
  const cplx den = eta + I * (1 + a);
  HalfPrediction p;
  p.R(0, 0) = (eta + I * (a - 1)) / den;
  p.R(0, 1) = p.R(1, 0) = -2.0 * I * c * std::sqrt(2 * b1 / b2) / den;
  p.R(1, 1) = (eta + I * (1 - a)) / den;
  p.a1 = -2.0 / (std::sqrt(b1) * den);
  p.a2 = -2 * std::sqrt(2.0) * c / (std::sqrt(b2) * den);
  return p;
}

DesignSpec make_design(double omega, double epsilon, int m_minus, int m_plus,
                       const AsymptoticConstants& c) {
  Attachments y = solve_attachments(omega);
  CorrectedLengths cl = corrected_lengths(omega, m_minus, m_plus, epsilon, c);
  DesignSpec d;
  d.omega = omega;
  d.epsilon = epsilon;
  d.y_minus = y.y_minus;
  d.y_plus = y.y_plus;
  d.m_minus = m_minus;
  d.m_plus = m_plus;
  d.ell_minus = cl.critical.minus;
  d.ell_plus = cl.critical.plus;
  d.ell_minus_eps = cl.corrected.minus;
  d.ell_plus_eps = cl.corrected.plus;
  d.constants = c;
  d.warnings = cl.warnings;
  return d;
}

WaveguideGeometry design_geometry(const DesignSpec& d, double R) {
  WaveguideGeometry g;
  g.R = R;
  g.ligaments = {{d.y_minus, d.ell_minus_eps, d.epsilon, -1},
                 {d.y_plus, d.ell_plus_eps, d.epsilon, -1}};
  return g;
}

std::string design_to_json(const DesignSpec& d) {
  const auto& c = d.constants;
  nlohmann::json j = {
      {"omega", d.omega},
      {"epsilon", d.epsilon},
      {"y_minus", d.y_minus},
      {"y_plus", d.y_plus},
      {"m_minus", d.m_minus},
      {"m_plus", d.m_plus},
      {"ell_minus", d.ell_minus},
      {"ell_plus", d.ell_plus},
      {"ell_minus_eps", d.ell_minus_eps},
      {"ell_plus_eps", d.ell_plus_eps},
      {"warnings", d.warnings},
      {"constants",
       {{"omega", c.omega},
        {"C_Xi", c.c_xi},
        {"C_Xi_error", c.c_xi_error},
        {"y_minus", c.y_minus},
        {"y_plus", c.y_plus},
        {"Gamma_minus", {c.gamma_minus.real(), c.gamma_minus.imag()}},
        {"Gamma_plus", {c.gamma_plus.real(), c.gamma_plus.imag()}},
        {"Gamma_error", c.gamma_error},
        {"provenance", {{"rho", c.rho}, {"L", c.L}, {"h", c.h}}}}}};
  return j.dump(2);
}

DesignSpec design_from_json(const std::string& text) {
  try {
    auto j = nlohmann::json::parse(text);
    DesignSpec d;
    d.omega = j.at("omega");
    d.epsilon = j.at("epsilon");
    d.y_minus = j.at("y_minus");
    d.y_plus = j.at("y_plus");
    d.m_minus = j.at("m_minus");
    d.m_plus = j.at("m_plus");
    d.ell_minus = j.at("ell_minus");
    d.ell_plus = j.at("ell_plus");
    d.ell_minus_eps = j.at("ell_minus_eps");
    d.ell_plus_eps = j.at("ell_plus_eps");
    d.warnings = j.value("warnings", std::vector<std::string>{});
    const auto& c = j.at("constants");
    auto& k = d.constants;
    k.omega = c.at("omega");
    k.c_xi = c.at("C_Xi");
    k.c_xi_error = c.at("C_Xi_error");
    k.y_minus = c.at("y_minus");
    k.y_plus = c.at("y_plus");
    k.gamma_minus = {c.at("Gamma_minus")[0].get<double>(), c.at("Gamma_minus")[1].get<double>()};
    k.gamma_plus = {c.at("Gamma_plus")[0].get<double>(), c.at("Gamma_plus")[1].get<double>()};
    k.gamma_error = c.at("Gamma_error");
    k.rho = c.at("provenance").at("rho");
    k.L = c.at("provenance").at("L");
    k.h = c.at("provenance").at("h");
    return d;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed design spec: ") + e.what());
  }
}

}  // namespace modeconv
