#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "modeconv/constants.hpp"
#include "modeconv/fem.hpp"
#include "modeconv/geometry.hpp"

namespace modeconv {

struct Attachments {
  double y_minus = 0.0;  // cos(pi y) < 0
  double y_plus = 0.0;   // cos(pi y) > 0
};

// Ordinates where 2 beta1 cos^2(pi y) / beta2 = 1. Requires pi < omega < 2 pi.
Attachments solve_attachments(double omega);

struct Lengths {
  double minus = 0.0, plus = 0.0;
};

// Critical lengths pi (m- + 1/2) / omega and pi m+ / omega.
Lengths resonance_lengths(double omega, int m_minus, int m_plus);

struct AsymptoticConstants {
  double omega = 0.0;
  double c_xi = 0.0, c_xi_error = 0.0;
  double y_minus = 0.0, y_plus = 0.0;
  cplx gamma_minus, gamma_plus;
  double gamma_error = 0.0;
  double rho = 0.0, L = 0.0, h = 0.0;  // provenance
};

// Pulls C_Xi and Gamma(y+-) from the cache, computing whatever is missing.
AsymptoticConstants gather_constants(ConstantsCache& cache, double omega, const Attachments& y,
                                     const GammaParams& gp = {}, double rho = 5.0, double L = 3.0);

// epsilon (|ln epsilon| / pi + C_Xi + Re Gamma).
double length_deficit(double epsilon, double c_xi, double re_gamma);

struct CorrectedLengths {
  Lengths critical, corrected;
  double deficit_minus = 0.0, deficit_plus = 0.0;
  std::vector<std::string> warnings;
};

CorrectedLengths corrected_lengths(double omega, int m_minus, int m_plus, double epsilon,
                                   const AsymptoticConstants& c);

// omega (|ln epsilon| / pi + C_Xi + Re Gamma + ell'), the resonance detuning.
double detuning(double omega, double epsilon, double c_xi, double re_gamma, double ell_prime);

// Leading-order half-problem reflection matrix for a ligament attached at y, with the
// resonance amplitude for each incident mode. The same expressions hold for the Neumann
// ligament at y- and the Dirichlet ligament at y+.
struct HalfPrediction {
  Eigen::Matrix2cd R;
  cplx a1, a2;  // amplitudes for mode-1 and mode-2 incidence
};
HalfPrediction predict_half_matrix(double omega, double y, double eta = 0.0);

struct DesignSpec {
  double omega = 0.0, epsilon = 0.0;
  double y_minus = 0.0, y_plus = 0.0;
  int m_minus = 1, m_plus = 2;
  double ell_minus = 0.0, ell_plus = 0.0;          // critical
  double ell_minus_eps = 0.0, ell_plus_eps = 0.0;  // corrected
  AsymptoticConstants constants;
  std::vector<std::string> warnings;
};

DesignSpec make_design(double omega, double epsilon, int m_minus, int m_plus,
                       const AsymptoticConstants& c);

// Corrected-length ligaments at y- and y+, both arching downward.
WaveguideGeometry design_geometry(const DesignSpec& d, double R = 1.5);

std::string design_to_json(const DesignSpec& d);
DesignSpec design_from_json(const std::string& text);

}  // namespace modeconv
