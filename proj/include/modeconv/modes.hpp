#pragma once

#include <complex>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

namespace modeconv {

using cplx = std::complex<double>;

// Transverse index n is 0-based: mode n has profile phi_n and constant beta_n.
// Scattering matrices index the two propagating modes 0 and 1.
class ModeBasis {
 public:
  ModeBasis(double omega, int n_modes, double cutoff_tol = 1e-8);

  double omega() const { return omega_; }
  int size() const { return static_cast<int>(betas_.size()); }
  int propagating() const { return n_prop_; }
  bool is_propagating(int n) const { return n >= 0 && n < n_prop_; }
  cplx beta(int n) const { return betas_.at(n); }
  std::span<const cplx> betas() const { return betas_; }

 private:
  double omega_;
  int n_prop_;
  std::vector<cplx> betas_;
};

// beta_n = sqrt(omega^2 - n^2 pi^2), taken with positive imaginary part when evanescent.
std::vector<cplx> propagation_constants(double omega, int n_modes, double cutoff_tol = 1e-8);

// phi_0 = 1, phi_n = sqrt(2) cos(n pi y).
double transverse_profile(int n, double y);

enum class Direction { Forward = 1, Backward = -1 };

// (1/sqrt(beta_n)) e^{+-i beta_n x_rel} phi_n(y) for a propagating mode n.
cplx mode_trace(const ModeBasis& basis, int n, Direction dir, double x_rel, double y);

// Integrals of trace(y) phi_n(y) over (0, 1) for n < basis.size(). The interval is split at
// the breakpoints (sorted, within [0, 1]) and an order-point Gauss rule is used per piece.
std::vector<cplx> project_trace(const ModeBasis& basis, const std::function<cplx(double)>& trace,
                                std::span<const double> breakpoints, int order = 16);

enum class Side { Left, Right };

struct ModeCoefficients {
  Side side = Side::Left;
  double abscissa = 0.0;
  std::optional<int> incident;
  std::vector<cplx> outgoing;    // r_j on the left, t_j on the right (propagating j)
  std::vector<cplx> evanescent;  // raw projections onto phi_n, n >= propagating
  double evanescent_level = 0.0;
  bool contaminated = false;
};

// Converts projections P_n = int u phi_n at x = abscissa into outgoing amplitudes, with
// channels ending at x = -+junction (1/2 for the ligament geometry):
// left (abscissa < -junction): u = w+_i(x + junction) + sum_j r_j w-_j(x + junction) + ...
// right (abscissa > junction): u = sum_j t_j w+_j(x - junction) + ...
ModeCoefficients extract_coefficients(const ModeBasis& basis, std::span<const cplx> projections,
                                      double abscissa, Side side, std::optional<int> incident,
                                      double contamination_tol = 1e-3, double junction = 0.5);

// CSV rows: mode,re,im,abs2,abscissa (mode numbered from 1).
void write_csv_header(std::ostream& os);
void write_csv(std::ostream& os, const ModeCoefficients& c);

}  // namespace modeconv
