#pragma once

#include <complex>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace modeconv {

using cplx = std::complex<double>;

// Junction constant C_Xi of the strip / half-plane boundary layer: the harmonic Y with
// Neumann walls, Y = x + C_Xi + o(1) along the strip and Y = ln(1/|xi|) / pi + o(1) in the
// half-plane. Computed on the symmetric half [-rho, 0] x [0, rho] U [0, L] x [0, 1/2] with
// Dirichlet far-field data on the box sides and unit flux on the strip cap.
struct CXiParams {
  double max_cell = 0.5;       // coarsest cell size
  double corner_cell = 1.0 / 1024;  // cell size at the re-entrant corner
  double grading = 0.2;        // size growth with distance from the corner
};

struct CXiTruncated {
  double value = 0.0;          // mean(Y on cap) - L
  double flux_residual = 0.0;  // net boundary flux of the discrete solution
  int n_dofs = 0;
};

CXiTruncated solve_c_xi_truncated(double rho, double L, const CXiParams& params = {});

struct CXiResult {
  double value = 0.0;   // Richardson-extrapolated in rho
  double error = 0.0;   // |extrapolated - finest raw estimate|
  double rho = 0.0, L = 0.0;
  double raw_rho = 0.0, raw_2rho = 0.0;
  double flux_residual = 0.0;
  int n_dofs = 0;
};

// Solves at (rho, L) and (2 rho, L) and extrapolates assuming an O(rho^-2) truncation error.
// Throws ConvergenceError when the two raw values disagree by more than max_spread.
CXiResult compute_c_xi(double rho = 5.0, double L = 3.0, const CXiParams& params = {},
                       double max_spread = 0.05);

// Finite part Gamma(y) of the outgoing Neumann Green's function of the semi-infinite
// channel with its source at the point (end wall, y).
struct GammaParams {
  double R = 1.5;          // truncation abscissa of the DtN boundary
  double h = 0.05;         // channel cell size
  double r0 = 0.0;         // cutoff radius; 0 selects min(0.1, 0.4 min(y, 1 - y))
  double local_ratio = 8;  // cell size r0 / local_ratio inside the cutoff zone
  int n_terms = 15;
};

struct GammaResult {
  cplx gamma;
  double error = 0.0;       // difference between two mesh resolutions
  cplx s1, s2;              // far-field amplitudes of w-_1 and w-_2
  double omega = 0.0, y = 0.0, r0 = 0.0, h = 0.0;
  int n_dofs = 0;
  double identity_residual() const;  // Im(omega Gamma) - (1 + 2 beta1 cos^2(pi y) / beta2)
};

// One solve at the given resolution; error is left at 0. For y > 1/2 the mesh is the
// reflection of the mesh built for 1 - y.
GammaResult solve_gamma(double y, double omega, const GammaParams& params = {});

// Solves at h and h/2 (and r0/local_ratio halved) and reports the finer value.
GammaResult compute_gamma(double y, double omega, const GammaParams& params = {});

// Right side of the imaginary-part identity.
double gamma_imag_identity(double y, double omega);

// Persistent store of computed constants, keyed by omega, y and mesh parameters.
class ConstantsCache {
 public:
  ConstantsCache() = default;
  explicit ConstantsCache(std::string path);

  std::optional<GammaResult> find_gamma(double omega, double y, const GammaParams& p) const;
  void put_gamma(const GammaResult& g, const GammaParams& p);
  std::optional<CXiResult> find_c_xi(double rho, double L) const;
  void put_c_xi(const CXiResult& c);

  // Cached or freshly computed; `hit` reports which.
  GammaResult gamma(double omega, double y, const GammaParams& p, bool* hit = nullptr);
  CXiResult c_xi(double rho, double L, bool* hit = nullptr);

  void save() const;
  const std::string& path() const { return path_; }

 private:
  static std::string gamma_key(double omega, double y, const GammaParams& p);
  static std::string c_xi_key(double rho, double L);
  std::string path_;
  std::map<std::string, GammaResult> gammas_;
  std::map<std::string, CXiResult> cxis_;
  mutable std::mutex mu_;
};

}  // namespace modeconv
