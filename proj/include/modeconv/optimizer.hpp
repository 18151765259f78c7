#pragma once

#include <Eigen/Core>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "modeconv/design.hpp"
#include "modeconv/scattering.hpp"

namespace modeconv {

// eq13: R_N = (0 1; 1 0), R_D = -(0 1; 1 0), the mode-conversion targets.
// eq61: R_N = I, R_D = -I.
enum class Targets { Eq13, Eq61 };

const char* to_string(Targets t);
Targets parse_targets(const std::string& s);

struct TargetPair {
  Eigen::Matrix2cd RN, RD;
};
TargetPair target_matrices(Targets t);

constexpr double kCostFloor = 1e-300;

struct CostTerms {
  double n = 0.0, d = 0.0;  // entrywise-max distances to the targets
  double J = 0.0;           // ln(max(n + d, floor))
};
CostTerms cost_terms(const Eigen::Matrix2cd& RN, const Eigen::Matrix2cd& RD, Targets t);
double cost(const Eigen::Matrix2cd& RN, const Eigen::Matrix2cd& RD, Targets t = Targets::Eq13);

struct SweepGrid {
  double lm_min = 0.0, lm_max = 0.0;
  int n_minus = 41;
  double lp_min = 0.0, lp_max = 0.0;
  int n_plus = 41;
  double omega = 0.0, epsilon = 0.0, y_minus = 0.0, y_plus = 0.0;

  double lm(int i) const;
  double lp(int j) const;
};

// n x n points over +-half_width * epsilon around the corrected lengths.
SweepGrid default_grid(const DesignSpec& d, int n = 41, double half_width = 5.0);

struct SweepPoint {
  int i = 0, j = 0;
  double lm = 0.0, lp = 0.0;
  bool valid = false;
  std::string error;
  Eigen::Matrix2cd RN = Eigen::Matrix2cd::Zero(), RD = Eigen::Matrix2cd::Zero();
  CostTerms cost;
};

// Maps (ell-, ell+) to the pair (R_N, R_D); may throw.
using Evaluator = std::function<TargetPair(double lm, double lp)>;

// Half-problem FEM evaluation on the grid's geometry.
Evaluator fem_evaluator(const SweepGrid& grid, const SolverParams& params, double R = 1.5);

struct SweepOptions {
  Targets targets = Targets::Eq13;
  int threads = 0;        // 0: hardware concurrency
  bool refine = true;     // golden-section refinement of the grid argmin
  double tol = 1e-5;      // length tolerance of the refinement
  int max_cycles = 6;
};

struct SweepResult {
  SweepGrid grid;
  Targets targets = Targets::Eq13;
  std::vector<SweepPoint> points;  // row-major, index i * n_plus + j
  SweepPoint grid_best;
  SweepPoint best;                 // after refinement
  int refine_evaluations = 0;
  std::vector<std::string> log;    // invalid points and refinement notes
};

SweepResult sweep(const SweepGrid& grid, const Evaluator& eval, const SweepOptions& opt = {});

// Width in ell- of the basin J <= (J_min + J_edge) / 2 on the grid row through the argmin,
// where J_edge is the larger of the two row endpoint values.
double peak_half_width(const SweepResult& r);

void write_landscape_csv(std::ostream& os, const SweepResult& r);
std::string argmin_json(const SweepResult& r);

struct PredictionComparison {
  double observed_minus = 0.0, observed_plus = 0.0;    // critical - argmin
  double predicted_minus = 0.0, predicted_plus = 0.0;  // epsilon (|ln eps|/pi + C_Xi + Re Gamma)
  double ratio_minus = 0.0, ratio_plus = 0.0;
  std::string report() const;
};
PredictionComparison compare_to_prediction(const SweepPoint& argmin, const DesignSpec& d);

// Length of a single ligament at y for which the half problem with the given mid-cap
// condition has Im r11 = 0, the centre of the resonance (eta = 0). Searches outward from
// l0 in steps of `step`.
double center_resonance(double omega, double y, double epsilon, double l0,
                        const SolverParams& params, Abc abc = Abc::Neumann, double step = 2e-4,
                        double R = 1.5);

}  // namespace modeconv
