#include "modeconv/optimizer.hpp"

#include <algorithm>
#include <atomic>
#include <boost/math/tools/toms748_solve.hpp>
#include <cmath>
#include <iomanip>
#include <json.hpp>
#include <limits>
#include <ostream>
#include <sstream>
#include <thread>

#include "modeconv/errors.hpp"

namespace modeconv {

const char* to_string(Targets t) { return t == Targets::Eq13 ? "eq13" : "eq61"; }

Targets parse_targets(const std::string& s) {
  if (s == "eq13") return Targets::Eq13;
  if (s == "eq61") return Targets::Eq61;
  throw ConfigError("unknown target convention '" + s + "' (expected eq13 or eq61)");
}

TargetPair target_matrices(Targets t) {
  Eigen::Matrix2cd X;
  if (t == Targets::Eq13) X << 0, 1, 1, 0;
  else X = Eigen::Matrix2cd::Identity();
  return {X, -X};
}

CostTerms cost_terms(const Eigen::Matrix2cd& RN, const Eigen::Matrix2cd& RD, Targets t) {
  TargetPair tp = target_matrices(t);
  CostTerms c;
  c.n = max_abs(RN - tp.RN);
  c.d = max_abs(RD - tp.RD);
  c.J = std::log(std::max(c.n + c.d, kCostFloor));
  return c;
}

double cost(const Eigen::Matrix2cd& RN, const Eigen::Matrix2cd& RD, Targets t) {
  return cost_terms(RN, RD, t).J;
}

double SweepGrid::lm(int i) const {
  return n_minus == 1 ? lm_min : lm_min + (lm_max - lm_min) * i / (n_minus - 1);
}
double SweepGrid::lp(int j) const {
  return n_plus == 1 ? lp_min : lp_min + (lp_max - lp_min) * j / (n_plus - 1);
}

SweepGrid default_grid(const DesignSpec& d, int n, double half_width) {
  SweepGrid g;
  g.n_minus = g.n_plus = n;
  g.lm_min = d.ell_minus_eps - half_width * d.epsilon;
  g.lm_max = d.ell_minus_eps + half_width * d.epsilon;
  g.lp_min = d.ell_plus_eps - half_width * d.epsilon;
  g.lp_max = d.ell_plus_eps + half_width * d.epsilon;
  g.omega = d.omega;
  g.epsilon = d.epsilon;
  g.y_minus = d.y_minus;
  g.y_plus = d.y_plus;
  return g;
}

Evaluator fem_evaluator(const SweepGrid& grid, const SolverParams& params, double R) {
  return [grid, params, R](double lm, double lp) {
    WaveguideGeometry g;
    g.R = R;
    g.ligaments = {{grid.y_minus, lm, grid.epsilon, -1}, {grid.y_plus, lp, grid.epsilon, -1}};
    HalfPair hp = half_scattering_pair(g, grid.omega, params);
    return TargetPair{hp.N.S.R, hp.D.S.R};
  };
}

namespace {

SweepPoint evaluate(const Evaluator& eval, Targets t, double lm, double lp) {
  SweepPoint p;
  p.lm = lm;
  p.lp = lp;
  try {
    TargetPair m = eval(lm, lp);
    p.RN = m.RN;
    p.RD = m.RD;
    p.cost = cost_terms(m.RN, m.RD, t);
    p.valid = std::isfinite(p.cost.J);
    if (!p.valid) p.error = "non-finite cost";
  } catch (const std::exception& e) {
    p.error = e.what();
  }
  return p;
}

// Golden-section minimization of f on [a, b] down to an interval of width tol.
template <class F>
std::pair<double, double> golden(F&& f, double a, double b, double tol, int& evals) {
  const double g = (std::sqrt(5.0) - 1) / 2;
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = f(c), fd = f(d);
  evals += 2;
  while (b - a > tol) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = f(d);
    }
    ++evals;
  }
  return fc <= fd ? std::pair{c, fc} : std::pair{d, fd};
}

}  // namespace

SweepResult sweep(const SweepGrid& grid, const Evaluator& eval, const SweepOptions& opt) {
  if (grid.n_minus < 1 || grid.n_plus < 1) throw ConfigError("sweep grid needs at least one point");
  SweepResult r;
  r.grid = grid;
  r.targets = opt.targets;
  const int n = grid.n_minus * grid.n_plus;
  r.points.resize(n);

  std::atomic<int> next{0};
  auto worker = [&] {
    for (int k = next++; k < n; k = next++) {
      int i = k / grid.n_plus, j = k % grid.n_plus;
      SweepPoint p = evaluate(eval, opt.targets, grid.lm(i), grid.lp(j));
      p.i = i;
      p.j = j;
      r.points[k] = std::move(p);
    }
  };
  int nt = opt.threads > 0 ? opt.threads : static_cast<int>(std::thread::hardware_concurrency());
  nt = std::clamp(nt, 1, n);
  std::vector<std::thread> pool;
  for (int t = 1; t < nt; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  const SweepPoint* best = nullptr;
  for (const auto& p : r.points) {
    if (!p.valid) {
      std::ostringstream s;
      s << "invalid point (" << p.lm << ", " << p.lp << "): " << p.error;
      r.log.push_back(s.str());
      continue;
    }
    if (!best || p.cost.J < best->cost.J) best = &p;
  }
  if (!best) throw SolverError("no valid sweep point");
  r.grid_best = *best;
  r.best = *best;
  if (!opt.refine) return r;

  // Alternate coordinate searches within one grid step of the current point.
  const double hm = grid.n_minus > 1 ? grid.lm(1) - grid.lm(0) : 0.0;
  const double hp = grid.n_plus > 1 ? grid.lp(1) - grid.lp(0) : 0.0;
  SweepPoint cur = r.best;
  for (int cycle = 0; cycle < opt.max_cycles; ++cycle) {
    double moved = 0.0;
    for (int axis = 0; axis < 2; ++axis) {
      double step = axis == 0 ? hm : hp;
      if (step <= 0) continue;
      double x0 = axis == 0 ? cur.lm : cur.lp;
      auto f = [&](double x) {
        SweepPoint p = axis == 0 ? evaluate(eval, opt.targets, x, cur.lp)
                                 : evaluate(eval, opt.targets, cur.lm, x);
        return p.valid ? p.cost.J : std::numeric_limits<double>::infinity();
      };
      auto [x, fx] = golden(f, x0 - step, x0 + step, opt.tol, r.refine_evaluations);
      if (fx < cur.cost.J) {
        SweepPoint p = axis == 0 ? evaluate(eval, opt.targets, x, cur.lp)
                                 : evaluate(eval, opt.targets, cur.lm, x);
        ++r.refine_evaluations;
        if (p.valid && p.cost.J <= cur.cost.J) {
          moved = std::max(moved, std::abs(x - x0));
          p.i = p.j = -1;
          cur = p;
        }
      }
    }
    if (moved < opt.tol) break;
  }
  r.best = cur;
  std::ostringstream s;
  s << "refinement: " << r.refine_evaluations << " evaluations, J " << r.grid_best.cost.J << " -> "
    << r.best.cost.J;
  r.log.push_back(s.str());
  return r;
}

double peak_half_width(const SweepResult& r) {
  const auto& g = r.grid;
  const int i0 = r.grid_best.i, j0 = r.grid_best.j;
  auto J = [&](int i) { return r.points[i * g.n_plus + j0].cost.J; };
  double edge = std::max(J(0), J(g.n_minus - 1));
  double level = 0.5 * (J(i0) + edge);
  int lo = i0, hi = i0;
  while (lo > 0 && r.points[(lo - 1) * g.n_plus + j0].valid && J(lo - 1) <= level) --lo;
  while (hi < g.n_minus - 1 && r.points[(hi + 1) * g.n_plus + j0].valid && J(hi + 1) <= level) ++hi;
  double h = g.n_minus > 1 ? g.lm(1) - g.lm(0) : 0.0;
  return (hi - lo + 1) * h;
}

void write_landscape_csv(std::ostream& os, const SweepResult& r) {
  os << "ell_minus,ell_plus,J";
  for (const char* m : {"RN", "RD"})
    for (const char* e : {"11", "12", "21", "22"}) os << ',' << m << e << "_re," << m << e << "_im";
  os << '\n' << std::setprecision(12);
  for (const auto& p : r.points) {
    os << p.lm << ',' << p.lp << ',' << (p.valid ? p.cost.J : std::nan(""));
    for (const auto* M : {&p.RN, &p.RD})
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) os << ',' << (*M)(a, b).real() << ',' << (*M)(a, b).imag();
    os << '\n';
  }
}

namespace {
nlohmann::json matrix_json(const Eigen::Matrix2cd& A) {
  nlohmann::json j = nlohmann::json::array();
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) j.push_back({A(a, b).real(), A(a, b).imag()});
  return j;
}
}  // namespace

std::string argmin_json(const SweepResult& r) {
  const auto& g = r.grid;
  int invalid = 0;
  for (const auto& p : r.points) invalid += !p.valid;
  nlohmann::json j = {
      {"targets", to_string(r.targets)},
      {"matrix_distance", "entrywise max modulus"},
      {"omega", g.omega},
      {"epsilon", g.epsilon},
      {"y_minus", g.y_minus},
      {"y_plus", g.y_plus},
      {"grid",
       {{"ell_minus", {g.lm_min, g.lm_max, g.n_minus}}, {"ell_plus", {g.lp_min, g.lp_max, g.n_plus}}}},
      {"invalid_points", invalid},
      {"grid_argmin", {{"ell_minus", r.grid_best.lm}, {"ell_plus", r.grid_best.lp}, {"J", r.grid_best.cost.J}}},
      {"argmin",
       {{"ell_minus", r.best.lm},
        {"ell_plus", r.best.lp},
        {"J", r.best.cost.J},
        {"distance_N", r.best.cost.n},
        {"distance_D", r.best.cost.d},
        {"R_N", matrix_json(r.best.RN)},
        {"R_D", matrix_json(r.best.RD)}}},
      {"refine_evaluations", r.refine_evaluations},
      {"log", r.log}};
  return j.dump(2);
}

PredictionComparison compare_to_prediction(const SweepPoint& argmin, const DesignSpec& d) {
  PredictionComparison c;
  c.observed_minus = d.ell_minus - argmin.lm;
  c.observed_plus = d.ell_plus - argmin.lp;
  c.predicted_minus = d.ell_minus - d.ell_minus_eps;
  c.predicted_plus = d.ell_plus - d.ell_plus_eps;
  c.ratio_minus = c.observed_minus / c.predicted_minus;
  c.ratio_plus = c.observed_plus / c.predicted_plus;
  return c;
}

std::string PredictionComparison::report() const {
  std::ostringstream s;
  s << std::setprecision(6);
  s << "ligament -: observed deficit " << observed_minus << ", predicted " << predicted_minus
    << ", ratio " << ratio_minus << '\n';
  s << "ligament +: observed deficit " << observed_plus << ", predicted " << predicted_plus
    << ", ratio " << ratio_plus << '\n';
  return s.str();
}

double center_resonance(double omega, double y, double epsilon, double l0,
                        const SolverParams& params, Abc abc, double step, double R) {
  auto f = [&](double l) {
    WaveguideGeometry g;
    g.R = R;
    g.ligaments = {{y, l, epsilon, -1}};
    return half_scattering(g, omega, abc, params).S.R(0, 0).imag();
  };
  // Below the resonance Im r11 > 0, above it Im r11 < 0.
  double a = l0, b = l0;
  double fa = f(a), fb = fa;
  for (int k = 0; k < 50 && fa * fb > 0; ++k) {
    if (fa > 0) {
      a = b;
      b += step;
      fa = fb;
      fb = f(b);
    } else {
      b = a;
      a -= step;
      fb = fa;
      fa = f(a);
    }
  }
  if (fa * fb > 0) throw ConvergenceError("resonance not bracketed near " + std::to_string(l0));
  boost::uintmax_t it = 60;
  auto r = boost::math::tools::toms748_solve(f, a, b, fa, fb,
                                             boost::math::tools::eps_tolerance<double>(40), it);
  return 0.5 * (r.first + r.second);
}

}  // namespace modeconv
