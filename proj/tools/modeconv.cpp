#include <CLI11.hpp>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <json.hpp>

#include "modeconv/config.hpp"
#include "modeconv/constants.hpp"
#include "modeconv/design.hpp"
#include "modeconv/errors.hpp"
#include "modeconv/optimizer.hpp"
#include "modeconv/scattering.hpp"
#include "modeconv/vtk.hpp"

namespace fs = std::filesystem;
using namespace modeconv;
using nlohmann::json;

namespace {

constexpr int kInvariantFailure = 2;
constexpr double kTol = 1e-3;

struct Flags {
  std::string config, out, grid, abc, targets;
  bool override_range = false;
  bool mismatch = false;
};

RunConfig load(const Flags& f) {
  RunConfig c = f.config.empty() ? RunConfig{} : load_config(f.config);
  if (!f.out.empty()) c.out = f.out;
  if (!f.grid.empty()) c.grid = f.grid;
  if (!f.abc.empty()) c.abc = parse_abc(f.abc);
  if (!f.targets.empty()) c.targets = parse_targets(f.targets);
  if (f.override_range) c.override_range = true;
  validate(c);
  fs::create_directories(c.out);
  return c;
}

std::ofstream open_out(const RunConfig& c, const std::string& name) {
  std::ofstream os(fs::path(c.out) / name);
  if (!os) throw ConfigError("cannot write " + (fs::path(c.out) / name).string());
  return os;
}

json matrix_json(const Eigen::Matrix2cd& A) {
  json j = json::array();
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) j.push_back({A(a, b).real(), A(a, b).imag()});
  return j;
}

DesignSpec design_for(const RunConfig& c, ConstantsCache& cache) {
  Attachments y = solve_attachments(c.omega);
  AsymptoticConstants k = gather_constants(cache, c.omega, y, c.gamma_params());
  cache.save();
  return make_design(c.omega, c.epsilon, c.m_minus, c.m_plus, k);
}

WaveguideGeometry geometry_for(const RunConfig& c) {
  WaveguideGeometry g;
  g.R = c.R;
  if (c.auto_ligaments) {
    ConstantsCache cache(c.cache_path());
    g = design_geometry(design_for(c, cache), c.R);
  } else {
    g.ligaments = c.ligaments;
  }
  return g;
}

bool energy_ok(const ScatteringMatrices& S, std::ostream& os) {
  bool ok = true;
  for (int i = 0; i < 2; ++i) {
    bool pass = std::abs(S.energy[i] - 1) <= kTol;
    ok = ok && pass;
    os << std::setprecision(10) << "  energy row " << i + 1 << " (" << to_string(S.kind) << "): " << S.energy[i]
       << (pass ? "  PASS" : "  FAIL") << '\n';
  }
  return ok;
}

int cmd_constants(const Flags& f) {
  RunConfig c = load(f);
  ConstantsCache cache(c.cache_path());
  Attachments y = solve_attachments(c.omega);
  bool hit = false;
  CXiResult cx = cache.c_xi(5.0, 3.0, &hit);
  std::cout << "C_Xi = " << cx.value << " +- " << cx.error << (hit ? "  (cached)" : "") << '\n';
  bool ok = true;
  for (auto [name, yy] : {std::pair{"-", y.y_minus}, std::pair{"+", y.y_plus}}) {
    GammaResult g = cache.gamma(c.omega, yy, c.gamma_params(), &hit);
    double target = gamma_imag_identity(yy, c.omega);
    bool pass = std::abs(g.identity_residual()) <= 1e-2;
    ok = ok && pass;
    std::cout << "Gamma" << name << " (y = " << yy << ") = " << g.gamma.real() << " + "
              << g.gamma.imag() << "i +- " << g.error << (hit ? "  (cached)" : "") << '\n'
              << "  Im(omega Gamma) = " << c.omega * g.gamma.imag() << ", identity " << target
              << ", residual " << g.identity_residual() << (pass ? "  PASS" : "  FAIL") << '\n';
  }
  cache.save();
  std::cout << "constants written to " << cache.path() << '\n';
  return ok ? 0 : kInvariantFailure;
}

int cmd_design(const Flags& f) {
  RunConfig c = load(f);
  ConstantsCache cache(c.cache_path());
  DesignSpec d = design_for(c, cache);
  open_out(c, "design.json") << design_to_json(d) << '\n';
  std::cout << "y- = " << d.y_minus << ", y+ = " << d.y_plus << '\n'
            << "critical lengths " << d.ell_minus << ", " << d.ell_plus << '\n'
            << "corrected lengths " << d.ell_minus_eps << ", " << d.ell_plus_eps << '\n';
  for (const auto& w : d.warnings) std::cerr << "warning: " << w << '\n';
  return 0;
}

int cmd_solve(const Flags& f) {
  RunConfig c = load(f);
  WaveguideGeometry g = geometry_for(c);
  auto t0 = std::chrono::steady_clock::now();
  g.full = !c.abc;
  ScatteringRun run = c.abc ? half_scattering(g, c.omega, *c.abc, c.solver())
                            : full_scattering(g, c.omega, c.solver());
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const auto& S = run.S;

  {
    auto os = open_out(c, "matrices.csv");
    write_csv_header(os, S);
    write_csv(os, S);
  }
  {
    auto os = open_out(c, "mesh.vtk");
    write_mesh_vtk(os, run.space->mesh());
  }
  for (int m = 0; m < 2; ++m) {
    auto os = open_out(c, "field_mode" + std::to_string(m + 1) + ".vtk");
    write_field_vtk(os, *run.space, run.fields.col(m), "total field, incident mode " + std::to_string(m + 1));
  }

  std::cout << to_string(S.kind) << " problem, " << S.meta.n_dofs << " DOFs, " << secs << " s\n";
  std::cout << "R =\n" << format_matrix(S.R) << '\n';
  if (S.kind == ProblemKind::Full) std::cout << "T =\n" << format_matrix(S.T) << '\n';
  bool ok = energy_ok(S, std::cout);
  if (S.contaminated) std::cout << "  warning: evanescent content above tolerance at a DtN boundary\n";

  json peaks = json::array();
  for (int l = 0; l < static_cast<int>(g.ligaments.size()); ++l)
    for (int m = 0; m < 2; ++m) {
      FieldPeak p = field_peak(run, m, l);
      peaks.push_back({{"ligament", l}, {"incident", m + 1}, {"max_re", p.re}, {"max_im", p.im}, {"max_abs", p.abs}});
    }
  json report = {{"kind", to_string(S.kind)},
                 {"omega", c.omega},
                 {"n_dofs", S.meta.n_dofs},
                 {"seconds", secs},
                 {"R", matrix_json(S.R)},
                 {"T", matrix_json(S.T)},
                 {"energy", S.energy},
                 {"energy_pass", ok},
                 {"residuals", S.residuals},
                 {"rcond", S.rcond},
                 {"contaminated", S.contaminated},
                 {"ligament_peaks", peaks},
                 {"config", json::parse(config_to_json(c))}};
  open_out(c, "report.json") << report.dump(2) << '\n';
  return ok ? 0 : kInvariantFailure;
}

int cmd_sweep(const Flags& f) {
  RunConfig c = load(f);
  ConstantsCache cache(c.cache_path());
  DesignSpec d = design_for(c, cache);
  SweepGrid grid = default_grid(d);
  if (!c.grid.empty()) grid = parse_grid(c.grid, grid);
  SweepOptions opt;
  opt.targets = c.targets;
  opt.threads = c.threads;
  opt.refine = c.refine;
  auto t0 = std::chrono::steady_clock::now();
  SweepResult r = sweep(grid, fem_evaluator(grid, c.solver(), c.R), opt);
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  {
    auto os = open_out(c, "landscape.csv");
    write_landscape_csv(os, r);
  }
  open_out(c, "argmin.json") << argmin_json(r) << '\n';
  PredictionComparison cmp = compare_to_prediction(r.best, d);
  std::cout << "sweep " << grid.n_minus << " x " << grid.n_plus << " in " << secs << " s\n"
            << "argmin ell- = " << r.best.lm << ", ell+ = " << r.best.lp << ", J = " << r.best.cost.J
            << '\n'
            << cmp.report();
  for (const auto& l : r.log)
    if (l.rfind("invalid", 0) == 0) std::cerr << l << '\n';
  return 0;
}

int cmd_verify(const Flags& f) {
  RunConfig c = load(f);
  WaveguideGeometry g = geometry_for(c);
  SolverParams sp = c.solver();
  ScatteringRun full;
  HalfPair hp;
  if (f.mismatch) {
    hp = half_scattering_pair(g, c.omega, sp);
    SolverParams spf = sp;
    spf.mesh.h = sp.mesh.h * 0.8;
    full = full_scattering(g, c.omega, spf);
  } else {
    DecompositionRuns runs = run_decomposition(g, c.omega, sp);
    full = std::move(runs.full);
    hp = std::move(runs.half);
  }

  bool ok = true;
  auto check = [&](const std::string& what, double v) {
    bool pass = v <= kTol;
    ok = ok && pass;
    std::cout << "  " << what << ": " << v << (pass ? "  PASS" : "  FAIL") << '\n';
  };
  std::cout << "verification battery (tolerance " << kTol << ")\n";
  ok = energy_ok(full.S, std::cout) && ok;
  ok = energy_ok(hp.N.S, std::cout) && ok;
  ok = energy_ok(hp.D.S, std::cout) && ok;
  DecompositionReport dr = verify_decomposition(full.S, hp.N.S, hp.D.S);
  check("||R - (R_N + R_D)/2||", dr.r_residual);
  check("||T - (R_N - R_D)/2||", dr.t_residual);
  check("reciprocity |r12 - r21|", std::abs(full.S.R(0, 1) - full.S.R(1, 0)));
  check("reciprocity |t12 - t21|", std::abs(full.S.T(0, 1) - full.S.T(1, 0)));
  check("reciprocity half N", std::abs(hp.N.S.R(0, 1) - hp.N.S.R(1, 0)));
  check("reciprocity half D", std::abs(hp.D.S.R(0, 1) - hp.D.S.R(1, 0)));
  std::cout << (ok ? "all checks passed\n" : "some checks FAILED\n");
  return ok ? 0 : kInvariantFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Thin-ligament waveguide mode converter: constants, design, solve, sweep, verify"};
  app.require_subcommand(1);
  Flags f;
  app.add_option("--config", f.config, "JSON run configuration");
  app.add_option("--out", f.out, "output directory");
  app.add_option("--grid", f.grid, "sweep grid a:b:n,c:d:m over (ell-, ell+)");
  app.add_option("--abc", f.abc, "half problem with neumann or dirichlet mid-cap condition")
      ->check(CLI::IsMember({"neumann", "dirichlet"}));
  app.add_option("--targets", f.targets, "cost targets")->check(CLI::IsMember({"eq13", "eq61"}));
  app.add_flag("--override-range", f.override_range, "allow omega outside (pi, 2 pi)");

  int (*handler)(const Flags&) = nullptr;
  app.add_subcommand("constants", "compute and cache C_Xi and Gamma(y+-)")->fallthrough()
      ->callback([&] { handler = cmd_constants; });
  app.add_subcommand("design", "closed-form design recipe")->fallthrough()
      ->callback([&] { handler = cmd_design; });
  app.add_subcommand("solve", "scattering matrices, fields and run report")->fallthrough()
      ->callback([&] { handler = cmd_solve; });
  app.add_subcommand("sweep", "cost landscape and refined argmin")->fallthrough()
      ->callback([&] { handler = cmd_sweep; });
  auto* verify = app.add_subcommand("verify", "identity, energy and reciprocity battery");
  verify->fallthrough()->callback([&] { handler = cmd_verify; });
  verify->add_flag("--mismatch", f.mismatch, "solve the full problem on a different mesh");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 3;
  }
  try {
    return handler(f);
  } catch (const IncomparableRunsError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInvariantFailure;
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return 3;
  } catch (const GeometryError& e) {
    std::cerr << "geometry error: " << e.what() << '\n';
    return 3;
  } catch (const SolverError& e) {
    std::cerr << "solver error: " << e.what() << '\n';
    return 4;
  } catch (const ConvergenceError& e) {
    std::cerr << "convergence error: " << e.what() << '\n';
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
