#include "modeconv/scattering.hpp"

#include <cmath>
#include <complex>
#include <cstdio>
#include <future>
#include <ostream>
#include <sstream>

#include "modeconv/errors.hpp"
#include "modeconv/modes.hpp"

namespace modeconv {

const char* to_string(ProblemKind kind) {
  switch (kind) {
    case ProblemKind::Full: return "full";
    case ProblemKind::HalfNeumann: return "half_neumann";
    case ProblemKind::HalfDirichlet: return "half_dirichlet";
  }
  return "?";
}

double max_abs(const Eigen::Matrix2cd& A) { return A.cwiseAbs().maxCoeff(); }

namespace {

struct Prepared {
  std::shared_ptr<const FemSpace> space;
  FemMatrices km;
  ModeBasis basis;
  RunMetadata meta;
};

Prepared prepare(const WaveguideGeometry& geom, double omega, const SolverParams& p) {
  if (p.n_terms < 2) throw ConfigError("n_terms must be at least 2");
  ModeBasis basis(omega, p.n_terms);
  if (basis.propagating() != 2)
    throw ConfigError("exactly two propagating modes are required (pi < omega < 2 pi)");
  if (geom.R < geom.junction() + 0.5)
    throw ConfigError("truncation R must exceed the junction by at least 1/2");
  auto mesh = std::make_shared<const Mesh>(build_mesh(geom, p.mesh));
  auto space = std::make_shared<const FemSpace>(mesh);
  RunMetadata meta;
  meta.omega = omega;
  meta.ligaments = geom.ligaments;
  meta.R = geom.R;
  meta.h = p.mesh.h;
  meta.junction_levels = p.mesh.junction_levels;
  meta.n_terms = p.n_terms;
  meta.mesh_fingerprint = mesh->fingerprint;
  meta.n_dofs = space->n_dofs();
  return {space, assemble_stiffness_mass(*space), std::move(basis), std::move(meta)};
}

ScatteringRun run_problem(const Prepared& pr, ProblemKind kind, const SolverParams& p) {
  const FemSpace& space = *pr.space;
  std::vector<DtnOperator> dtns;
  dtns.push_back(make_dtn(space, pr.basis, BoundaryTag::TruncationLeft, p.n_terms));
  if (kind == ProblemKind::Full)
    dtns.push_back(make_dtn(space, pr.basis, BoundaryTag::TruncationRight, p.n_terms));
  Abc abc = kind == ProblemKind::Full          ? Abc::None
            : kind == ProblemKind::HalfNeumann ? Abc::Neumann
                                               : Abc::Dirichlet;
  auto sys = assemble(space, pr.km, pr.basis.omega(), dtns, abc, {0, 1});
  SolveResult sol = solve(sys, p.rcond_min);

  ScatteringRun run;
  run.space = pr.space;
  run.fields = sol.fields;
  ScatteringMatrices& S = run.S;
  S.kind = kind;
  S.meta = pr.meta;
  S.rcond = sol.rcond;
  S.residuals = sol.residuals;
  for (int i = 0; i < 2; ++i) {
    Eigen::VectorXcd u = sol.fields.col(i);
    const double xj = space.mesh().junction;
    auto cl = extract_coefficients(pr.basis, dtns[0].project(u), dtns[0].abscissa, Side::Left, i,
                                   p.contamination_tol, xj);
    S.contaminated = S.contaminated || cl.contaminated;
    for (int j = 0; j < 2; ++j) S.R(i, j) = cl.outgoing[j];
    if (kind == ProblemKind::Full) {
      auto cr = extract_coefficients(pr.basis, dtns[1].project(u), dtns[1].abscissa, Side::Right,
                                     std::nullopt, p.contamination_tol, xj);
      S.contaminated = S.contaminated || cr.contaminated;
      for (int j = 0; j < 2; ++j) S.T(i, j) = cr.outgoing[j];
    }
    S.energy[i] = S.R.row(i).squaredNorm() + S.T.row(i).squaredNorm();
  }
  return run;
}

}  // namespace

ScatteringRun full_scattering(WaveguideGeometry geom, double omega, const SolverParams& params) {
  geom.full = true;
  return run_problem(prepare(geom, omega, params), ProblemKind::Full, params);
}

ScatteringRun half_scattering(WaveguideGeometry geom, double omega, Abc abc,
                              const SolverParams& params) {
  if (abc == Abc::None) throw ConfigError("half problems need a Neumann or Dirichlet condition");
  geom.full = false;
  return run_problem(prepare(geom, omega, params),
                     abc == Abc::Neumann ? ProblemKind::HalfNeumann : ProblemKind::HalfDirichlet,
                     params);
}

HalfPair half_scattering_pair(WaveguideGeometry geom, double omega, const SolverParams& params) {
  geom.full = false;
  Prepared pr = prepare(geom, omega, params);
  auto d = std::async(std::launch::async, [&] { return run_problem(pr, ProblemKind::HalfDirichlet, params); });
  ScatteringRun n = run_problem(pr, ProblemKind::HalfNeumann, params);
  return {std::move(n), d.get()};
}

DecompositionRuns run_decomposition(const WaveguideGeometry& geom, double omega,
                                    const SolverParams& params) {
  auto f = std::async(std::launch::async, [&] { return full_scattering(geom, omega, params); });
  HalfPair hp = half_scattering_pair(geom, omega, params);
  DecompositionRuns r{f.get(), std::move(hp), {}};
  r.report = verify_decomposition(r.full.S, r.half.N.S, r.half.D.S);
  return r;
}

DecompositionReport verify_decomposition(const Eigen::Matrix2cd& R, const Eigen::Matrix2cd& T,
                                         const Eigen::Matrix2cd& RN, const Eigen::Matrix2cd& RD) {
  return {max_abs(R - 0.5 * (RN + RD)), max_abs(T - 0.5 * (RN - RD))};
}

DecompositionReport verify_decomposition(const ScatteringMatrices& full,
                                         const ScatteringMatrices& N,
                                         const ScatteringMatrices& D) {
  if (full.kind != ProblemKind::Full || N.kind != ProblemKind::HalfNeumann ||
      D.kind != ProblemKind::HalfDirichlet)
    throw IncomparableRunsError("expected full, Neumann and Dirichlet runs");
  auto same = [](const RunMetadata& a, const RunMetadata& b, std::string& why) {
    if (a.omega != b.omega) why = "omega differs";
    else if (a.R != b.R) why = "truncation R differs";
    else if (a.h != b.h || a.junction_levels != b.junction_levels) why = "mesh parameters differ";
    else if (a.n_terms != b.n_terms) why = "DtN term counts differ";
    else if (a.ligaments.size() != b.ligaments.size()) why = "ligament counts differ";
    else {
      for (std::size_t k = 0; k < a.ligaments.size(); ++k) {
        const auto &p = a.ligaments[k], &q = b.ligaments[k];
        if (p.y_attach != q.y_attach || p.length != q.length || p.width != q.width ||
            p.bend_sign != q.bend_sign)
          why = "ligament parameters differ";
      }
      if (why.empty() && a.mesh_fingerprint != b.mesh_fingerprint) why = "meshes are not mirror-consistent";
    }
    return why.empty();
  };
  std::string why;
  if (!same(full.meta, N.meta, why) || !same(full.meta, D.meta, why)) throw IncomparableRunsError(why);
  return verify_decomposition(full.R, full.T, N.R, D.R);
}

FieldPeak field_peak(const ScatteringRun& run, int column, int lig) {
  const FemSpace& space = *run.space;
  const Mesh& mesh = space.mesh();
  FieldPeak pk;
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    if (mesh.region[t] != lig + 1) continue;
    for (int d : space.element_dofs(static_cast<int>(t))) {
      cplx v = run.fields(d, column);
      pk.re = std::max(pk.re, std::abs(v.real()));
      pk.im = std::max(pk.im, std::abs(v.imag()));
      pk.abs = std::max(pk.abs, std::abs(v));
    }
  }
  return pk;
}

void write_csv_header(std::ostream& os, const ScatteringMatrices&) {
  os << "kind,omega,R,h,junction_levels,n_terms,n_dofs";
  for (const char* m : {"r", "t"})
    for (int i = 1; i <= 2; ++i)
      for (int j = 1; j <= 2; ++j) os << ',' << m << i << j << "_re," << m << i << j << "_im";
  os << '\n';
}

void write_csv(std::ostream& os, const ScatteringMatrices& S) {
  auto old = os.precision(17);
  os << to_string(S.kind) << ',' << S.meta.omega << ',' << S.meta.R << ',' << S.meta.h << ','
     << S.meta.junction_levels << ',' << S.meta.n_terms << ',' << S.meta.n_dofs;
  for (const Eigen::Matrix2cd* A : {&S.R, &S.T})
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) os << ',' << (*A)(i, j).real() << ',' << (*A)(i, j).imag();
  os << '\n';
  os.precision(old);
}

std::string format_matrix(const Eigen::Matrix2cd& A) {
  std::ostringstream os;
  char buf[128];
  for (int i = 0; i < 2; ++i) {
    os << (i == 0 ? "[" : " ");
    for (int j = 0; j < 2; ++j) {
      std::snprintf(buf, sizeof buf, "%s% .6f%+.6fi", j ? ", " : "", A(i, j).real(), A(i, j).imag());
      os << buf;
    }
    os << (i == 0 ? ";\n" : "]");
  }
  return os.str();
}

}  // namespace modeconv
