#include "modeconv/constants.hpp"

#include <Eigen/SparseCholesky>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <numbers>

#include "modeconv/errors.hpp"
#include "modeconv/fem.hpp"
#include "modeconv/mesh.hpp"
#include "modeconv/modes.hpp"
#include "modeconv/quadtree.hpp"

namespace modeconv {

using std::numbers::pi;

namespace {

// Tags reused for the junction problem: Dirichlet box sides, Neumann walls, flux cap.
constexpr BoundaryTag kDirichlet = BoundaryTag::TruncationLeft;
constexpr BoundaryTag kCap = BoundaryTag::Sigma;

Mesh junction_mesh(double rho, double L, const CXiParams& p) {
  const double c0 = 0.5;
  const int nr = static_cast<int>(std::lround(rho / c0));
  const int nl = static_cast<int>(std::lround(L / c0));
  if (std::abs(nr * c0 - rho) > 1e-12 || std::abs(nl * c0 - L) > 1e-12)
    throw ConfigError("rho and L must be multiples of 1/2");
  QuadtreeSpec qs;
  qs.nx = nr + nl;
  qs.ny = nr;
  qs.active = [nr](int i, int j) { return i < nr || j == 0; };
  qs.target = [&](double x0, double y0, double x1, double y1) {
    double dx = std::max({0.0, x0 - nr, nr - x1});
    double dy = std::max({0.0, y0 - 1.0, 1.0 - y1});
    double d = std::hypot(dx, dy) * c0;
    return std::min(p.max_cell, std::max(p.corner_cell, p.grading * d)) / c0;
  };
  QuadtreeMesh q = build_quadtree_mesh(qs);
  const int F = q.fine_level;
  const double sc = c0 * std::ldexp(1.0, -F);
  const std::int64_t Xmax = static_cast<std::int64_t>(nr + nl) << F;
  const std::int64_t Ytop = static_cast<std::int64_t>(nr) << F;

  Mesh m;
  m.nodes.reserve(q.nodes.size());
  for (const auto& n : q.nodes) m.nodes.emplace_back(-rho + n[0] * sc, n[1] * sc);
  m.triangles = q.triangles;
  m.region.assign(m.triangles.size(), 0);
  for (const auto& e : q.boundary) {
    const auto &A = q.nodes[e[0]], &B = q.nodes[e[1]];
    BoundaryTag tag = BoundaryTag::Wall;
    if ((A[0] == 0 && B[0] == 0) || (A[1] == Ytop && B[1] == Ytop)) tag = kDirichlet;
    else if (A[0] == Xmax && B[0] == Xmax) tag = kCap;
    m.boundary.push_back({e[0], e[1], tag});
  }
  return m;
}

double smoothstep_d1(double t) { return 30 * t * t * (1 - t) * (1 - t); }
double smoothstep_d2(double t) { return 60 * t * (1 - t) * (1 - 2 * t); }

std::string fmt_key(std::initializer_list<double> xs) {
  std::string s;
  char buf[40];
  for (double x : xs) {
    std::snprintf(buf, sizeof buf, "%.12g|", x);
    s += buf;
  }
  return s;
}

}  // namespace

CXiTruncated solve_c_xi_truncated(double rho, double L, const CXiParams& params) {
  if (rho < 1.0 || L < 1.0) throw ConfigError("junction truncation too small");
  FemSpace space(junction_mesh(rho, L, params));
  FemMatrices km = assemble_stiffness_mass(space);
  const int n = space.n_dofs();

  std::vector<int> fixed(n, 0);
  Eigen::VectorXd u = Eigen::VectorXd::Zero(n);
  for (int d : space.boundary_dofs(kDirichlet)) {
    fixed[d] = 1;
    u[d] = -std::log(space.dof_point(d).norm()) / pi;
  }
  Eigen::VectorXd b =
      assemble_boundary_load(space, kCap, [](const Eigen::Vector2d&) { return cplx(1.0); }).real();

  std::vector<int> idx(n, -1);
  int nf = 0;
  for (int d = 0; d < n; ++d)
    if (!fixed[d]) idx[d] = nf++;
  std::vector<Eigen::Triplet<double>> trip;
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(nf);
  for (int k = 0; k < n; ++k)
    if (!fixed[k]) rhs[idx[k]] = b[k];
  for (int c = 0; c < km.K.outerSize(); ++c)
    for (Eigen::SparseMatrix<double>::InnerIterator it(km.K, c); it; ++it) {
      int r = static_cast<int>(it.row()), cc = static_cast<int>(it.col());
      if (fixed[r]) continue;
      if (fixed[cc]) rhs[idx[r]] -= it.value() * u[cc];
      else trip.emplace_back(idx[r], idx[cc], it.value());
    }
  Eigen::SparseMatrix<double> A(nf, nf);
  A.setFromTriplets(trip.begin(), trip.end());
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(A);
  if (ldlt.info() != Eigen::Success) throw SolverError("junction problem factorization failed");
  Eigen::VectorXd x = ldlt.solve(rhs);
  for (int d = 0; d < n; ++d)
    if (!fixed[d]) u[d] = x[idx[d]];

  CXiTruncated r;
  r.n_dofs = n;
  r.value = b.dot(u) / 0.5 - L;
  r.flux_residual = std::abs((km.K * u).sum());
  return r;
}

CXiResult compute_c_xi(double rho, double L, const CXiParams& params, double max_spread) {
  if (rho < 5.0 || L < 3.0) throw ConfigError("C_Xi needs rho >= 5 and L >= 3");
  CXiTruncated a = solve_c_xi_truncated(rho, L, params);
  CXiTruncated b = solve_c_xi_truncated(2 * rho, L, params);
  CXiResult r;
  r.rho = rho;
  r.L = L;
  r.raw_rho = a.value;
  r.raw_2rho = b.value;
  r.value = (4 * b.value - a.value) / 3;
  r.error = std::abs(r.value - b.value);
  r.flux_residual = std::max(a.flux_residual, b.flux_residual);
  r.n_dofs = b.n_dofs;
  if (!(std::abs(a.value - b.value) < max_spread))
    throw ConvergenceError("C_Xi extrapolation not settled: raw values " + std::to_string(a.value) +
                           " and " + std::to_string(b.value));
  return r;
}

double gamma_imag_identity(double y, double omega) {
  ModeBasis basis(omega, 2);
  double c = std::cos(pi * y);
  return 1 + 2 * basis.beta(0).real() * c * c / basis.beta(1).real();
}

double GammaResult::identity_residual() const {
  return omega * gamma.imag() - gamma_imag_identity(y, omega);
}

GammaResult solve_gamma(double y, double omega, const GammaParams& p) {
  if (!(y > 0.0 && y < 1.0)) throw ConfigError("attachment ordinate must lie in (0, 1)");
  const double r0 = p.r0 > 0 ? p.r0 : std::min(0.1, 0.4 * std::min(y, 1 - y));
  if (2 * r0 >= std::min(y, 1 - y) || 2 * r0 >= p.R - 0.5)
    throw ConfigError("cutoff too large: the cutoff ball reaches another boundary part");
  ModeBasis basis(omega, p.n_terms);
  if (basis.propagating() != 2) throw ConfigError("omega must lie in (pi, 2 pi)");

  const bool flip = y > 0.5;
  Mesh mesh = build_point_source_mesh(p.R, flip ? 1 - y : y, p.h, r0 / p.local_ratio, 2 * r0);
  if (flip) {
    for (auto& x : mesh.nodes) x.y() = 1 - x.y();
    for (auto& t : mesh.triangles) std::swap(t[1], t[2]);
    for (auto& e : mesh.boundary) std::swap(e.a, e.b);
    mesh.fingerprint = mesh_fingerprint(mesh);
  }
  const int a_node = mesh.point_nodes.at(0);
  FemSpace space(std::move(mesh));
  FemMatrices km = assemble_stiffness_mass(space);
  std::vector<DtnOperator> dtns{make_dtn(space, basis, BoundaryTag::TruncationLeft, p.n_terms)};
  SparseComplexSystem sys = assemble(space, km, omega, dtns, Abc::None, {});

  // Lift chi(r) * (-Y0(omega r) / 2); its Helmholtz residual lives in r0 < r < 2 r0.
  const Eigen::Vector2d A(-0.5, y);
  auto source = [&](const Eigen::Vector2d& x) -> cplx {
    double r = (x - A).norm();
    if (r <= r0 || r >= 2 * r0) return 0.0;
    double t = (r - r0) / r0;
    double c1 = -smoothstep_d1(t) / r0, c2 = -smoothstep_d2(t) / (r0 * r0);
    double l = -0.5 * std::cyl_neumann(0.0, omega * r);
    double dl = 0.5 * omega * std::cyl_neumann(1.0, omega * r);
    return c2 * l + c1 * (2 * dl + l / r);
  };
  Eigen::VectorXcd b = assemble_load(space, source);
  sys.rhs.resize(sys.A.rows(), 1);
  for (std::size_t k = 0; k < sys.free_dofs.size(); ++k) sys.rhs(k, 0) = b[sys.free_dofs[k]];
  SolveResult sol = solve(sys);
  Eigen::VectorXcd u = sol.fields.col(0);

  GammaResult g;
  g.omega = omega;
  g.y = y;
  g.r0 = r0;
  g.h = p.h;
  g.n_dofs = space.n_dofs();
  g.gamma = u[a_node] - (std::log(omega / 2) + std::numbers::egamma) / pi;
  auto c = extract_coefficients(basis, dtns[0].project(u), dtns[0].abscissa, Side::Left,
                                std::nullopt, 1.0, 0.5);
  g.s1 = c.outgoing[0];
  g.s2 = c.outgoing[1];
  return g;
}

GammaResult compute_gamma(double y, double omega, const GammaParams& params) {
  GammaResult coarse = solve_gamma(y, omega, params);
  GammaParams fine = params;
  fine.h = params.h / 2;
  fine.local_ratio = params.local_ratio * 2;
  fine.r0 = coarse.r0;
  GammaResult g = solve_gamma(y, omega, fine);
  g.error = std::abs(g.gamma - coarse.gamma);
  g.h = params.h;
  return g;
}

ConstantsCache::ConstantsCache(std::string path) : path_(std::move(path)) {
  std::ifstream in(path_);
  if (!in) return;
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("unreadable constants cache " + path_ + ": " + e.what());
  }
  for (const auto& e : j.value("gamma", nlohmann::json::array())) {
    GammaResult g;
    g.omega = e.at("omega");
    g.y = e.at("y");
    g.gamma = {e.at("re").get<double>(), e.at("im").get<double>()};
    g.error = e.at("error");
    g.s1 = {e.at("s1_re").get<double>(), e.at("s1_im").get<double>()};
    g.s2 = {e.at("s2_re").get<double>(), e.at("s2_im").get<double>()};
    const auto& pv = e.at("provenance");
    g.r0 = pv.at("r0");
    g.h = pv.at("h");
    g.n_dofs = pv.at("n_dofs");
    gammas_[e.at("key").get<std::string>()] = g;
  }
  for (const auto& e : j.value("c_xi", nlohmann::json::array())) {
    CXiResult c;
    c.value = e.at("value");
    c.error = e.at("error");
    const auto& pv = e.at("provenance");
    c.rho = pv.at("rho");
    c.L = pv.at("L");
    c.raw_rho = pv.at("raw_rho");
    c.raw_2rho = pv.at("raw_2rho");
    c.flux_residual = pv.at("flux_residual");
    c.n_dofs = pv.at("n_dofs");
    cxis_[c_xi_key(c.rho, c.L)] = c;
  }
}

std::string ConstantsCache::gamma_key(double omega, double y, const GammaParams& p) {
  return fmt_key({omega, y, p.R, p.h, p.r0, p.local_ratio, static_cast<double>(p.n_terms)});
}

std::string ConstantsCache::c_xi_key(double rho, double L) { return fmt_key({rho, L}); }

std::optional<GammaResult> ConstantsCache::find_gamma(double omega, double y,
                                                      const GammaParams& p) const {
  std::lock_guard lk(mu_);
  auto it = gammas_.find(gamma_key(omega, y, p));
  if (it == gammas_.end()) return std::nullopt;
  return it->second;
}

void ConstantsCache::put_gamma(const GammaResult& g, const GammaParams& p) {
  std::lock_guard lk(mu_);
  gammas_[gamma_key(g.omega, g.y, p)] = g;
}

std::optional<CXiResult> ConstantsCache::find_c_xi(double rho, double L) const {
  std::lock_guard lk(mu_);
  auto it = cxis_.find(c_xi_key(rho, L));
  if (it == cxis_.end()) return std::nullopt;
  return it->second;
}

void ConstantsCache::put_c_xi(const CXiResult& c) {
  std::lock_guard lk(mu_);
  cxis_[c_xi_key(c.rho, c.L)] = c;
}

GammaResult ConstantsCache::gamma(double omega, double y, const GammaParams& p, bool* hit) {
  if (auto g = find_gamma(omega, y, p)) {
    if (hit) *hit = true;
    return *g;
  }
  if (hit) *hit = false;
  GammaResult g = compute_gamma(y, omega, p);
  put_gamma(g, p);
  return g;
}

CXiResult ConstantsCache::c_xi(double rho, double L, bool* hit) {
  if (auto c = find_c_xi(rho, L)) {
    if (hit) *hit = true;
    return *c;
  }
  if (hit) *hit = false;
  CXiResult c = compute_c_xi(rho, L);
  put_c_xi(c);
  return c;
}

void ConstantsCache::save() const {
  if (path_.empty()) return;
  std::lock_guard lk(mu_);
  nlohmann::json j;
  j["gamma"] = nlohmann::json::array();
  for (const auto& [key, g] : gammas_) {
    j["gamma"].push_back({{"key", key},
                          {"omega", g.omega},
                          {"y", g.y},
                          {"re", g.gamma.real()},
                          {"im", g.gamma.imag()},
                          {"error", g.error},
                          {"s1_re", g.s1.real()},
                          {"s1_im", g.s1.imag()},
                          {"s2_re", g.s2.real()},
                          {"s2_im", g.s2.imag()},
                          {"identity_residual", g.identity_residual()},
                          {"provenance", {{"r0", g.r0}, {"h", g.h}, {"n_dofs", g.n_dofs}}}});
  }
  j["c_xi"] = nlohmann::json::array();
  for (const auto& [key, c] : cxis_) {
    j["c_xi"].push_back({{"value", c.value},
                         {"error", c.error},
                         {"provenance",
                          {{"rho", c.rho},
                           {"L", c.L},
                           {"raw_rho", c.raw_rho},
                           {"raw_2rho", c.raw_2rho},
                           {"flux_residual", c.flux_residual},
                           {"n_dofs", c.n_dofs}}}});
  }
  std::ofstream out(path_);
  if (!out) throw ConfigError("cannot write constants cache " + path_);
  out << j.dump(2) << '\n';
}

}  // namespace modeconv
