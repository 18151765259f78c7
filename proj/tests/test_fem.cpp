#include <doctest.h>

#include <Eigen/LU>
#include <Eigen/SparseLU>
#include <cmath>
#include <numbers>

#include "modeconv/errors.hpp"
#include "modeconv/fem.hpp"
#include "modeconv/mesh.hpp"
#include "modeconv/quadrature.hpp"
#include "modeconv/sparse_solver.hpp"

using namespace modeconv;
using std::numbers::pi;

namespace {

const double kOmega = 1.5 * pi;

Mesh duct(double h, double R = 1.5, bool full = false) {
  WaveguideGeometry g;
  g.R = R;
  g.full = full;
  MeshParams p;
  p.h = h;
  return build_mesh(g, p);
}

// Neumann problem on the half duct [-1.5, 0] x [0, 1] with exact solution
// cos(k x) cos(pi y), k = 4 pi / 3, whose normal derivative vanishes on every side.
double manufactured_l2_error(double h) {
  const double k = 4 * pi / 3;
  auto exact = [k](const Eigen::Vector2d& p) { return std::cos(k * p.x()) * std::cos(pi * p.y()); };
  FemSpace space(duct(h));
  FemMatrices km = assemble_stiffness_mass(space);
  Eigen::SparseMatrix<double> A = km.K - kOmega * kOmega * km.M;
  const double c = pi * pi + k * k - kOmega * kOmega;
  Eigen::VectorXd b =
      assemble_load(space, [&](const Eigen::Vector2d& p) { return cplx(c * exact(p)); }).real();
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu(A);
  REQUIRE(lu.info() == Eigen::Success);
  Eigen::VectorXd u = lu.solve(b);

  double err2 = 0.0;
  const auto& m = space.mesh();
  for (std::size_t t = 0; t < m.triangles.size(); ++t) {
    const auto& tri = m.triangles[t];
    Eigen::Vector2d p0 = m.nodes[tri[0]], e1 = m.nodes[tri[1]] - p0, e2 = m.nodes[tri[2]] - p0;
    double jac = std::abs(e1.x() * e2.y() - e1.y() * e2.x());
    for (const auto& q : triangle_rule_deg8()) {
      auto N = p2_shape(q.xi, q.eta);
      double uh = 0.0;
      for (int a = 0; a < 6; ++a) uh += N[a] * u[space.element_dofs(static_cast<int>(t))[a]];
      double d = uh - exact(p0 + q.xi * e1 + q.eta * e2);
      err2 += q.w * jac * d * d;
    }
  }
  return std::sqrt(err2);
}

}  // namespace

TEST_CASE("P2 space has one DOF per vertex and per edge") {
  FemSpace space(duct(0.1));
  const auto& m = space.mesh();
  // Euler: E = V + T - 1 for a simply connected triangulated domain.
  CHECK(space.n_dofs() == static_cast<int>(m.nodes.size() + (m.nodes.size() + m.triangles.size() - 1)));
  for (int d = 0; d < space.n_vertices(); ++d) CHECK(space.dof_point(d) == m.nodes[d]);
}

TEST_CASE("stiffness and mass sanity") {
  FemSpace space(duct(0.1));
  FemMatrices km = assemble_stiffness_mass(space);
  Eigen::VectorXd one = Eigen::VectorXd::Ones(space.n_dofs());
  CHECK((km.K * one).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(one.dot(km.M * one) == doctest::Approx(1.5).epsilon(1e-12));
  Eigen::SparseMatrix<double> Kt = km.K.transpose(), Mt = km.M.transpose();
  CHECK((km.K - Kt).norm() < 1e-12);
  CHECK((km.M - Mt).norm() < 1e-12);
  // x^2 lies in P2: its Dirichlet energy is int 4 x^2 = 4 * 1.5^3 / 3.
  Eigen::VectorXd x2(space.n_dofs());
  for (int d = 0; d < space.n_dofs(); ++d) x2[d] = std::pow(space.dof_point(d).x(), 2);
  CHECK(x2.dot(km.K * x2) == doctest::Approx(4.5).epsilon(1e-10));
}

TEST_CASE("manufactured Neumann problem converges at third order in L2") {
  double e1 = manufactured_l2_error(0.1);
  double e2 = manufactured_l2_error(0.05);
  double e3 = manufactured_l2_error(0.025);
  double r1 = std::log2(e1 / e2), r2 = std::log2(e2 / e3);
  CAPTURE(e1);
  CAPTURE(e2);
  CAPTURE(e3);
  CHECK(r1 > 2.7);
  CHECK(r2 > 2.7);
  CHECK(e3 < 1e-4);
}

TEST_CASE("DtN projections recover transverse modes") {
  FemSpace space(duct(0.05));
  ModeBasis basis(kOmega, 15);
  DtnOperator dtn = make_dtn(space, basis, BoundaryTag::TruncationLeft, 15);
  CHECK(dtn.abscissa == doctest::Approx(-1.5));
  for (int m = 0; m < 3; ++m) {
    Eigen::VectorXcd u(space.n_dofs());
    for (int d = 0; d < space.n_dofs(); ++d) u[d] = transverse_profile(m, space.dof_point(d).y());
    auto P = dtn.project(u);
    for (int n = 0; n < 6; ++n) CHECK(std::abs(P[n] - (m == n ? 1.0 : 0.0)) < 1e-4);
  }
  // Outgoing evanescent terms contribute a decaying (positive definite) boundary block.
  for (int n = 2; n < dtn.n_terms(); ++n) CHECK((cplx(0, 1) * dtn.beta[n]).real() < 0);
  CHECK_THROWS_AS(make_dtn(space, basis, BoundaryTag::TruncationLeft, 1), ConfigError);
  CHECK_THROWS_AS(make_dtn(space, basis, BoundaryTag::TruncationRight, 15), ConfigError);
}

TEST_CASE("assembled system is complex symmetric, not Hermitian") {
  FemSpace space(duct(0.1));
  FemMatrices km = assemble_stiffness_mass(space);
  ModeBasis basis(kOmega, 15);
  std::vector<DtnOperator> dtns{make_dtn(space, basis, BoundaryTag::TruncationLeft, 15)};
  auto sys = assemble(space, km, kOmega, dtns, Abc::Neumann, {0, 1});
  Eigen::SparseMatrix<cplx> At = sys.A.transpose();
  Eigen::SparseMatrix<cplx> Ah = sys.A.adjoint();
  double scale = sys.A.norm();
  CHECK((sys.A - At).norm() / scale < 1e-12);
  CHECK((sys.A - Ah).norm() / scale > 1e-6);
  CHECK(sys.A.rows() == space.n_dofs());

  auto sd = assemble(space, km, kOmega, dtns, Abc::Dirichlet, {0});
  int n_sigma = static_cast<int>(space.boundary_dofs(BoundaryTag::Sigma).size());
  CHECK(sd.A.rows() == space.n_dofs() - n_sigma);
  for (int d : space.boundary_dofs(BoundaryTag::Sigma)) CHECK(sd.global_to_free[d] == -1);
}

TEST_CASE("assembly guards") {
  FemSpace half(duct(0.1));
  FemSpace full(duct(0.1, 1.5, true));
  FemMatrices kh = assemble_stiffness_mass(half), kf = assemble_stiffness_mass(full);
  ModeBasis basis(kOmega, 15);
  std::vector<DtnOperator> dh{make_dtn(half, basis, BoundaryTag::TruncationLeft, 15)};
  std::vector<DtnOperator> df{make_dtn(full, basis, BoundaryTag::TruncationLeft, 15)};
  CHECK_THROWS_AS(assemble(full, kf, kOmega, df, Abc::Dirichlet, {0}), ConfigError);
  CHECK_THROWS_AS(assemble(half, kh, kOmega, dh, Abc::None, {0}), ConfigError);
  CHECK_THROWS_AS(assemble(half, kh, kOmega, dh, Abc::Neumann, {2}), ConfigError);
}

TEST_CASE("straight duct field equals the incident wave to discretization error") {
  ModeBasis basis(kOmega, 15);
  auto max_error = [&](double h) {
    FemSpace space(duct(h, 1.5, true));
    FemMatrices km = assemble_stiffness_mass(space);
    std::vector<DtnOperator> dtns{make_dtn(space, basis, BoundaryTag::TruncationLeft, 15),
                                  make_dtn(space, basis, BoundaryTag::TruncationRight, 15)};
    auto sys = assemble(space, km, kOmega, dtns, Abc::None, {0, 1});
    SolveResult s = solve(sys);
    for (double r : s.residuals) CHECK(r < 1e-10);
    double err = 0.0;
    for (int m = 0; m < 2; ++m)
      for (int d = 0; d < space.n_dofs(); ++d) {
        const auto& p = space.dof_point(d);
        cplx w = mode_trace(basis, m, Direction::Forward, p.x(), p.y());
        err = std::max(err, std::abs(s.fields(d, m) - w));
      }
    return err;
  };
  double e1 = max_error(0.05), e2 = max_error(0.025);
  CAPTURE(e1);
  CAPTURE(e2);
  CHECK(e2 < 2e-5);
  CHECK(std::log2(e1 / e2) > 2.5);
}

TEST_CASE("sparse LU: one-DOF identity, dense agreement and singular guard") {
  Eigen::SparseMatrix<cplx> I(1, 1);
  I.insert(0, 0) = 1.0;
  ComplexSparseLU lu(I);
  Eigen::MatrixXcd b(1, 1);
  b(0, 0) = 2.0;
  CHECK(std::abs(lu.solve(b)(0, 0) - 2.0) < 1e-15);

  const int n = 30;
  Eigen::MatrixXcd D = Eigen::MatrixXcd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    D(i, i) = cplx(4.0 + i % 3, 0.5 * (i % 2));
    if (i + 1 < n) D(i, i + 1) = D(i + 1, i) = cplx(-1.0, 0.3);
    if (i + 7 < n) D(i, i + 7) = cplx(0.2, -0.1);
  }
  Eigen::SparseMatrix<cplx> S = D.sparseView();
  Eigen::MatrixXcd B = Eigen::MatrixXcd::Zero(n, 2);
  for (int i = 0; i < n; ++i) B(i, 0) = cplx(std::sin(i), std::cos(3 * i)), B(i, 1) = i;
  ComplexSparseLU lu2(S);
  CHECK((lu2.solve(B) - D.partialPivLu().solve(B)).norm() < 1e-12);
  CHECK(lu2.rcond() > 1e-3);

  Eigen::SparseMatrix<cplx> Z(2, 2);
  Z.insert(0, 0) = 1.0;
  Z.insert(0, 1) = 1.0;
  Z.insert(1, 0) = 1.0;
  Z.insert(1, 1) = 1.0;
  CHECK_THROWS_WITH_AS(ComplexSparseLU{Z}, doctest::Contains("resonant or degenerate"), SolverError);
}
