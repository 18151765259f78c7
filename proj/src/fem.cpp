#include "modeconv/fem.hpp"

#include <Eigen/LU>
#include <algorithm>
#include <cmath>
#include <string>

#include "modeconv/errors.hpp"
#include "modeconv/quadrature.hpp"
#include "modeconv/sparse_solver.hpp"

namespace modeconv {

namespace {

using Mat26 = Eigen::Matrix<double, 2, 6>;

// Reference gradients (d/dl1, d/dl2) of the six shape functions.
Mat26 p2_ref_gradients(double l1, double l2) {
  const double l0 = 1.0 - l1 - l2;
  Mat26 g;
  g.col(0) << -(4 * l0 - 1), -(4 * l0 - 1);
  g.col(1) << 4 * l1 - 1, 0.0;
  g.col(2) << 0.0, 4 * l2 - 1;
  g.col(3) << 4 * (l0 - l1), -4 * l1;
  g.col(4) << 4 * l2, 4 * l1;
  g.col(5) << -4 * l2, 4 * (l0 - l2);
  return g;
}

struct Affine {
  Eigen::Vector2d p0;
  Eigen::Matrix2d J, JinvT;
  double detJ;
};

Affine affine(const Mesh& m, const std::array<int, 3>& t) {
  Affine a;
  a.p0 = m.nodes[t[0]];
  a.J.col(0) = m.nodes[t[1]] - a.p0;
  a.J.col(1) = m.nodes[t[2]] - a.p0;
  a.detJ = a.J.determinant();
  a.JinvT = a.J.inverse().transpose();
  return a;
}

std::array<double, 3> edge_shape(double t) {
  return {(1 - t) * (1 - 2 * t), 4 * t * (1 - t), t * (2 * t - 1)};
}

}  // namespace

std::array<double, 6> p2_shape(double l1, double l2) {
  const double l0 = 1.0 - l1 - l2;
  return {l0 * (2 * l0 - 1), l1 * (2 * l1 - 1), l2 * (2 * l2 - 1),
          4 * l0 * l1,       4 * l1 * l2,       4 * l2 * l0};
}

FemSpace::FemSpace(std::shared_ptr<const Mesh> mesh) : mesh_(std::move(mesh)) {
  const Mesh& m = *mesh_;
  const int nv = static_cast<int>(m.nodes.size());
  points_ = m.nodes;
  edge_lookup_.assign(nv, {});
  auto edge = [&](int a, int b) {
    int lo = std::min(a, b), hi = std::max(a, b);
    for (const auto& [h, d] : edge_lookup_[lo])
      if (h == hi) return d;
    int d = static_cast<int>(points_.size());
    points_.push_back(0.5 * (m.nodes[a] + m.nodes[b]));
    edge_lookup_[lo].emplace_back(hi, d);
    return d;
  };
  elements_.reserve(m.triangles.size());
  for (const auto& t : m.triangles)
    elements_.push_back({t[0], t[1], t[2], edge(t[0], t[1]), edge(t[1], t[2]), edge(t[2], t[0])});
}

int FemSpace::edge_dof(int a, int b) const {
  int lo = std::min(a, b), hi = std::max(a, b);
  for (const auto& [h, d] : edge_lookup_.at(lo))
    if (h == hi) return d;
  return -1;
}

std::vector<std::array<int, 3>> FemSpace::boundary_edges(BoundaryTag tag) const {
  std::vector<std::array<int, 3>> out;
  for (const auto& e : mesh_->boundary)
    if (e.tag == tag) out.push_back({e.a, edge_dof(e.a, e.b), e.b});
  return out;
}

std::vector<int> FemSpace::boundary_dofs(BoundaryTag tag) const {
  std::vector<int> d;
  for (const auto& e : boundary_edges(tag)) d.insert(d.end(), e.begin(), e.end());
  std::sort(d.begin(), d.end());
  d.erase(std::unique(d.begin(), d.end()), d.end());
  return d;
}

cplx FemSpace::evaluate(const Eigen::VectorXcd& u, int t, const Eigen::Vector2d& p) const {
  Affine a = affine(*mesh_, mesh_->triangles[t]);
  Eigen::Vector2d l = a.J.inverse() * (p - a.p0);
  auto N = p2_shape(l.x(), l.y());
  cplx v = 0.0;
  for (int k = 0; k < 6; ++k) v += N[k] * u[elements_[t][k]];
  return v;
}

FemMatrices assemble_stiffness_mass(const FemSpace& space) {
  const Mesh& m = space.mesh();
  const auto& rule = triangle_rule_deg4();
  std::array<std::array<double, 6>, 6> shp;
  std::array<Mat26, 6> grd;
  for (std::size_t q = 0; q < rule.size(); ++q) {
    shp[q] = p2_shape(rule[q].xi, rule[q].eta);
    grd[q] = p2_ref_gradients(rule[q].xi, rule[q].eta);
  }
  std::vector<Eigen::Triplet<double>> tk, tm;
  tk.reserve(36 * m.triangles.size());
  tm.reserve(36 * m.triangles.size());
  for (std::size_t t = 0; t < m.triangles.size(); ++t) {
    Affine a = affine(m, m.triangles[t]);
    const double area = std::abs(a.detJ);
    Eigen::Matrix<double, 6, 6> Ke = Eigen::Matrix<double, 6, 6>::Zero();
    Eigen::Matrix<double, 6, 6> Me = Eigen::Matrix<double, 6, 6>::Zero();
    for (std::size_t q = 0; q < rule.size(); ++q) {
      Mat26 G = a.JinvT * grd[q];
      Eigen::Map<const Eigen::Matrix<double, 6, 1>> N(shp[q].data());
      Ke.noalias() += rule[q].w * area * G.transpose() * G;
      Me.noalias() += rule[q].w * area * N * N.transpose();
    }
    const auto& d = space.element_dofs(static_cast<int>(t));
    for (int i = 0; i < 6; ++i)
      for (int j = 0; j < 6; ++j) {
        tk.emplace_back(d[i], d[j], Ke(i, j));
        tm.emplace_back(d[i], d[j], Me(i, j));
      }
  }
  FemMatrices out;
  const int n = space.n_dofs();
  out.K.resize(n, n);
  out.M.resize(n, n);
  out.K.setFromTriplets(tk.begin(), tk.end());
  out.M.setFromTriplets(tm.begin(), tm.end());
  return out;
}

Eigen::VectorXcd assemble_load(const FemSpace& space,
                               const std::function<cplx(const Eigen::Vector2d&)>& f) {
  const Mesh& m = space.mesh();
  Eigen::VectorXcd b = Eigen::VectorXcd::Zero(space.n_dofs());
  const auto& rule = triangle_rule_deg8();
  for (std::size_t t = 0; t < m.triangles.size(); ++t) {
    Affine a = affine(m, m.triangles[t]);
    const double area = std::abs(a.detJ);
    const auto& d = space.element_dofs(static_cast<int>(t));
    for (const auto& q : rule) {
      Eigen::Vector2d p = a.p0 + a.J * Eigen::Vector2d(q.xi, q.eta);
      cplx fv = f(p) * (q.w * area);
      auto N = p2_shape(q.xi, q.eta);
      for (int k = 0; k < 6; ++k) b[d[k]] += fv * N[k];
    }
  }
  return b;
}

Eigen::VectorXcd assemble_boundary_load(const FemSpace& space, BoundaryTag tag,
                                        const std::function<cplx(const Eigen::Vector2d&)>& g) {
  Eigen::VectorXcd b = Eigen::VectorXcd::Zero(space.n_dofs());
  const auto rule = gauss_legendre(8);
  for (const auto& e : space.boundary_edges(tag)) {
    const Eigen::Vector2d pa = space.dof_point(e[0]), pb = space.dof_point(e[2]);
    const double len = (pb - pa).norm();
    for (const auto& q : rule) {
      cplx gv = g(pa + q.t * (pb - pa)) * (q.w * len);
      auto N = edge_shape(q.t);
      for (int k = 0; k < 3; ++k) b[e[k]] += gv * N[k];
    }
  }
  return b;
}

std::vector<cplx> DtnOperator::project(const Eigen::VectorXcd& u) const {
  std::vector<cplx> p(beta.size(), 0.0);
  for (std::size_t k = 0; k < dofs.size(); ++k)
    for (int n = 0; n < n_terms(); ++n) p[n] += G(k, n) * u[dofs[k]];
  return p;
}

DtnOperator make_dtn(const FemSpace& space, const ModeBasis& basis, BoundaryTag tag, int n_terms,
                     int edge_quadrature) {
  if (n_terms < basis.propagating())
    throw ConfigError("DtN needs at least the propagating modes (" +
                      std::to_string(basis.propagating()) + " terms)");
  if (n_terms > basis.size()) throw ConfigError("DtN uses more terms than the mode basis holds");
  auto edges = space.boundary_edges(tag);
  if (edges.empty()) throw ConfigError(std::string("no boundary edges tagged ") + to_string(tag));

  DtnOperator op;
  op.tag = tag;
  op.beta.assign(basis.betas().begin(), basis.betas().begin() + n_terms);
  op.dofs = space.boundary_dofs(tag);
  op.abscissa = space.dof_point(op.dofs.front()).x();
  std::vector<int> local(space.n_dofs(), -1);
  for (std::size_t k = 0; k < op.dofs.size(); ++k) {
    local[op.dofs[k]] = static_cast<int>(k);
    if (std::abs(space.dof_point(op.dofs[k]).x() - op.abscissa) > 1e-12)
      throw GeometryError("truncation boundary is not a vertical cross-section");
  }
  op.G = Eigen::MatrixXd::Zero(op.dofs.size(), n_terms);
  const auto rule = gauss_legendre(edge_quadrature);
  for (const auto& e : edges) {
    const Eigen::Vector2d pa = space.dof_point(e[0]), pb = space.dof_point(e[2]);
    const double len = (pb - pa).norm();
    for (const auto& q : rule) {
      const double y = pa.y() + q.t * (pb.y() - pa.y());
      auto N = edge_shape(q.t);
      for (int n = 0; n < n_terms; ++n) {
        double w = q.w * len * transverse_profile(n, y);
        for (int k = 0; k < 3; ++k) op.G(local[e[k]], n) += w * N[k];
      }
    }
  }
  return op;
}

const char* to_string(Abc abc) {
  switch (abc) {
    case Abc::None: return "none";
    case Abc::Neumann: return "neumann";
    case Abc::Dirichlet: return "dirichlet";
  }
  return "?";
}

Eigen::VectorXcd SparseComplexSystem::expand(const Eigen::VectorXcd& x) const {
  Eigen::VectorXcd u = Eigen::VectorXcd::Zero(n_dofs);
  for (std::size_t k = 0; k < free_dofs.size(); ++k) u[free_dofs[k]] = x[k];
  return u;
}

SparseComplexSystem assemble(const FemSpace& space, const FemMatrices& km, double omega,
                             const std::vector<DtnOperator>& dtns, Abc abc,
                             const std::vector<int>& incident) {
  const int n = space.n_dofs();
  const bool has_sigma = !space.boundary_edges(BoundaryTag::Sigma).empty();
  if (abc == Abc::Dirichlet && !has_sigma)
    throw ConfigError("Dirichlet condition requested but the mesh has no SIGMA edges");
  if (abc == Abc::None && has_sigma)
    throw ConfigError("half-domain mesh requires a Neumann or Dirichlet condition on SIGMA");

  const DtnOperator* left = nullptr;
  for (const auto& d : dtns)
    if (d.tag == BoundaryTag::TruncationLeft) left = &d;
  for (int i : incident) {
    if (!left) throw ConfigError("incident wave needs a TRUNCATION_LEFT operator");
    if (i < 0 || i >= left->n_terms() || left->beta[i].imag() != 0.0)
      throw ConfigError("incident mode must be propagating");
  }

  SparseComplexSystem sys;
  sys.n_dofs = n;
  sys.incident = incident;
  sys.global_to_free.assign(n, 0);
  if (abc == Abc::Dirichlet)
    for (int d : space.boundary_dofs(BoundaryTag::Sigma)) sys.global_to_free[d] = -1;
  for (int d = 0; d < n; ++d)
    if (sys.global_to_free[d] == 0) {
      sys.global_to_free[d] = static_cast<int>(sys.free_dofs.size());
      sys.free_dofs.push_back(d);
    }
  const int nf = static_cast<int>(sys.free_dofs.size());

  std::vector<Eigen::Triplet<cplx>> trip;
  trip.reserve(km.K.nonZeros() + km.M.nonZeros());
  auto push = [&](int r, int c, cplx v) {
    int fr = sys.global_to_free[r], fc = sys.global_to_free[c];
    if (fr >= 0 && fc >= 0) trip.emplace_back(fr, fc, v);
  };
  const double w2 = omega * omega;
  for (int k = 0; k < km.K.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(km.K, k); it; ++it)
      push(static_cast<int>(it.row()), static_cast<int>(it.col()), it.value());
  for (int k = 0; k < km.M.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(km.M, k); it; ++it)
      push(static_cast<int>(it.row()), static_cast<int>(it.col()), -w2 * it.value());
  for (const auto& d : dtns) {
    const int nb = static_cast<int>(d.dofs.size());
    Eigen::MatrixXcd B = Eigen::MatrixXcd::Zero(nb, nb);
    for (int t = 0; t < d.n_terms(); ++t)
      B.noalias() -= (cplx(0, 1) * d.beta[t]) * (d.G.col(t) * d.G.col(t).transpose()).cast<cplx>();
    for (int i = 0; i < nb; ++i)
      for (int j = 0; j < nb; ++j) push(d.dofs[i], d.dofs[j], B(i, j));
  }
  sys.A.resize(nf, nf);
  sys.A.setFromTriplets(trip.begin(), trip.end());
  sys.A.makeCompressed();

  sys.rhs = Eigen::MatrixXcd::Zero(nf, static_cast<Eigen::Index>(incident.size()));
  const double xj = space.mesh().junction;
  for (std::size_t c = 0; c < incident.size(); ++c) {
    const int i = incident[c];
    const double b = left->beta[i].real();
    const cplx amp = std::polar(1.0 / std::sqrt(b), b * (left->abscissa + xj));
    const cplx coef = cplx(0, -2) * b * amp;
    for (std::size_t k = 0; k < left->dofs.size(); ++k) {
      int f = sys.global_to_free[left->dofs[k]];
      if (f >= 0) sys.rhs(f, c) += coef * left->G(k, i);
    }
  }
  return sys;
}

SolveResult solve(const SparseComplexSystem& system, double rcond_min) {
  ComplexSparseLU lu(system.A, rcond_min);
  Eigen::MatrixXcd X = lu.solve(system.rhs);
  SolveResult r;
  r.rcond = lu.rcond();
  r.fields.resize(system.n_dofs, X.cols());
  for (Eigen::Index c = 0; c < X.cols(); ++c) {
    Eigen::VectorXcd res = system.A * X.col(c) - system.rhs.col(c);
    double nb = system.rhs.col(c).norm();
    r.residuals.push_back(nb > 0 ? res.norm() / nb : res.norm());
    r.fields.col(c) = system.expand(X.col(c));
  }
  return r;
}

}  // namespace modeconv
