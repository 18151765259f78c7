#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>
#include <array>
#include <functional>
#include <memory>
#include <vector>

#include "modeconv/mesh.hpp"
#include "modeconv/modes.hpp"

namespace modeconv {

// Continuous P2 Lagrange space. Element DOFs are ordered v0, v1, v2, e01, e12, e20;
// vertex DOFs share the mesh node numbering and edge DOFs follow.
class FemSpace {
 public:
  explicit FemSpace(std::shared_ptr<const Mesh> mesh);
  explicit FemSpace(Mesh mesh) : FemSpace(std::make_shared<const Mesh>(std::move(mesh))) {}

  static constexpr int degree = 2;
  const Mesh& mesh() const { return *mesh_; }
  std::shared_ptr<const Mesh> mesh_ptr() const { return mesh_; }
  int n_dofs() const { return static_cast<int>(points_.size()); }
  int n_vertices() const { return static_cast<int>(mesh_->nodes.size()); }
  const std::array<int, 6>& element_dofs(int t) const { return elements_[t]; }
  const Eigen::Vector2d& dof_point(int d) const { return points_[d]; }
  int edge_dof(int a, int b) const;

  // Boundary edges with the given tag as (first vertex, midpoint, second vertex) DOFs.
  std::vector<std::array<int, 3>> boundary_edges(BoundaryTag tag) const;
  std::vector<int> boundary_dofs(BoundaryTag tag) const;

  // Value of a field at point p inside triangle t.
  cplx evaluate(const Eigen::VectorXcd& u, int t, const Eigen::Vector2d& p) const;

 private:
  std::shared_ptr<const Mesh> mesh_;
  std::vector<std::array<int, 6>> elements_;
  std::vector<Eigen::Vector2d> points_;
  std::vector<std::vector<std::pair<int, int>>> edge_lookup_;  // per low vertex: (high, dof)
};

// Local P2 shape functions at barycentric (l1, l2) on the reference triangle.
std::array<double, 6> p2_shape(double l1, double l2);

struct FemMatrices {
  Eigen::SparseMatrix<double> K;  // stiffness
  Eigen::SparseMatrix<double> M;  // mass
};

FemMatrices assemble_stiffness_mass(const FemSpace& space);

// Load vector int f psi_k over the domain (degree-8 element rule).
Eigen::VectorXcd assemble_load(const FemSpace& space,
                               const std::function<cplx(const Eigen::Vector2d&)>& f);

// Boundary load int_Gamma g psi_k over edges with the given tag.
Eigen::VectorXcd assemble_boundary_load(const FemSpace& space, BoundaryTag tag,
                                        const std::function<cplx(const Eigen::Vector2d&)>& g);

// Modal Dirichlet-to-Neumann map on a vertical truncation boundary. For the outgoing
// part u_s of the field, d_nu u_s = sum_n i beta_n P_n(u_s) phi_n with P_n(u) = int u phi_n.
struct DtnOperator {
  BoundaryTag tag = BoundaryTag::TruncationLeft;
  double abscissa = 0.0;
  std::vector<cplx> beta;  // n_terms constants
  std::vector<int> dofs;   // DOFs on the boundary
  Eigen::MatrixXd G;       // G(k, n) = int psi_{dofs[k]} phi_n

  int n_terms() const { return static_cast<int>(beta.size()); }
  // P_n(u) for all retained n.
  std::vector<cplx> project(const Eigen::VectorXcd& u) const;
};

DtnOperator make_dtn(const FemSpace& space, const ModeBasis& basis, BoundaryTag tag,
                     int n_terms, int edge_quadrature = 10);

enum class Abc { None, Neumann, Dirichlet };

const char* to_string(Abc abc);

struct SparseComplexSystem {
  Eigen::SparseMatrix<cplx> A;     // free DOFs only
  Eigen::MatrixXcd rhs;            // one column per incident mode
  std::vector<int> free_dofs;      // free index -> global DOF
  std::vector<int> global_to_free; // -1 for constrained DOFs
  std::vector<int> incident;
  int n_dofs = 0;

  Eigen::VectorXcd expand(const Eigen::VectorXcd& x) const;  // zero-fill constrained DOFs
};

// K - omega^2 M - sum over DtN boundaries of i beta_n g_n g_n^T. The incident mode enters
// through the TRUNCATION_LEFT operator as w+_i(x + junction).
SparseComplexSystem assemble(const FemSpace& space, const FemMatrices& km, double omega,
                             const std::vector<DtnOperator>& dtns, Abc abc,
                             const std::vector<int>& incident);

struct SolveResult {
  Eigen::MatrixXcd fields;         // n_dofs x n_rhs, total field
  std::vector<double> residuals;   // ||A x - b|| / ||b|| per column
  double rcond = 0.0;
};

SolveResult solve(const SparseComplexSystem& system, double rcond_min = 1e-14);

}  // namespace modeconv
