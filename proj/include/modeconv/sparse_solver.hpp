#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>
#include <complex>
#include <memory>

namespace modeconv {

// Sparse LU factorization of a square complex matrix (UMFPACK), reusable for
// several right-hand sides.
class ComplexSparseLU {
 public:
  // Throws SolverError("resonant or degenerate system") when the factorization is
  // singular or the reciprocal condition estimate is below rcond_min.
  explicit ComplexSparseLU(const Eigen::SparseMatrix<std::complex<double>>& A,
                           double rcond_min = 1e-14);
  ~ComplexSparseLU();
  ComplexSparseLU(const ComplexSparseLU&) = delete;
  ComplexSparseLU& operator=(const ComplexSparseLU&) = delete;

  Eigen::MatrixXcd solve(const Eigen::MatrixXcd& B) const;
  double rcond() const { return rcond_; }
  int rows() const { return n_; }

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  int n_ = 0;
  double rcond_ = 0.0;
};

}  // namespace modeconv
