#include "modeconv/sparse_solver.hpp"

#include <umfpack.h>

#include <string>
#include <vector>

#include "modeconv/errors.hpp"

namespace modeconv {

struct ComplexSparseLU::Impl {
  std::vector<SuiteSparse_long> Ap, Ai;
  std::vector<double> Ax;  // interleaved real / imaginary parts
  void* numeric = nullptr;
  double control[UMFPACK_CONTROL];
  ~Impl() {
    if (numeric) umfpack_zl_free_numeric(&numeric);
  }
};

ComplexSparseLU::ComplexSparseLU(const Eigen::SparseMatrix<std::complex<double>>& A,
                                 double rcond_min)
    : impl_(std::make_unique<Impl>()), n_(static_cast<int>(A.rows())) {
  if (A.rows() != A.cols()) throw SolverError("matrix is not square");
  Eigen::SparseMatrix<std::complex<double>> C = A;
  C.makeCompressed();
  Impl& m = *impl_;
  m.Ap.assign(C.outerIndexPtr(), C.outerIndexPtr() + C.cols() + 1);
  m.Ai.assign(C.innerIndexPtr(), C.innerIndexPtr() + C.nonZeros());
  m.Ax.resize(2 * C.nonZeros());
  for (Eigen::Index k = 0; k < C.nonZeros(); ++k) {
    m.Ax[2 * k] = C.valuePtr()[k].real();
    m.Ax[2 * k + 1] = C.valuePtr()[k].imag();
  }
  umfpack_zl_defaults(m.control);
  double info[UMFPACK_INFO];
  void* symbolic = nullptr;
  SuiteSparse_long status = umfpack_zl_symbolic(n_, n_, m.Ap.data(), m.Ai.data(), m.Ax.data(),
                                                nullptr, &symbolic, m.control, info);
  if (status != UMFPACK_OK) {
    if (symbolic) umfpack_zl_free_symbolic(&symbolic);
    throw SolverError("symbolic factorization failed (status " + std::to_string(status) + ")");
  }
  status = umfpack_zl_numeric(m.Ap.data(), m.Ai.data(), m.Ax.data(), nullptr, symbolic,
                              &m.numeric, m.control, info);
  umfpack_zl_free_symbolic(&symbolic);
  rcond_ = info[UMFPACK_RCOND];
  if (status == UMFPACK_WARNING_singular_matrix || !(rcond_ >= rcond_min))
    throw SolverError("resonant or degenerate system (rcond " + std::to_string(rcond_) + ")");
  if (status != UMFPACK_OK)
    throw SolverError("numeric factorization failed (status " + std::to_string(status) + ")");
}

ComplexSparseLU::~ComplexSparseLU() = default;

Eigen::MatrixXcd ComplexSparseLU::solve(const Eigen::MatrixXcd& B) const {
  if (B.rows() != n_) throw SolverError("right-hand side has wrong size");
  const Impl& m = *impl_;
  Eigen::MatrixXcd X(n_, B.cols());
  double info[UMFPACK_INFO];
  for (Eigen::Index c = 0; c < B.cols(); ++c) {
    Eigen::VectorXcd b = B.col(c);
    Eigen::VectorXcd x(n_);
    SuiteSparse_long status = umfpack_zl_solve(
        UMFPACK_A, m.Ap.data(), m.Ai.data(), m.Ax.data(), nullptr,
        reinterpret_cast<double*>(x.data()), nullptr, reinterpret_cast<const double*>(b.data()),
        nullptr, m.numeric, m.control, info);
    if (status != UMFPACK_OK) throw SolverError("solve failed (status " + std::to_string(status) + ")");
    X.col(c) = x;
  }
  return X;
}

}  // namespace modeconv
