#pragma once

#include <Eigen/Core>
#include <array>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "modeconv/fem.hpp"
#include "modeconv/geometry.hpp"
#include "modeconv/mesh.hpp"

namespace modeconv {

struct SolverParams {
  MeshParams mesh;
  int n_terms = 15;          // DtN terms
  double rcond_min = 1e-14;  // factorization guard
  double contamination_tol = 1e-2;  // evanescent level flagged at the DtN boundaries
};

enum class ProblemKind { Full, HalfNeumann, HalfDirichlet };

const char* to_string(ProblemKind kind);

struct RunMetadata {
  double omega = 0.0;
  std::vector<LigamentSpec> ligaments;
  double R = 0.0;
  double h = 0.0;
  int junction_levels = 0;
  int n_terms = 0;
  std::uint64_t mesh_fingerprint = 0;  // of the half mesh
  int n_dofs = 0;
};

// Row i holds the coefficients for incident mode i: R(i, j) = r_ij.
struct ScatteringMatrices {
  ProblemKind kind = ProblemKind::Full;
  Eigen::Matrix2cd R = Eigen::Matrix2cd::Zero();  // R, R_N or R_D
  Eigen::Matrix2cd T = Eigen::Matrix2cd::Zero();  // full problems only
  RunMetadata meta;
  std::array<double, 2> energy{};   // propagating flux per row, ideally 1
  std::vector<double> residuals;    // relative residual per solve
  double rcond = 0.0;
  bool contaminated = false;        // evanescent content above tolerance at a boundary
};

struct ScatteringRun {
  ScatteringMatrices S;
  std::shared_ptr<const FemSpace> space;
  Eigen::MatrixXcd fields;  // total field, one column per incident mode
};

ScatteringRun full_scattering(WaveguideGeometry geom, double omega, const SolverParams& params);
ScatteringRun half_scattering(WaveguideGeometry geom, double omega, Abc abc,
                              const SolverParams& params);

// Neumann and Dirichlet half problems sharing one mesh and element matrices.
struct HalfPair {
  ScatteringRun N, D;
};
HalfPair half_scattering_pair(WaveguideGeometry geom, double omega, const SolverParams& params);

// Entrywise maximum modulus.
double max_abs(const Eigen::Matrix2cd& A);

struct DecompositionReport {
  double r_residual = 0.0;  // ||R - (R_N + R_D) / 2||_max
  double t_residual = 0.0;  // ||T - (R_N - R_D) / 2||_max
};

DecompositionReport verify_decomposition(const Eigen::Matrix2cd& R, const Eigen::Matrix2cd& T,
                                         const Eigen::Matrix2cd& RN, const Eigen::Matrix2cd& RD);

// Checks that the runs are comparable first; throws IncomparableRunsError otherwise.
DecompositionReport verify_decomposition(const ScatteringMatrices& full,
                                         const ScatteringMatrices& N,
                                         const ScatteringMatrices& D);

// Full problem and both half problems, solved concurrently, with the identity residuals.
struct DecompositionRuns {
  ScatteringRun full;
  HalfPair half;
  DecompositionReport report;
};
DecompositionRuns run_decomposition(const WaveguideGeometry& geom, double omega,
                                    const SolverParams& params);

// Largest |Re u| and |Im u| over the DOFs of ligament `lig` (0-based) for incident column c.
struct FieldPeak {
  double re = 0.0, im = 0.0, abs = 0.0;
};
FieldPeak field_peak(const ScatteringRun& run, int column, int lig);

void write_csv_header(std::ostream& os, const ScatteringMatrices&);
// One row per matrix: kind, omega, R, h, then the 8 entries as re, im pairs in row order.
void write_csv(std::ostream& os, const ScatteringMatrices& S);
std::string format_matrix(const Eigen::Matrix2cd& A);

}  // namespace modeconv
