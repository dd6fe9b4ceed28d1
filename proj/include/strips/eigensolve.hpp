#pragma once

#include <Eigen/Core>

#include <stdexcept>
#include <string>

#include "strips/fem.hpp"

namespace strips {

struct SolverError : std::runtime_error {
  explicit SolverError(const std::string& msg, Eigen::VectorXd residuals = {})
      : std::runtime_error(msg), best_residuals(std::move(residuals)) {}
  Eigen::VectorXd best_residuals;
};

// Eigenpairs sorted ascending; eigenvectors M-orthonormal. residual_norms
// holds ||K u - lambda M u|| / ((1 + |lambda|) ||u||_M).
struct EigenResult {
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXd eigenvectors;  // one column per pair
  Eigen::VectorXd residual_norms;
  int iterations = 0;
};

struct GevpOptions {
  double tol = 1e-9;
  int max_iterations = 300;
  int subspace_extra = 8;
  int max_refactor = 4;
  double cluster_rtol = 1e-6;   // relative gap treated as one cluster
  std::uint64_t seed = 0x5452415045ull;  // deterministic starting subspace
};

// Shift-invert subspace iteration with a sparse LU factorization of
// K - sigma M; returns the `count` eigenvalues nearest above `shift`
// (shift = 0 gives the smallest), extended to the full cluster when the
// cut falls inside one. Throws SolverError carrying the best residuals on
// non-convergence.
EigenResult solve_gevp_smallest(const SpMat& K, const SpMat& M, int count, double shift = 0.0,
                                const GevpOptions& opts = {});

// Dense tridiagonalization route (independent oracle), n <= 2000.
EigenResult solve_gevp_dense(const SpMat& K, const SpMat& M, int count);

// Complex-symmetric sparse solve with one step of iterative refinement;
// relative residual below 1e-10 or SolverError with a condition estimate.
Eigen::VectorXcd solve_complex_symmetric(const SpMatC& A, const Eigen::VectorXcd& b);

struct InertiaSign {
  int sign = 0;            // sign of the smallest eigenvalue
  int negative_count = 0;  // matrix inertia (Sylvester)
};

InertiaSign smallest_eigenvalue_sign(const SpMat& K_constrained);

}  // namespace strips
