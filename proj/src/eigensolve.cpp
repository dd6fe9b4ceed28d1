#include "strips/eigensolve.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <sstream>
#include <vector>

namespace strips {

namespace {

// Uniform [-1,1] from raw mt19937_64 draws; avoids the implementation-
// defined std::*_distribution so starting subspaces are reproducible.
Eigen::MatrixXd seeded_matrix(int rows, int cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Eigen::MatrixXd m(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) {
      const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
      m(i, j) = 2.0 * u - 1.0;
    }
  return m;
}

Eigen::VectorXd pair_residuals(const SpMat& K, const SpMat& M, const Eigen::VectorXd& lambda,
                               const Eigen::MatrixXd& X, int count) {
  Eigen::VectorXd r(count);
  for (int i = 0; i < count; ++i) {
    const Eigen::VectorXd x = X.col(i);
    const double num = (K * x - lambda(i) * (M * x)).norm();
    const double xm = std::sqrt(std::abs(x.dot(M * x)));
    r(i) = num / ((1.0 + std::abs(lambda(i))) * (xm > 0 ? xm : 1.0));
  }
  return r;
}

int cluster_extent(const Eigen::VectorXd& lambda, int count, double rtol) {
  int k = count;
  while (k < lambda.size() &&
         std::abs(lambda(k) - lambda(k - 1)) < rtol * std::max(1.0, std::abs(lambda(k - 1))))
    ++k;
  return k;
}

}  // namespace

EigenResult solve_gevp_smallest(const SpMat& K, const SpMat& M, int count, double shift,
                                const GevpOptions& opts) {
  const int n = static_cast<int>(K.rows());
  if (K.rows() != K.cols() || M.rows() != M.cols() || K.rows() != M.rows())
    throw std::invalid_argument("solve_gevp_smallest: dimension mismatch");
  if (count < 1) throw std::invalid_argument("solve_gevp_smallest: count must be >= 1");
  if (count > n) throw std::invalid_argument("solve_gevp_smallest: count exceeds dimension");

  const int m = std::min(n, 2 * count + opts.subspace_extra);
  Eigen::MatrixXd X = seeded_matrix(n, m, opts.seed);

  double sigma = shift;
  Eigen::VectorXd lambda;
  Eigen::VectorXd best_res;
  int total_iter = 0;
  int want = count;

  for (int attempt = 0; attempt < opts.max_refactor; ++attempt) {
    Eigen::SparseLU<SpMat> lu;
    {
      SpMat A = K - sigma * M;
      A.makeCompressed();
      lu.compute(A);
    }
    if (lu.info() != Eigen::Success) {
      // sigma hit an eigenvalue; nudge and refactor
      sigma -= 1e-6 * (1.0 + std::abs(sigma));
      continue;
    }

    const int inner_cap = std::max(8, opts.max_iterations / opts.max_refactor);
    for (int it = 0; it < inner_cap; ++it) {
      ++total_iter;
      Eigen::MatrixXd Z = lu.solve(M * X);
      Eigen::MatrixXd Kp = Z.transpose() * (K * Z);
      Eigen::MatrixXd Mp = Z.transpose() * (M * Z);
      Kp = 0.5 * (Kp + Kp.transpose()).eval();
      Mp = 0.5 * (Mp + Mp.transpose()).eval();
      Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(Kp, Mp);
      if (ges.info() != Eigen::Success) {
        // degenerate subspace; re-seed and retry
        X = seeded_matrix(n, m, opts.seed + static_cast<std::uint64_t>(total_iter) + 1);
        continue;
      }
      X = Z * ges.eigenvectors();
      lambda = ges.eigenvalues();

      want = cluster_extent(lambda, count, opts.cluster_rtol);
      best_res = pair_residuals(K, M, lambda, X, want);
      if ((best_res.array() < opts.tol).all()) {
        EigenResult out;
        out.eigenvalues = lambda.head(want);
        out.eigenvectors = X.leftCols(want);
        out.residual_norms = best_res;
        out.iterations = total_iter;
        if (out.eigenvalues(0) < shift - 1e-9 * (1.0 + std::abs(shift))) {
          // keep only the pairs at or above the requested shift
          int first = 0;
          while (first < want && out.eigenvalues(first) < shift - 1e-9 * (1.0 + std::abs(shift)))
            ++first;
          if (want - first < count)
            throw SolverError("solve_gevp_smallest: fewer than count eigenvalues above shift",
                              best_res);
          out.eigenvalues = out.eigenvalues.segment(first, want - first).eval();
          out.eigenvectors = out.eigenvectors.middleCols(first, want - first).eval();
          out.residual_norms = out.residual_norms.segment(first, want - first).eval();
        }
        return out;
      }

      // after a couple of sweeps, move sigma just below the lowest Ritz
      // value: the transformed spectrum then separates the target cluster
      if (it == 2 && attempt + 1 < opts.max_refactor) {
        const double span =
            std::max(lambda(std::min(want, m - 1)) - lambda(0), 1e-3 * (1.0 + std::abs(lambda(0))));
        const double proposed = lambda(0) - 0.1 * span;
        if (std::abs(proposed - sigma) > 1e-3 * span) {
          sigma = proposed;
          break;  // refactor at the new shift
        }
      }
    }
  }
  std::ostringstream msg;
  msg << "solve_gevp_smallest: no convergence after " << total_iter << " iterations; best residual "
      << (best_res.size() ? best_res.maxCoeff() : std::nan(""));
  throw SolverError(msg.str(), best_res);
}

EigenResult solve_gevp_dense(const SpMat& K, const SpMat& M, int count) {
  const int n = static_cast<int>(K.rows());
  if (n > 2000) throw std::invalid_argument("solve_gevp_dense: dimension above dense threshold");
  Eigen::MatrixXd Kd = Eigen::MatrixXd(K);
  Eigen::MatrixXd Md = Eigen::MatrixXd(M);
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(Kd, Md);
  if (ges.info() != Eigen::Success) throw SolverError("solve_gevp_dense: factorization failed");
  count = std::min(count, n);
  EigenResult out;
  out.eigenvalues = ges.eigenvalues().head(count);
  out.eigenvectors = ges.eigenvectors().leftCols(count);
  out.residual_norms = pair_residuals(K, M, out.eigenvalues, out.eigenvectors, count);
  out.iterations = 1;
  return out;
}

Eigen::VectorXcd solve_complex_symmetric(const SpMatC& A, const Eigen::VectorXcd& b) {
  if (A.rows() != A.cols() || A.rows() != b.size())
    throw std::invalid_argument("solve_complex_symmetric: dimension mismatch");

  // symmetric diagonal equilibration: graded meshes spread row magnitudes
  // over many orders, which the factorization should not have to absorb
  Eigen::VectorXd scale = Eigen::VectorXd::Ones(A.rows());
  for (int k = 0; k < A.outerSize(); ++k)
    for (SpMatC::InnerIterator it(A, k); it; ++it)
      scale(it.row()) = std::max(scale(it.row()), std::abs(it.value()));
  scale = scale.cwiseSqrt().cwiseInverse();

  SpMatC Ac = A;
  for (int k = 0; k < Ac.outerSize(); ++k)
    for (SpMatC::InnerIterator it(Ac, k); it; ++it)
      it.valueRef() *= scale(it.row()) * scale(it.col());
  Ac.makeCompressed();
  Eigen::SparseLU<SpMatC> lu(Ac);
  if (lu.info() != Eigen::Success)
    throw SolverError("solve_complex_symmetric: LU factorization failed (singular system)");
  // mixed-precision iterative refinement: the extended-precision residual
  // keeps refining below the double-precision floor eps*||A||*||x||/||b||,
  // which the b-small Robin loads would otherwise hit
  using CLD = std::complex<long double>;
  const auto residual_ld = [&](const Eigen::VectorXcd& xs, Eigen::VectorXcd& out) -> double {
    std::vector<CLD> acc(A.rows());
    for (int i = 0; i < b.size(); ++i) acc[i] = CLD(b(i).real(), b(i).imag());
    for (int k = 0; k < A.outerSize(); ++k) {
      const CLD xk(xs(k).real(), xs(k).imag());
      for (SpMatC::InnerIterator it(A, k); it; ++it)
        acc[it.row()] -= CLD(it.value().real(), it.value().imag()) * xk;
    }
    long double norm2 = 0.0L;
    for (int i = 0; i < A.rows(); ++i) {
      out(i) = std::complex<double>(static_cast<double>(acc[i].real()),
                                    static_cast<double>(acc[i].imag()));
      norm2 += std::norm(acc[i]);
    }
    return static_cast<double>(std::sqrt(norm2));
  };

  const auto scaled_solve = [&](const Eigen::VectorXcd& rhs) -> Eigen::VectorXcd {
    return scale.asDiagonal() * lu.solve((scale.asDiagonal() * rhs).eval()).eval();
  };

  Eigen::VectorXcd x = scaled_solve(b);
  const double bnorm = b.norm() > 0 ? b.norm() : 1.0;
  Eigen::VectorXcd r(A.rows());
  double rel = residual_ld(x, r) / bnorm;
  for (int step = 0; step < 6 && rel >= 1e-12; ++step) {
    x += scaled_solve(r);
    const double next = residual_ld(x, r) / bnorm;
    if (next >= 0.5 * rel) {
      rel = std::min(rel, next);
      break;  // stagnation
    }
    rel = next;
  }
  if (!(rel < 1e-10)) {
    // rough 1-norm condition estimate via a few rounds of Hager's method
    // on the factorization (A symmetric, so transpose solves coincide)
    Eigen::VectorXcd v = Eigen::VectorXcd::Constant(A.rows(), 1.0 / double(A.rows()));
    double inv_norm = 0.0;
    for (int k = 0; k < 4; ++k) {
      Eigen::VectorXcd w = scaled_solve(v);
      inv_norm = w.template lpNorm<1>();
      for (int i = 0; i < w.size(); ++i) {
        const double a = std::abs(w(i));
        w(i) = a > 0 ? w(i) / a : std::complex<double>(1, 0);
      }
      v = scaled_solve(w);
      double vmax = 0.0;
      int jmax = 0;
      for (int i = 0; i < v.size(); ++i)
        if (std::abs(v(i)) > vmax) {
          vmax = std::abs(v(i));
          jmax = i;
        }
      v.setZero();
      v(jmax) = 1.0;
    }
    double a1 = 0.0;
    for (int k = 0; k < A.outerSize(); ++k) {
      double col = 0.0;
      for (SpMatC::InnerIterator it(A, k); it; ++it) col += std::abs(it.value());
      a1 = std::max(a1, col);
    }
    std::ostringstream msg;
    msg << "solve_complex_symmetric: relative residual " << rel
        << " above 1e-10; condition estimate ~" << a1 * inv_norm;
    throw SolverError(msg.str());
  }
  return x;
}

InertiaSign smallest_eigenvalue_sign(const SpMat& K_constrained) {
  Eigen::SimplicialLDLT<SpMat> ldlt(K_constrained);
  if (ldlt.info() != Eigen::Success)
    throw SolverError("smallest_eigenvalue_sign: LDLT factorization failed");
  const Eigen::VectorXd d = ldlt.vectorD();
  const double scale = d.cwiseAbs().maxCoeff();
  InertiaSign out;
  int zeros = 0;
  for (int i = 0; i < d.size(); ++i) {
    if (d(i) < -1e-14 * scale)
      ++out.negative_count;
    else if (d(i) < 1e-14 * scale)
      ++zeros;
  }
  out.sign = out.negative_count > 0 ? -1 : (zeros > 0 ? 0 : 1);
  return out;
}

}  // namespace strips
