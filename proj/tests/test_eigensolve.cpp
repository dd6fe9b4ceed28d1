#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>

#include "strips/eigensolve.hpp"
#include "strips/geometry.hpp"
#include "strips/harness.hpp"
#include "strips/scattering.hpp"

using namespace strips;

namespace {
constexpr double kPi = 3.14159265358979323846;
const std::complex<double> kI(0.0, 1.0);

struct Pencil {
  SpMat K, M;
};

Pencil constrained_pencil(const Mesh& mesh, const std::set<EdgeTag>& tags) {
  const DofMap map = make_dof_map(mesh, tags);
  return {reduce(assemble_stiffness(mesh), map), reduce(assemble_mass(mesh), map)};
}

Pencil random_spd_pencil(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto u = [&] { return 2.0 * (double(rng() >> 11) * 0x1.0p-53) - 1.0; };
  Eigen::MatrixXd A(n, n), B(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      A(i, j) = u();
      B(i, j) = 0.2 * u();
    }
  Eigen::MatrixXd Kd = 0.5 * (A + A.transpose()) + n * Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd Md = B * B.transpose() + Eigen::MatrixXd::Identity(n, n);
  return {Kd.sparseView(), Md.sparseView()};
}
}  // namespace

TEST_CASE("1x1 pencil K=[2], M=[1]") {
  SpMat K(1, 1), M(1, 1);
  K.insert(0, 0) = 2.0;
  M.insert(0, 0) = 1.0;
  const EigenResult r = solve_gevp_smallest(K, M, 1);
  CHECK(r.eigenvalues(0) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("shift-invert agrees with the dense oracle on random pencils") {
  for (std::uint64_t seed : {11u, 29u, 53u}) {
    const Pencil p = random_spd_pencil(40, seed);
    const EigenResult sparse = solve_gevp_smallest(p.K, p.M, 5);
    const EigenResult dense = solve_gevp_dense(p.K, p.M, 5);
    for (int i = 0; i < 5; ++i)
      CHECK(sparse.eigenvalues(i) ==
            doctest::Approx(dense.eigenvalues(i)).epsilon(1e-9));
    CHECK((sparse.residual_norms.array() < 1e-9).all());
    // M-orthonormality of the returned vectors
    Eigen::MatrixXd G = sparse.eigenvectors.transpose() * (p.M * sparse.eigenvectors);
    CHECK((G - Eigen::MatrixXd::Identity(5, 5)).cwiseAbs().maxCoeff() < 1e-8);
  }
}

TEST_CASE("all-Dirichlet rectangle: lambda_1 = pi^2 (1 + 1/eps^2)") {
  const double eps = 0.2;
  const Mesh mesh = build_trapezoid_mesh({eps, 0.0}, eps / 10.0, GradingSpec::none());
  const Pencil p = constrained_pencil(mesh, {EdgeTag::DirichletWall, EdgeTag::FreeSide});
  const EigenResult r = solve_gevp_smallest(p.K, p.M, 1);
  CHECK(r.eigenvalues(0) ==
        doctest::Approx(kPi * kPi * (1.0 + 1.0 / (eps * eps))).epsilon(1e-4));
}

TEST_CASE("alpha=0 spectrum converges at the element order's rate") {
  const double eps = 0.1;
  const double exact = exact_alpha0_spectrum(eps, 1)[0];
  for (ElementOrder order : {ElementOrder::P1, ElementOrder::P2}) {
    Mesh mesh = build_trapezoid_mesh({eps, 0.0}, eps / 4.0, GradingSpec::none(), order);
    double prev_err = 0.0;
    std::vector<double> errs;
    for (int level = 0; level < 3; ++level) {
      const Pencil p = constrained_pencil(mesh, {EdgeTag::DirichletWall});
      const EigenResult r = solve_gevp_smallest(p.K, p.M, 1);
      errs.push_back(r.eigenvalues(0) - exact);
      CHECK(errs.back() > 0.0);  // conforming FEM from above
      if (level + 1 < 3) mesh = refine(mesh);
      (void)prev_err;
    }
    const double expected_ratio = order == ElementOrder::P1 ? 4.0 : 16.0;
    CHECK(errs[0] / errs[1] == doctest::Approx(expected_ratio).epsilon(0.3));
    CHECK(errs[1] / errs[2] == doctest::Approx(expected_ratio).epsilon(0.3));
  }
}

TEST_CASE("conforming refinement never increases eigenvalues") {
  for (double alpha : {0.0, kPi / 4.0}) {
    const Mesh coarse = build_trapezoid_mesh({0.1, alpha}, 0.02);
    const Mesh fine = refine(coarse);
    const Pencil pc = constrained_pencil(coarse, {EdgeTag::DirichletWall});
    const Pencil pf = constrained_pencil(fine, {EdgeTag::DirichletWall});
    const EigenResult rc = solve_gevp_smallest(pc.K, pc.M, 3);
    const EigenResult rf = solve_gevp_smallest(pf.K, pf.M, 3);
    for (int i = 0; i < 3; ++i) CHECK(rf.eigenvalues(i) <= rc.eigenvalues(i) + 1e-9);
    CHECK(rc.eigenvalues(1) - rc.eigenvalues(0) > 0.0);  // lambda_1 simple
  }
}

TEST_CASE("rayleigh quotient of the interpolated exact mode converges") {
  const double eps = 0.1;
  const double exact = kPi * kPi / (eps * eps) + kPi * kPi / 4.0;
  std::vector<double> errs;
  Mesh mesh = build_trapezoid_mesh({eps, 0.0}, eps / 4.0, GradingSpec::none());
  for (int level = 0; level < 2; ++level) {
    Eigen::VectorXd f(mesh.n_dofs());
    for (int i = 0; i < mesh.n_dofs(); ++i)
      f(i) = 2.0 * std::cos(kPi * mesh.nodes(i, 0) / 2.0) *
             std::sin(kPi * mesh.nodes(i, 1) / eps) / std::sqrt(eps);
    const SpMat K = assemble_stiffness(mesh);
    const SpMat M = assemble_mass(mesh);
    errs.push_back(std::abs(f.dot(K * f) / f.dot(M * f) - exact));
    if (level == 0) mesh = refine(mesh);
  }
  CHECK(errs[0] / errs[1] > 10.0);  // P2: about 16
}

TEST_CASE("spectra of T(alpha) and T(-alpha) agree within 10 eps lambda_1") {
  const double eps = 0.02, alpha = 0.3;
  TrapezoidSolveOptions opts;
  const auto plus = trapezoid_spectrum({eps, alpha}, 3, opts);
  const auto minus = trapezoid_spectrum({eps, -alpha}, 3, opts);
  for (int i = 0; i < 3; ++i)
    CHECK(std::abs(plus.result.eigenvalues(i) - minus.result.eigenvalues(i)) <
          10.0 * eps * plus.result.eigenvalues(0));
}

TEST_CASE("an eigenvalue sits below the normalized threshold at alpha = pi/4") {
  // coarse mesh so the dense oracle can cross-check the sparse path
  const double eps = 0.02;
  TrapezoidSolveOptions opts;
  opts.y_layers = 5;
  opts.x_target_h = 1.0 / 12.0;
  opts.h = eps / 5.0;
  const auto sol = trapezoid_spectrum({eps, kPi / 4.0}, 2, opts);
  CHECK(sol.result.eigenvalues(0) < normalized_threshold(eps));
  CHECK(sol.result.eigenvalues(1) > normalized_threshold(eps));

  const Pencil p = constrained_pencil(sol.mesh, {EdgeTag::DirichletWall});
  if (p.K.rows() <= 2000) {
    const EigenResult dense = solve_gevp_dense(p.K, p.M, 2);
    CHECK(sol.result.eigenvalues(0) ==
          doctest::Approx(dense.eigenvalues(0)).epsilon(1e-9));
  }
}

TEST_CASE("complex solver: identity, diagonal, variational identity") {
  const int n = 50;
  std::mt19937_64 rng(7);
  auto u = [&] { return 2.0 * (double(rng() >> 11) * 0x1.0p-53) - 1.0; };
  Eigen::VectorXcd b(n);
  for (int i = 0; i < n; ++i) b(i) = std::complex<double>(u(), u());

  SpMatC I(n, n), D(n, n);
  const std::complex<double> d(8.0, -1.0);
  for (int i = 0; i < n; ++i) {
    I.insert(i, i) = 1.0;
    D.insert(i, i) = d;
  }
  CHECK((solve_complex_symmetric(I, b) - b).norm() < 1e-12);
  CHECK((solve_complex_symmetric(D, b) - b / d).norm() < 1e-12);

  // assembled Robin system at alpha = 0: S(0) = -1 within 1e-6 at L = 8.
  // The exact field is X-independent, so coarse x / fine y suffices.
  ScanOptions opts;
  opts.h = 0.1;
  opts.y_layers = 96;
  const ThresholdField field = solve_threshold_field({0.0, 8.0}, opts);
  const std::complex<double> S = scattering_coefficient(field);
  CHECK(std::abs(S + 1.0) < 1e-6);

  // discrete variational identity against 20 seeded test vectors
  const SpMat K = assemble_stiffness(field.mesh);
  const SpMat M = assemble_mass(field.mesh);
  const RobinBoundary rb = assemble_robin_boundary(field.mesh, 8.0);
  SpMatC A = (K - kPi * kPi * M).cast<std::complex<double>>() + rb.matrix;
  const DofMap map = make_dof_map(field.mesh, {EdgeTag::DirichletWall});
  const SpMatC Ar = reduce(A, map);
  const Eigen::VectorXcd x =
      reduce_vector<std::complex<double>>(field.values, map);
  const Eigen::VectorXcd rhs = reduce_vector<std::complex<double>>(rb.load, map);
  for (int k = 0; k < 20; ++k) {
    Eigen::VectorXcd v(Ar.rows());
    for (int i = 0; i < v.size(); ++i) v(i) = std::complex<double>(u(), u());
    const std::complex<double> lhs = v.transpose() * (Ar * x);
    const std::complex<double> rhsv = v.transpose() * rhs;
    CHECK(std::abs(lhs - rhsv) <= 1e-9 * (std::abs(lhs) + std::abs(rhsv) + 1.0));
  }
}

TEST_CASE("inertia signs match the spectrum") {
  const double eps = 0.2;
  const Mesh mesh = build_trapezoid_mesh({eps, 0.0}, eps / 8.0, GradingSpec::none());
  const Pencil p = constrained_pencil(mesh, {EdgeTag::DirichletWall, EdgeTag::FreeSide});

  CHECK(smallest_eigenvalue_sign(p.K).sign == 1);

  // conforming eigenvalues approach lambda_1 from above, so the pencil
  // shifted by the exact lambda_1 stays positive; any shift strictly above
  // it (beyond the FEM error) sends the smallest eigenvalue negative
  const double lam1_exact = kPi * kPi * (1.0 + 1.0 / (eps * eps));
  CHECK(smallest_eigenvalue_sign((p.K - lam1_exact * p.M).eval()).sign == 1);
  CHECK(smallest_eigenvalue_sign((p.K - 1.001 * lam1_exact * p.M).eval()).sign == -1);

  // mu strictly between lambda_1 and lambda_2: exactly one negative direction
  const EigenResult dense = solve_gevp_dense(p.K, p.M, 2);
  const double mu = 0.5 * (dense.eigenvalues(0) + dense.eigenvalues(1));
  const InertiaSign s = smallest_eigenvalue_sign((p.K - mu * p.M).eval());
  CHECK(s.sign == -1);
  CHECK(s.negative_count == 1);
}

TEST_CASE("non-convergence reports best residuals") {
  const Pencil p = random_spd_pencil(30, 3);
  GevpOptions opts;
  opts.tol = 1e-30;  // unattainable
  opts.max_iterations = 8;
  opts.max_refactor = 1;
  try {
    solve_gevp_smallest(p.K, p.M, 3, 0.0, opts);
    CHECK(false);
  } catch (const SolverError& e) {
    CHECK(e.best_residuals.size() >= 3);
  }
}
