#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <sstream>

#include "strips/eigensolve.hpp"
#include "strips/fem.hpp"
#include "strips/geometry.hpp"

using namespace strips;

namespace {
constexpr double kPi = 3.14159265358979323846;
const std::complex<double> kI(0.0, 1.0);

Mesh unit_right_triangle(ElementOrder order) {
  // one triangle (0,0)-(1,0)-(0,1); boundary tags irrelevant here
  Mesh mesh;
  mesh.order = order;
  mesh.n_vertices = 3;
  mesh.nodes.resize(order == ElementOrder::P1 ? 3 : 6, 2);
  mesh.nodes.row(0) << 0, 0;
  mesh.nodes.row(1) << 1, 0;
  mesh.nodes.row(2) << 0, 1;
  mesh.triangles.resize(1, 3);
  mesh.triangles.row(0) << 0, 1, 2;
  mesh.tri_dofs.resize(1, 6);
  if (order == ElementOrder::P1) {
    mesh.tri_dofs.row(0) << 0, 1, 2, -1, -1, -1;
  } else {
    mesh.nodes.row(3) << 0.5, 0.5;
    mesh.nodes.row(4) << 0, 0.5;
    mesh.nodes.row(5) << 0.5, 0;
    mesh.tri_dofs.row(0) << 0, 1, 2, 3, 4, 5;
  }
  mesh.corner_nodes = {0, 2};
  return mesh;
}
}  // namespace

TEST_CASE("P1 element stiffness on the unit right triangle") {
  const Mesh mesh = unit_right_triangle(ElementOrder::P1);
  const SpMat K = assemble_stiffness(mesh);
  Eigen::MatrixXd Kd(K);
  Eigen::MatrixXd expected(3, 3);
  expected << 1.0, -0.5, -0.5, -0.5, 0.5, 0.0, -0.5, 0.0, 0.5;
  CHECK((Kd - expected).cwiseAbs().maxCoeff() < 1e-15);
  CHECK(Kd.rowwise().sum().cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("P1 element mass is area/12 (2 on the diagonal)") {
  const Mesh mesh = unit_right_triangle(ElementOrder::P1);
  Eigen::MatrixXd Md(assemble_mass(mesh));
  const double a12 = 0.5 / 12.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      CHECK(Md(i, j) == doctest::Approx((i == j ? 2 : 1) * a12).epsilon(1e-14));
}

TEST_CASE("unconstrained stiffness annihilates constants; mass sums to the area") {
  for (ElementOrder order : {ElementOrder::P1, ElementOrder::P2}) {
    const Mesh mesh = build_trapezoid_mesh({0.05, 0.4}, 0.01, {}, order);
    const SpMat K = assemble_stiffness(mesh);
    const SpMat M = assemble_mass(mesh);
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(mesh.n_dofs());
    CHECK((K * ones).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(ones.dot(M * ones) ==
          doctest::Approx(TrapezoidGeom{0.05, 0.4}.area()).epsilon(1e-12));
  }
}

TEST_CASE("stored stiffness and mass are exactly symmetric") {
  const Mesh mesh = build_trapezoid_mesh({0.05, 0.7}, 0.01);
  for (const SpMat& A : {assemble_stiffness(mesh), assemble_mass(mesh)}) {
    SpMat D = A - SpMat(A.transpose());
    double m = 0.0;
    for (int k = 0; k < D.outerSize(); ++k)
      for (SpMat::InnerIterator it(D, k); it; ++it) m = std::max(m, std::abs(it.value()));
    CHECK(m == 0.0);
  }
}

TEST_CASE("dirichlet elimination keeps exactly the advertised free dofs") {
  const Mesh mesh = build_trapezoid_mesh({0.1, 0.0}, 0.02, GradingSpec::none());
  const DofMap map = make_dof_map(mesh, {EdgeTag::DirichletWall});
  // free = interior + FreeSide minus the two shared corner nodes
  for (int id : map.free_to_full) {
    const double x = mesh.nodes(id, 0), y = mesh.nodes(id, 1);
    const bool on_sigma = y < 1e-14 || y > 0.1 - 1e-14 || x > 1.0 - 1e-14;
    CHECK(!on_sigma);
  }
  for (int corner : mesh.corner_nodes) CHECK(map.full_to_free[corner] == -1);

  CHECK_THROWS_AS(make_dof_map(mesh, {}), std::invalid_argument);
}

TEST_CASE("constraining every tag on an all-boundary mesh is rejected") {
  // 2x2 rectangle mesh: P1 nodes are all on the boundary
  const Mesh mesh = build_trapezoid_mesh({0.5, 0.0}, 0.25, GradingSpec::none(), ElementOrder::P1);
  bool all_boundary = true;
  std::vector<char> onb(mesh.n_dofs(), 0);
  for (const auto& e : mesh.boundary_edges) onb[e.a] = onb[e.b] = 1;
  for (char c : onb) all_boundary &= (c != 0);
  if (all_boundary)
    CHECK_THROWS_AS(
        make_dof_map(mesh, {EdgeTag::DirichletWall, EdgeTag::FreeSide}), std::invalid_argument);
}

TEST_CASE("constrained stiffness is positive definite") {
  const Mesh mesh = build_trapezoid_mesh({0.1, 0.5}, 0.02);
  const auto con = apply_dirichlet<double>(assemble_stiffness(mesh), mesh,
                                           {EdgeTag::DirichletWall});
  CHECK(smallest_eigenvalue_sign(con.matrix).sign == 1);
  CHECK(smallest_eigenvalue_sign(con.matrix).negative_count == 0);
}

TEST_CASE("P2 mass norm of the interpolated transverse mode") {
  // || sin(pi y / eps) ||_M = sqrt(eps/2) up to O(h^4) on the rectangle
  const double eps = 0.1;
  const Mesh mesh = build_trapezoid_mesh({eps, 0.0}, eps / 8.0, GradingSpec::none());
  Eigen::VectorXd f(mesh.n_dofs());
  for (int i = 0; i < mesh.n_dofs(); ++i) f(i) = std::sin(kPi * mesh.nodes(i, 1) / eps);
  const SpMat M = assemble_mass(mesh);
  CHECK(std::sqrt(f.dot(M * f)) == doctest::Approx(std::sqrt(eps / 2.0)).epsilon(1e-5));
}

TEST_CASE("robin boundary: entry sum, load on the incoming trace, locality") {
  const double L = 8.0;
  const Mesh mesh = build_halfstrip_mesh({0.0, L}, 0.05);
  const RobinBoundary rb = assemble_robin_boundary(mesh, L);

  std::complex<double> sum(0.0, 0.0);
  for (int k = 0; k < rb.matrix.outerSize(); ++k)
    for (SpMatC::InnerIterator it(rb.matrix, k); it; ++it) sum += it.value();
  const std::complex<double> expected = -(L + kI) / (L * L + 1.0);
  CHECK(std::abs(sum - expected) < 1e-12);

  // load applied to the interpolated sin(pi Y): -2i/(L^2+1) (L+i) / 2
  Eigen::VectorXcd f = Eigen::VectorXcd::Zero(mesh.n_dofs());
  for (int i = 0; i < mesh.n_dofs(); ++i) f(i) = std::sin(kPi * mesh.nodes(i, 1));
  const std::complex<double> applied = rb.load.transpose() * f;
  const std::complex<double> want = -2.0 * kI / (L * L + 1.0) * (L + kI) * 0.5;
  CHECK(std::abs(applied - want) < 1e-6);

  // functional vanishes away from Gamma_L
  for (int i = 0; i < mesh.n_dofs(); ++i)
    if (mesh.nodes(i, 0) < L - 1e-9) CHECK(std::abs(rb.load(i)) == 0.0);

  const Mesh trap = build_trapezoid_mesh({0.05, 0.0}, 0.01);
  CHECK_THROWS_AS(assemble_robin_boundary(trap, L), std::invalid_argument);
}

TEST_CASE("robin scale approaches -1/L - i/L^2 as L grows") {
  for (double L : {50.0, 200.0}) {
    const std::complex<double> scale = -1.0 / (L - kI);
    CHECK(scale.real() == doctest::Approx(-1.0 / L).epsilon(1e-3));
    CHECK(scale.imag() == doctest::Approx(-1.0 / (L * L)).epsilon(1e-3));
  }
  // entrywise on the assembled matrices at two L values
  for (double L : {20.0, 40.0}) {
    const Mesh mesh = build_halfstrip_mesh({0.0, L}, 0.25);
    const SpMat bm = boundary_mass(mesh, EdgeTag::ArtificialBoundary);
    const RobinBoundary rb = assemble_robin_boundary(mesh, L);
    for (int k = 0; k < rb.matrix.outerSize(); ++k)
      for (SpMatC::InnerIterator it(rb.matrix, k); it; ++it) {
        const double ref = bm.coeff(it.row(), it.col());
        CHECK(it.value().real() == doctest::Approx(-ref / L).epsilon(0.01));
        CHECK(it.value().imag() == doctest::Approx(-ref / (L * L)).epsilon(0.01));
      }
  }
}

TEST_CASE("gamma integrals: s-weight and interpolated s") {
  const double alpha = 0.9;
  const Mesh mesh = build_halfstrip_mesh({alpha, 8.0}, 0.05);
  const double ell = 1.0 / std::cos(alpha);

  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(mesh.n_dofs());
  CHECK(gamma_weighted_integral(mesh, ones, GammaWeight::ArcLength) ==
        doctest::Approx(ell * ell / 2.0).epsilon(1e-12));

  const Eigen::RowVector2d tip = mesh.nodes.row(mesh.corner_nodes[0]);
  Eigen::VectorXd s_field(mesh.n_dofs());
  for (int i = 0; i < mesh.n_dofs(); ++i)
    s_field(i) = (mesh.nodes.row(i) - tip).norm();
  CHECK(gamma_weighted_integral(mesh, s_field, GammaWeight::One) ==
        doctest::Approx(ell * ell / 2.0).epsilon(1e-10));

  // quadratic homogeneity of the energy pieces
  const GammaEnergy e1 = gamma_weighted_energy(mesh, s_field, GammaWeight::ArcLength);
  const GammaEnergy e3 = gamma_weighted_energy(mesh, (3.0 * s_field).eval(),
                                               GammaWeight::ArcLength);
  CHECK(e3.grad_term == doctest::Approx(9.0 * e1.grad_term).epsilon(1e-12));
  CHECK(e3.mass_term == doctest::Approx(9.0 * e1.mass_term).epsilon(1e-12));

  const Mesh trap = build_trapezoid_mesh({0.05, 0.0}, 0.01);
  Eigen::VectorXd dummy = Eigen::VectorXd::Zero(trap.n_dofs());
  CHECK_NOTHROW(gamma_weighted_integral(trap, dummy, GammaWeight::One));
}

TEST_CASE("coo export emits every stored entry") {
  const Mesh mesh = unit_right_triangle(ElementOrder::P1);
  const SpMat K = assemble_stiffness(mesh);
  std::ostringstream os;
  export_coo(os, K);
  int lines = 0;
  std::string line;
  std::istringstream is(os.str());
  while (std::getline(is, line)) ++lines;
  CHECK(lines == K.nonZeros());
}
