#include "strips/fem.hpp"

#include <array>
#include <cmath>
#include <ostream>

namespace strips {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Dunavant degree-4 rule, weights normalized to 1.
struct TriQuad {
  std::array<std::array<double, 3>, 6> bary;
  std::array<double, 6> w;
};

const TriQuad& tri_quad() {
  static const TriQuad q = [] {
    TriQuad r{};
    const double a1 = 0.445948490915965, w1 = 0.223381589678011;
    const double a2 = 0.091576213509771, w2 = 0.109951743655322;
    r.bary = {{{1 - 2 * a1, a1, a1},
               {a1, 1 - 2 * a1, a1},
               {a1, a1, 1 - 2 * a1},
               {1 - 2 * a2, a2, a2},
               {a2, 1 - 2 * a2, a2},
               {a2, a2, 1 - 2 * a2}}};
    r.w = {w1, w1, w1, w2, w2, w2};
    return r;
  }();
  return q;
}

// Gauss rules on [0,1], weights summing to 1.
struct LineQuad {
  std::vector<double> t, w;
};

const LineQuad& line_quad3() {
  static const LineQuad q = [] {
    LineQuad r;
    const double p = std::sqrt(3.0 / 5.0);
    r.t = {0.5 * (1 - p), 0.5, 0.5 * (1 + p)};
    r.w = {5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0};
    return r;
  }();
  return q;
}

const LineQuad& line_quad5() {
  static const LineQuad q = [] {
    LineQuad r;
    const double p1 = 0.5384693101056831, w1 = 0.4786286704993665;
    const double p2 = 0.9061798459386640, w2 = 0.2369268850561891;
    r.t = {0.5 * (1 - p2), 0.5 * (1 - p1), 0.5, 0.5 * (1 + p1), 0.5 * (1 + p2)};
    r.w = {w2 / 2, w1 / 2, 0.5688888888888889 / 2, w1 / 2, w2 / 2};
    return r;
  }();
  return q;
}

int dofs_per_element(const Mesh& mesh) { return mesh.order == ElementOrder::P1 ? 3 : 6; }

// P2 values/L-derivatives at barycentric point; dof order [v0 v1 v2 m12 m20 m01].
void p2_shape(const std::array<double, 3>& L, std::array<double, 6>& N,
              std::array<std::array<double, 3>, 6>& dNdL) {
  N = {L[0] * (2 * L[0] - 1), L[1] * (2 * L[1] - 1), L[2] * (2 * L[2] - 1),
       4 * L[1] * L[2],       4 * L[2] * L[0],       4 * L[0] * L[1]};
  dNdL = {{{4 * L[0] - 1, 0, 0},
           {0, 4 * L[1] - 1, 0},
           {0, 0, 4 * L[2] - 1},
           {0, 4 * L[2], 4 * L[1]},
           {4 * L[2], 0, 4 * L[0]},
           {4 * L[1], 4 * L[0], 0}}};
}

struct ElementGeometry {
  double area;
  std::array<std::array<double, 2>, 3> gradL;  // constant barycentric gradients
};

ElementGeometry element_geometry(const Mesh& mesh, int t) {
  const auto p0 = mesh.nodes.row(mesh.triangles(t, 0));
  const auto p1 = mesh.nodes.row(mesh.triangles(t, 1));
  const auto p2 = mesh.nodes.row(mesh.triangles(t, 2));
  ElementGeometry g;
  g.area = mesh.triangle_area(t);
  const double s = 1.0 / (2.0 * g.area);
  g.gradL = {{{(p1(1) - p2(1)) * s, (p2(0) - p1(0)) * s},
              {(p2(1) - p0(1)) * s, (p0(0) - p2(0)) * s},
              {(p0(1) - p1(1)) * s, (p1(0) - p0(0)) * s}}};
  return g;
}

template <typename Fill>
SpMat assemble_volume(const Mesh& mesh, const Fill& element_matrix) {
  const int nd = dofs_per_element(mesh);
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<size_t>(mesh.n_triangles()) * nd * nd);
  Eigen::Matrix<double, 6, 6> ke;
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    ke.setZero();
    element_matrix(t, ke);
    for (int i = 0; i < nd; ++i)
      for (int j = 0; j < nd; ++j)
        trip.emplace_back(mesh.tri_dofs(t, i), mesh.tri_dofs(t, j), ke(i, j));
  }
  SpMat m(mesh.n_dofs(), mesh.n_dofs());
  m.setFromTriplets(trip.begin(), trip.end());
  return m;
}

// 1D traces on one boundary edge, dof order [a, b, mid].
void edge_shape(const Mesh& mesh, double t, std::array<double, 3>& N, std::array<double, 3>& dNdt) {
  if (mesh.order == ElementOrder::P1) {
    N = {1 - t, t, 0};
    dNdt = {-1, 1, 0};
  } else {
    N = {(1 - t) * (1 - 2 * t), t * (2 * t - 1), 4 * t * (1 - t)};
    dNdt = {4 * t - 3, 4 * t - 1, 4 - 8 * t};
  }
}

int edge_dof_count(const Mesh& mesh) { return mesh.order == ElementOrder::P1 ? 2 : 3; }

std::array<int, 3> edge_dofs(const BoundaryEdge& e) { return {e.a, e.b, e.mid}; }

bool has_tag(const Mesh& mesh, EdgeTag tag) {
  for (const auto& e : mesh.boundary_edges)
    if (e.tag == tag) return true;
  return false;
}

template <typename Scalar, typename F>
void gamma_energy_impl(const Mesh& mesh, const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& field,
                       GammaWeight weight, F&& accumulate) {
  if (!has_tag(mesh, EdgeTag::FreeSide)) throw std::invalid_argument("mesh has no FreeSide edges");
  const auto& q = line_quad3();
  const Eigen::RowVector2d tip = mesh.nodes.row(mesh.corner_nodes[0]);
  const int nd = edge_dof_count(mesh);
  std::array<double, 3> N, dN;
  for (const auto& e : mesh.boundary_edges) {
    if (e.tag != EdgeTag::FreeSide) continue;
    const Eigen::RowVector2d pa = mesh.nodes.row(e.a), pb = mesh.nodes.row(e.b);
    const double len = (pb - pa).norm();
    const auto dofs = edge_dofs(e);
    for (size_t k = 0; k < q.t.size(); ++k) {
      edge_shape(mesh, q.t[k], N, dN);
      Scalar f{}, df{};
      for (int i = 0; i < nd; ++i) {
        f += field(dofs[i]) * N[i];
        df += field(dofs[i]) * dN[i];
      }
      const Eigen::RowVector2d p = pa + q.t[k] * (pb - pa);
      const double s = (p - tip).norm();
      const double w = (weight == GammaWeight::One) ? 1.0 : s;
      accumulate(len * q.w[k] * w, f, df / len);
    }
  }
}

}  // namespace

SpMat assemble_stiffness(const Mesh& mesh) {
  const auto& q = tri_quad();
  return assemble_volume(mesh, [&](int t, Eigen::Matrix<double, 6, 6>& ke) {
    const auto g = element_geometry(mesh, t);
    if (mesh.order == ElementOrder::P1) {
      for (int i = 0; i < 3; ++i)
        for (int j = i; j < 3; ++j) {
          const double v = g.area * (g.gradL[i][0] * g.gradL[j][0] + g.gradL[i][1] * g.gradL[j][1]);
          ke(i, j) = v;
          ke(j, i) = v;
        }
      return;
    }
    std::array<double, 6> N;
    std::array<std::array<double, 3>, 6> dNdL;
    for (size_t k = 0; k < q.w.size(); ++k) {
      p2_shape(q.bary[k], N, dNdL);
      std::array<std::array<double, 2>, 6> grad{};
      for (int i = 0; i < 6; ++i)
        for (int c = 0; c < 2; ++c)
          grad[i][c] = dNdL[i][0] * g.gradL[0][c] + dNdL[i][1] * g.gradL[1][c] +
                       dNdL[i][2] * g.gradL[2][c];
      const double w = g.area * q.w[k];
      for (int i = 0; i < 6; ++i)
        for (int j = i; j < 6; ++j) {
          const double v = w * (grad[i][0] * grad[j][0] + grad[i][1] * grad[j][1]);
          ke(i, j) += v;
          if (i != j) ke(j, i) += v;
        }
    }
  });
}

SpMat assemble_mass(const Mesh& mesh) {
  const auto& q = tri_quad();
  return assemble_volume(mesh, [&](int t, Eigen::Matrix<double, 6, 6>& ke) {
    const auto g = element_geometry(mesh, t);
    if (mesh.order == ElementOrder::P1) {
      const double v = g.area / 12.0;
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) ke(i, j) = (i == j) ? 2 * v : v;
      return;
    }
    std::array<double, 6> N;
    std::array<std::array<double, 3>, 6> dNdL;
    for (size_t k = 0; k < q.w.size(); ++k) {
      p2_shape(q.bary[k], N, dNdL);
      const double w = g.area * q.w[k];
      for (int i = 0; i < 6; ++i)
        for (int j = i; j < 6; ++j) {
          const double v = w * N[i] * N[j];
          ke(i, j) += v;
          if (i != j) ke(j, i) += v;
        }
    }
  });
}

DofMap make_dof_map(const Mesh& mesh, const std::set<EdgeTag>& constrained_tags) {
  if (constrained_tags.empty()) throw std::invalid_argument("apply_dirichlet: empty tag set");
  std::vector<char> constrained(mesh.n_dofs(), 0);
  for (const auto& e : mesh.boundary_edges) {
    if (!constrained_tags.count(e.tag)) continue;
    constrained[e.a] = 1;
    constrained[e.b] = 1;
    if (e.mid >= 0) constrained[e.mid] = 1;
  }
  DofMap map;
  map.n_full = mesh.n_dofs();
  map.full_to_free.assign(mesh.n_dofs(), -1);
  for (int i = 0; i < mesh.n_dofs(); ++i)
    if (!constrained[i]) {
      map.full_to_free[i] = static_cast<int>(map.free_to_full.size());
      map.free_to_full.push_back(i);
    }
  map.n_free = static_cast<int>(map.free_to_full.size());
  if (map.n_free == 0) throw std::invalid_argument("apply_dirichlet: tag set constrains every dof");
  return map;
}

template <typename Scalar>
Eigen::SparseMatrix<Scalar> reduce(const Eigen::SparseMatrix<Scalar>& full, const DofMap& map) {
  std::vector<Eigen::Triplet<Scalar>> trip;
  trip.reserve(full.nonZeros());
  for (int k = 0; k < full.outerSize(); ++k)
    for (typename Eigen::SparseMatrix<Scalar>::InnerIterator it(full, k); it; ++it) {
      const int r = map.full_to_free[it.row()];
      const int c = map.full_to_free[it.col()];
      if (r >= 0 && c >= 0) trip.emplace_back(r, c, it.value());
    }
  Eigen::SparseMatrix<Scalar> red(map.n_free, map.n_free);
  red.setFromTriplets(trip.begin(), trip.end());
  return red;
}

template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> reduce_vector(
    const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& full, const DofMap& map) {
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> red(map.n_free);
  for (int i = 0; i < map.n_free; ++i) red(i) = full(map.free_to_full[i]);
  return red;
}

template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> expand_vector(
    const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& red, const DofMap& map) {
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> full =
      Eigen::Matrix<Scalar, Eigen::Dynamic, 1>::Zero(map.n_full);
  for (int i = 0; i < map.n_free; ++i) full(map.free_to_full[i]) = red(i);
  return full;
}

template <typename Scalar>
Constrained<Scalar> apply_dirichlet(const Eigen::SparseMatrix<Scalar>& matrix, const Mesh& mesh,
                                    const std::set<EdgeTag>& tags) {
  Constrained<Scalar> out;
  out.map = make_dof_map(mesh, tags);
  out.matrix = reduce(matrix, out.map);
  return out;
}

template Eigen::SparseMatrix<double> reduce(const Eigen::SparseMatrix<double>&, const DofMap&);
template Eigen::SparseMatrix<std::complex<double>> reduce(
    const Eigen::SparseMatrix<std::complex<double>>&, const DofMap&);
template Eigen::VectorXd reduce_vector(const Eigen::VectorXd&, const DofMap&);
template Eigen::VectorXcd reduce_vector(const Eigen::VectorXcd&, const DofMap&);
template Eigen::VectorXd expand_vector(const Eigen::VectorXd&, const DofMap&);
template Eigen::VectorXcd expand_vector(const Eigen::VectorXcd&, const DofMap&);
template Constrained<double> apply_dirichlet(const Eigen::SparseMatrix<double>&, const Mesh&,
                                             const std::set<EdgeTag>&);
template Constrained<std::complex<double>> apply_dirichlet(
    const Eigen::SparseMatrix<std::complex<double>>&, const Mesh&, const std::set<EdgeTag>&);

SpMat boundary_mass(const Mesh& mesh, EdgeTag tag) {
  std::vector<Eigen::Triplet<double>> trip;
  for (const auto& e : mesh.boundary_edges) {
    if (e.tag != tag) continue;
    const double len = (mesh.nodes.row(e.b) - mesh.nodes.row(e.a)).norm();
    const auto dofs = edge_dofs(e);
    if (mesh.order == ElementOrder::P1) {
      const double v = len / 6.0;
      const double me[2][2] = {{2 * v, v}, {v, 2 * v}};
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) trip.emplace_back(dofs[i], dofs[j], me[i][j]);
    } else {
      const double v = len / 30.0;
      const double me[3][3] = {{4 * v, -v, 2 * v}, {-v, 4 * v, 2 * v}, {2 * v, 2 * v, 16 * v}};
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) trip.emplace_back(dofs[i], dofs[j], me[i][j]);
    }
  }
  SpMat m(mesh.n_dofs(), mesh.n_dofs());
  m.setFromTriplets(trip.begin(), trip.end());
  return m;
}

template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> boundary_load(
    const Mesh& mesh, EdgeTag tag, const std::function<Scalar(double, double)>& g) {
  const auto& q = line_quad5();
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> load =
      Eigen::Matrix<Scalar, Eigen::Dynamic, 1>::Zero(mesh.n_dofs());
  const int nd = edge_dof_count(mesh);
  std::array<double, 3> N, dN;
  for (const auto& e : mesh.boundary_edges) {
    if (e.tag != tag) continue;
    const Eigen::RowVector2d pa = mesh.nodes.row(e.a), pb = mesh.nodes.row(e.b);
    const double len = (pb - pa).norm();
    const auto dofs = edge_dofs(e);
    for (size_t k = 0; k < q.t.size(); ++k) {
      edge_shape(mesh, q.t[k], N, dN);
      const Eigen::RowVector2d p = pa + q.t[k] * (pb - pa);
      const Scalar gv = g(p(0), p(1));
      for (int i = 0; i < nd; ++i) load(dofs[i]) += len * q.w[k] * gv * N[i];
    }
  }
  return load;
}

template Eigen::VectorXd boundary_load(const Mesh&, EdgeTag,
                                       const std::function<double(double, double)>&);
template Eigen::VectorXcd boundary_load(
    const Mesh&, EdgeTag, const std::function<std::complex<double>(double, double)>&);

RobinBoundary assemble_robin_boundary(const Mesh& mesh, double L) {
  if (!has_tag(mesh, EdgeTag::ArtificialBoundary))
    throw std::invalid_argument("assemble_robin_boundary: mesh has no ArtificialBoundary edges");
  const std::complex<double> I(0.0, 1.0);
  const std::complex<double> scale = -1.0 / (L - I);
  RobinBoundary rb;
  rb.matrix = (boundary_mass(mesh, EdgeTag::ArtificialBoundary).cast<std::complex<double>>() *
               scale).eval();
  const std::complex<double> c = -2.0 * I / (L * L + 1.0) * (L + I);
  rb.load = boundary_load<std::complex<double>>(
      mesh, EdgeTag::ArtificialBoundary,
      [c](double, double y) { return c * std::sin(kPi * y); });
  return rb;
}

double gamma_weighted_integral(const Mesh& mesh, const Eigen::VectorXd& field, GammaWeight weight) {
  double acc = 0.0;
  gamma_energy_impl<double>(mesh, field, weight,
                            [&](double w, double f, double) { acc += w * f; });
  return acc;
}

GammaEnergy gamma_weighted_energy(const Mesh& mesh, const Eigen::VectorXd& field,
                                  GammaWeight weight) {
  GammaEnergy e;
  gamma_energy_impl<double>(mesh, field, weight, [&](double w, double f, double df) {
    e.grad_term += w * df * df;
    e.mass_term += w * f * f;
  });
  return e;
}

GammaEnergy gamma_weighted_energy(const Mesh& mesh, const Eigen::VectorXcd& field,
                                  GammaWeight weight) {
  GammaEnergy e;
  gamma_energy_impl<std::complex<double>>(
      mesh, field, weight, [&](double w, std::complex<double> f, std::complex<double> df) {
        e.grad_term += w * std::norm(df);
        e.mass_term += w * std::norm(f);
      });
  return e;
}

double dx_energy(const Mesh& mesh, const Eigen::VectorXd& field) {
  const auto& q = tri_quad();
  const int nd = dofs_per_element(mesh);
  double acc = 0.0;
  std::array<double, 6> N;
  std::array<std::array<double, 3>, 6> dNdL;
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    const auto g = element_geometry(mesh, t);
    for (size_t k = 0; k < q.w.size(); ++k) {
      double dx = 0.0;
      if (mesh.order == ElementOrder::P1) {
        for (int i = 0; i < 3; ++i) dx += field(mesh.tri_dofs(t, i)) * g.gradL[i][0];
      } else {
        p2_shape(q.bary[k], N, dNdL);
        for (int i = 0; i < nd; ++i) {
          const double gx =
              dNdL[i][0] * g.gradL[0][0] + dNdL[i][1] * g.gradL[1][0] + dNdL[i][2] * g.gradL[2][0];
          dx += field(mesh.tri_dofs(t, i)) * gx;
        }
      }
      acc += g.area * q.w[k] * dx * dx;
    }
  }
  return acc;
}

double mass_fraction_below(const Mesh& mesh, const Eigen::VectorXd& field, double x_cut) {
  const auto& q = tri_quad();
  const int nd = dofs_per_element(mesh);
  double inside = 0.0, total = 0.0;
  std::array<double, 6> N;
  std::array<std::array<double, 3>, 6> dNdL;
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    const auto g = element_geometry(mesh, t);
    double elem = 0.0;
    for (size_t k = 0; k < q.w.size(); ++k) {
      double f = 0.0;
      if (mesh.order == ElementOrder::P1) {
        for (int i = 0; i < 3; ++i) f += field(mesh.tri_dofs(t, i)) * q.bary[k][i];
      } else {
        p2_shape(q.bary[k], N, dNdL);
        for (int i = 0; i < nd; ++i) f += field(mesh.tri_dofs(t, i)) * N[i];
      }
      elem += g.area * q.w[k] * f * f;
    }
    total += elem;
    const bool in = mesh.nodes(mesh.triangles(t, 0), 0) < x_cut &&
                    mesh.nodes(mesh.triangles(t, 1), 0) < x_cut &&
                    mesh.nodes(mesh.triangles(t, 2), 0) < x_cut;
    if (in) inside += elem;
  }
  return inside / total;
}

void export_coo(std::ostream& os, const SpMat& m) {
  for (int k = 0; k < m.outerSize(); ++k)
    for (SpMat::InnerIterator it(m, k); it; ++it)
      os << it.row() << " " << it.col() << " " << it.value() << "\n";
}

void export_coo(std::ostream& os, const SpMatC& m) {
  for (int k = 0; k < m.outerSize(); ++k)
    for (SpMatC::InnerIterator it(m, k); it; ++it)
      os << it.row() << " " << it.col() << " " << it.value().real() << " " << it.value().imag()
         << "\n";
}

}  // namespace strips
