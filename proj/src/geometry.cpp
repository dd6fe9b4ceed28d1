#include "strips/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <stdexcept>
#include <utility>

namespace strips {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

const char* to_string(EdgeTag tag) {
  switch (tag) {
    case EdgeTag::DirichletWall: return "DirichletWall";
    case EdgeTag::FreeSide: return "FreeSide";
    case EdgeTag::ArtificialBoundary: return "ArtificialBoundary";
  }
  return "?";
}

double TrapezoidGeom::area() const { return eps - eps * eps * std::tan(alpha) / 2.0; }
double TrapezoidGeom::gamma_length() const { return eps / std::cos(alpha); }

double HalfStripGeom::area() const { return truncation_L - std::tan(alpha) / 2.0; }
double HalfStripGeom::gamma_length() const { return 1.0 / std::cos(alpha); }

double singular_exponent_tip(double alpha) { return kPi / (kPi - 2.0 * std::abs(alpha)); }
double singular_exponent_top(double alpha) { return kPi / (kPi + 2.0 * std::abs(alpha)); }

double Mesh::triangle_area(int t) const {
  const auto p0 = nodes.row(triangles(t, 0));
  const auto p1 = nodes.row(triangles(t, 1));
  const auto p2 = nodes.row(triangles(t, 2));
  return 0.5 * ((p1(0) - p0(0)) * (p2(1) - p0(1)) - (p2(0) - p0(0)) * (p1(1) - p0(1)));
}

double Mesh::total_area() const {
  double a = 0.0;
  for (int t = 0; t < n_triangles(); ++t) a += triangle_area(t);
  return a;
}

double Mesh::min_signed_area() const {
  double m = std::numeric_limits<double>::infinity();
  for (int t = 0; t < n_triangles(); ++t) m = std::min(m, triangle_area(t));
  return m;
}

double Mesh::min_quality() const {
  double q = std::numeric_limits<double>::infinity();
  for (int t = 0; t < n_triangles(); ++t) {
    const auto p0 = nodes.row(triangles(t, 0));
    const auto p1 = nodes.row(triangles(t, 1));
    const auto p2 = nodes.row(triangles(t, 2));
    const double l2 = (p1 - p0).squaredNorm() + (p2 - p1).squaredNorm() + (p0 - p2).squaredNorm();
    q = std::min(q, 4.0 * std::sqrt(3.0) * triangle_area(t) / l2);
  }
  return q;
}

namespace {

// x-line breakpoints in [0,1]: uniform, or power-graded toward 0 with
// exponent beta (first interval ~ (h/length)^beta). Layers thinner than
// 1e-5 of the length are merged away; they add nothing at the target
// tolerances but ruin the matrix scaling.
std::vector<double> x_breakpoints(double length, double h, double beta) {
  const int n = std::max(2, static_cast<int>(std::ceil(beta * length / h)));
  std::vector<double> xi;
  xi.reserve(n + 1);
  xi.push_back(0.0);
  const double floor_width = 1e-5;
  for (int i = 1; i <= n; ++i) {
    const double t = static_cast<double>(i) / n;
    const double v = (beta == 1.0) ? t : std::pow(t, beta);
    if (v - xi.back() >= floor_width || i == n) xi.push_back(v);
  }
  xi.back() = 1.0;
  return xi;
}

double auto_beta(double alpha, ElementOrder order) {
  const double lam = singular_exponent_top(alpha);  // min(lambda_1, lambda_2)
  if (lam >= 1.0 - 1e-12) return 1.0;
  return (order == ElementOrder::P2 ? 2.0 : 1.0) / lam;
}

struct MappedGridSpec {
  std::vector<double> xi;   // in [0,1]
  std::vector<double> eta;  // thickness coordinate values
  double tan_alpha = 0.0;
  double right_coord = 1.0;  // x = eta*tan_alpha + xi*(right_coord - eta*tan_alpha)
  EdgeTag right_tag = EdgeTag::DirichletWall;
};

// Tensor grid mapped onto the (half-)trapezoid, each quad split along the
// A-C diagonal. Cells are convex, so signed areas stay positive for any
// admissible geometry.
Mesh build_mapped(const MappedGridSpec& spec, ElementOrder order) {
  const int nx = static_cast<int>(spec.xi.size()) - 1;
  const int ny = static_cast<int>(spec.eta.size()) - 1;

  Mesh mesh;
  mesh.order = order;
  mesh.n_vertices = (nx + 1) * (ny + 1);
  mesh.nodes.resize(mesh.n_vertices, 2);
  auto vid = [&](int i, int j) { return j * (nx + 1) + i; };
  for (int j = 0; j <= ny; ++j) {
    const double y = spec.eta[j];
    const double left = y * spec.tan_alpha;
    for (int i = 0; i <= nx; ++i) {
      mesh.nodes(vid(i, j), 0) = left + spec.xi[i] * (spec.right_coord - left);
      mesh.nodes(vid(i, j), 1) = y;
    }
  }

  mesh.triangles.resize(2 * nx * ny, 3);
  int t = 0;
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const int a = vid(i, j), b = vid(i + 1, j), c = vid(i + 1, j + 1), d = vid(i, j + 1);
      mesh.triangles.row(t++) << a, b, c;
      mesh.triangles.row(t++) << a, c, d;
    }

  for (int i = 0; i < nx; ++i) {
    mesh.boundary_edges.push_back({vid(i, 0), vid(i + 1, 0), -1, EdgeTag::DirichletWall});
    mesh.boundary_edges.push_back({vid(i + 1, ny), vid(i, ny), -1, EdgeTag::DirichletWall});
  }
  for (int j = 0; j < ny; ++j) {
    mesh.boundary_edges.push_back({vid(nx, j), vid(nx, j + 1), -1, spec.right_tag});
    mesh.boundary_edges.push_back({vid(0, j + 1), vid(0, j), -1, EdgeTag::FreeSide});
  }
  mesh.corner_nodes = {vid(0, 0), vid(0, ny)};
  return mesh;
}

// Midpoint dofs for P2 (straight edges, so plain segment midpoints).
void add_p2_dofs(Mesh& mesh) {
  std::map<std::pair<int, int>, int> edge_mid;
  auto mid_of = [&](int a, int b) {
    const auto key = std::minmax(a, b);
    auto it = edge_mid.find(key);
    if (it != edge_mid.end()) return it->second;
    const int id = static_cast<int>(mesh.nodes.rows()) + static_cast<int>(edge_mid.size());
    edge_mid.emplace(key, id);
    return id;
  };

  mesh.tri_dofs.resize(mesh.n_triangles(), 6);
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    const int v0 = mesh.triangles(t, 0), v1 = mesh.triangles(t, 1), v2 = mesh.triangles(t, 2);
    mesh.tri_dofs.row(t) << v0, v1, v2, mid_of(v1, v2), mid_of(v2, v0), mid_of(v0, v1);
  }

  const int nv = mesh.n_vertices;
  Eigen::Matrix<double, Eigen::Dynamic, 2> all(nv + static_cast<int>(edge_mid.size()), 2);
  all.topRows(nv) = mesh.nodes;
  for (const auto& [key, id] : edge_mid)
    all.row(id) = 0.5 * (mesh.nodes.row(key.first) + mesh.nodes.row(key.second));
  mesh.nodes = std::move(all);

  for (auto& e : mesh.boundary_edges) e.mid = mid_of(e.a, e.b);
}

void finalize_order(Mesh& mesh, ElementOrder order) {
  if (order == ElementOrder::P2) {
    add_p2_dofs(mesh);
    return;
  }
  mesh.tri_dofs.resize(mesh.n_triangles(), 6);
  for (int t = 0; t < mesh.n_triangles(); ++t)
    mesh.tri_dofs.row(t) << mesh.triangles(t, 0), mesh.triangles(t, 1), mesh.triangles(t, 2), -1, -1, -1;
}

std::vector<double> uniform_layers(double thickness, int n) {
  std::vector<double> eta(n + 1);
  for (int j = 0; j <= n; ++j) eta[j] = thickness * j / n;
  eta.back() = thickness;
  return eta;
}

}  // namespace

Mesh build_trapezoid_mesh(const TrapezoidGeom& geom, double target_h,
                          const GradingSpec& grading, ElementOrder order) {
  if (!(geom.eps > 0.0)) throw std::invalid_argument("trapezoid: eps must be positive");
  if (!(std::abs(geom.alpha) < kPi / 2.0))
    throw std::invalid_argument("trapezoid: |alpha| must be below pi/2");
  if (!(target_h > 0.0)) throw std::invalid_argument("trapezoid: target_h must be positive");

  const int ny = grading.y_layers > 0
                     ? grading.y_layers
                     : static_cast<int>(std::floor(geom.eps / target_h + 1e-12));
  if (ny < 2)
    throw std::invalid_argument("trapezoid: target_h too coarse, fewer than 2 layers across eps");
  const double short_side = 1.0 - geom.eps * std::tan(geom.alpha);
  const double hx = grading.x_target_h > 0.0 ? grading.x_target_h : target_h;
  if (short_side < 4.0 * hx)
    throw std::invalid_argument("trapezoid: tip nearly reaches x=1 (short side < 4 h)");

  MappedGridSpec spec;
  const double beta =
      grading.graded ? (grading.beta > 0.0 ? grading.beta : auto_beta(geom.alpha, order)) : 1.0;
  spec.xi = x_breakpoints(1.0, hx, beta);
  spec.eta = uniform_layers(geom.eps, ny);
  spec.tan_alpha = std::tan(geom.alpha);
  spec.right_coord = 1.0;
  spec.right_tag = EdgeTag::DirichletWall;

  Mesh mesh = build_mapped(spec, order);
  finalize_order(mesh, order);
  return mesh;
}

Mesh build_halfstrip_mesh(const HalfStripGeom& geom, double target_h,
                          const GradingSpec& grading, ElementOrder order) {
  if (!(geom.alpha >= 0.0 && geom.alpha < kPi / 2.0))
    throw std::invalid_argument("halfstrip: alpha must lie in [0, pi/2)");
  if (!(target_h > 0.0 && target_h < 0.5))
    throw std::invalid_argument("halfstrip: target_h must lie in (0, 1/2)");
  if (!(geom.truncation_L > std::tan(geom.alpha)))
    throw std::invalid_argument("halfstrip: truncation_L must exceed tan(alpha)");

  const int ny = grading.y_layers > 0
                     ? grading.y_layers
                     : static_cast<int>(std::floor(1.0 / target_h + 1e-12));
  if (ny < 2) throw std::invalid_argument("halfstrip: fewer than 2 layers across the strip");

  MappedGridSpec spec;
  const double beta =
      grading.graded ? (grading.beta > 0.0 ? grading.beta : auto_beta(geom.alpha, order)) : 1.0;
  const double hx = grading.x_target_h > 0.0 ? grading.x_target_h : target_h;
  spec.xi = x_breakpoints(geom.truncation_L, hx, beta);
  spec.eta = uniform_layers(1.0, ny);
  spec.tan_alpha = std::tan(geom.alpha);
  spec.right_coord = geom.truncation_L;
  spec.right_tag = EdgeTag::ArtificialBoundary;

  Mesh mesh = build_mapped(spec, order);
  finalize_order(mesh, order);
  return mesh;
}

Mesh refine(const Mesh& mesh) {
  Mesh out;
  out.order = mesh.order;

  std::map<std::pair<int, int>, int> edge_mid;
  std::vector<std::array<double, 2>> extra;
  auto mid_of = [&](int a, int b) {
    const auto key = std::minmax(a, b);
    auto it = edge_mid.find(key);
    if (it != edge_mid.end()) return it->second;
    const int id = mesh.n_vertices + static_cast<int>(extra.size());
    extra.push_back({0.5 * (mesh.nodes(a, 0) + mesh.nodes(b, 0)),
                     0.5 * (mesh.nodes(a, 1) + mesh.nodes(b, 1))});
    edge_mid.emplace(key, id);
    return id;
  };

  out.triangles.resize(4 * mesh.n_triangles(), 3);
  int t = 0;
  for (int k = 0; k < mesh.n_triangles(); ++k) {
    const int v0 = mesh.triangles(k, 0), v1 = mesh.triangles(k, 1), v2 = mesh.triangles(k, 2);
    const int m01 = mid_of(v0, v1), m12 = mid_of(v1, v2), m20 = mid_of(v2, v0);
    out.triangles.row(t++) << v0, m01, m20;
    out.triangles.row(t++) << m01, v1, m12;
    out.triangles.row(t++) << m20, m12, v2;
    out.triangles.row(t++) << m01, m12, m20;
  }

  out.n_vertices = mesh.n_vertices + static_cast<int>(extra.size());
  out.nodes.resize(out.n_vertices, 2);
  out.nodes.topRows(mesh.n_vertices) = mesh.nodes.topRows(mesh.n_vertices);
  for (size_t i = 0; i < extra.size(); ++i) {
    out.nodes(mesh.n_vertices + static_cast<int>(i), 0) = extra[i][0];
    out.nodes(mesh.n_vertices + static_cast<int>(i), 1) = extra[i][1];
  }

  for (const auto& e : mesh.boundary_edges) {
    const int m = mid_of(e.a, e.b);
    out.boundary_edges.push_back({e.a, m, -1, e.tag});
    out.boundary_edges.push_back({m, e.b, -1, e.tag});
  }
  out.corner_nodes = mesh.corner_nodes;
  finalize_order(out, mesh.order);
  return out;
}

void write_mesh_text(std::ostream& os, const Mesh& mesh) {
  os << "nodes " << mesh.n_dofs() << "\n";
  for (int i = 0; i < mesh.n_dofs(); ++i) os << mesh.nodes(i, 0) << " " << mesh.nodes(i, 1) << "\n";
  os << "triangles " << mesh.n_triangles() << "\n";
  for (int t = 0; t < mesh.n_triangles(); ++t)
    os << mesh.triangles(t, 0) << " " << mesh.triangles(t, 1) << " " << mesh.triangles(t, 2) << "\n";
  os << "edges " << mesh.boundary_edges.size() << "\n";
  for (const auto& e : mesh.boundary_edges)
    os << e.a << " " << e.b << " " << to_string(e.tag) << "\n";
}

}  // namespace strips
