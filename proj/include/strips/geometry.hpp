#pragma once

#include <Eigen/Core>

#include <array>
#include <iosfwd>
#include <vector>

namespace strips {

enum class EdgeTag { DirichletWall, FreeSide, ArtificialBoundary };
enum class ElementOrder { P1, P2 };
enum class GammaBc { Neumann, Dirichlet };

const char* to_string(EdgeTag tag);

// T^eps(alpha) = { (x,y) : y in (0,eps), x in (y tan(alpha), 1) }.
// Sigma (y=0, y=eps, x=1) carries DirichletWall, the slanted side Gamma
// carries FreeSide. gamma_bc selects the condition actually imposed on
// Gamma when solving (Dirichlet variant used for the skew-symmetric
// family of the broken strip).
struct TrapezoidGeom {
  double eps = 0.02;
  double alpha = 0.0;
  GammaBc gamma_bc = GammaBc::Neumann;

  double area() const;          // eps - eps^2 tan(alpha)/2
  double gamma_length() const;  // eps / cos(alpha)
};

// Omega_L = { (X,Y) : Y in (0,1), Y tan(alpha) < X < L }. Sigma_L (Y=0,1)
// is DirichletWall, the slanted side is FreeSide, {L}x(0,1) is
// ArtificialBoundary.
struct HalfStripGeom {
  double alpha = 0.0;
  double truncation_L = 8.0;

  double area() const;          // L - tan(alpha)/2
  double gamma_length() const;  // 1 / cos(alpha)
};

// Corner singular exponents at the two non-smooth boundary points
// (tip and the upper end of the slanted side).
double singular_exponent_tip(double alpha);  // pi / (pi - 2|alpha|)
double singular_exponent_top(double alpha);  // pi / (pi + 2|alpha|)

// Power grading of the x-lines toward the slanted end. beta = 0 picks
// order/lambda_min automatically (uniform when no singular corner);
// y_layers = 0 resolves the thickness at target_h; x_target_h = 0 uses
// target_h for the x spacing as well.
struct GradingSpec {
  bool graded = true;
  double beta = 0.0;
  double x_target_h = 0.0;
  int y_layers = 0;

  static GradingSpec none() { return GradingSpec{false, 0.0, 0.0, 0}; }
};

struct BoundaryEdge {
  int a = -1;        // vertex ids, oriented along the boundary
  int b = -1;
  int mid = -1;      // P2 midpoint dof, -1 for P1
  EdgeTag tag = EdgeTag::DirichletWall;
};

// Conforming triangulation. Vertices come first in `nodes`; P2 edge
// midpoints follow. `triangles` holds ccw vertex ids, `tri_dofs` the
// per-element dof list [v0 v1 v2 m12 m20 m01] (midpoint columns are -1
// for P1).
struct Mesh {
  ElementOrder order = ElementOrder::P2;
  Eigen::Matrix<double, Eigen::Dynamic, 2> nodes;
  Eigen::Matrix<int, Eigen::Dynamic, 3> triangles;
  Eigen::Matrix<int, Eigen::Dynamic, 6> tri_dofs;
  std::vector<BoundaryEdge> boundary_edges;
  std::array<int, 2> corner_nodes{-1, -1};  // tip corner of Gamma, then the far one
  int n_vertices = 0;

  int n_dofs() const { return static_cast<int>(nodes.rows()); }
  int n_triangles() const { return static_cast<int>(triangles.rows()); }
  double triangle_area(int t) const;
  double total_area() const;
  double min_signed_area() const;
  // 4*sqrt(3)*area / (sum of squared edge lengths), 1 for equilateral
  double min_quality() const;
};

Mesh build_trapezoid_mesh(const TrapezoidGeom& geom, double target_h,
                          const GradingSpec& grading = {},
                          ElementOrder order = ElementOrder::P2);

Mesh build_halfstrip_mesh(const HalfStripGeom& geom, double target_h,
                          const GradingSpec& grading = {},
                          ElementOrder order = ElementOrder::P2);

// Uniform red refinement (each triangle into four); preserves area exactly
// and keeps original vertex ids.
Mesh refine(const Mesh& mesh);

// Plain-text dump: nodes "x y", triangles "i j k", boundary edges "i j tag".
void write_mesh_text(std::ostream& os, const Mesh& mesh);

}  // namespace strips
