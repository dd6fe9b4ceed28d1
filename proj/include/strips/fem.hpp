#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <complex>
#include <functional>
#include <set>
#include <stdexcept>
#include <vector>

#include "strips/geometry.hpp"

namespace strips {

using SpMat = Eigen::SparseMatrix<double>;
using SpMatC = Eigen::SparseMatrix<std::complex<double>>;

// Bilinear forms of the mixed-BC eigenproblem: exact P1 formulas, order-4
// quadrature for P2 (all integrands polynomial at these orders). Element
// matrices are filled symmetrically, so stored entries satisfy A = A^T
// bit for bit.
SpMat assemble_stiffness(const Mesh& mesh);
SpMat assemble_mass(const Mesh& mesh);

// Dirichlet handled by elimination: constrained rows/columns removed,
// with an index map back to the full numbering.
struct DofMap {
  std::vector<int> free_to_full;
  std::vector<int> full_to_free;  // -1 for constrained dofs
  int n_free = 0;
  int n_full = 0;
};

DofMap make_dof_map(const Mesh& mesh, const std::set<EdgeTag>& constrained_tags);

template <typename Scalar>
Eigen::SparseMatrix<Scalar> reduce(const Eigen::SparseMatrix<Scalar>& full, const DofMap& map);

template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> reduce_vector(
    const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& full, const DofMap& map);

template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> expand_vector(
    const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& red, const DofMap& map);

template <typename Scalar>
struct Constrained {
  Eigen::SparseMatrix<Scalar> matrix;
  DofMap map;
};

template <typename Scalar>
Constrained<Scalar> apply_dirichlet(const Eigen::SparseMatrix<Scalar>& matrix, const Mesh& mesh,
                                    const std::set<EdgeTag>& tags);

// Boundary mass \int_e phi_i phi_j ds restricted to edges of one tag.
SpMat boundary_mass(const Mesh& mesh, EdgeTag tag);

// Linear form \int_e g phi_i ds over edges of one tag (5-point Gauss).
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> boundary_load(
    const Mesh& mesh, EdgeTag tag, const std::function<Scalar(double, double)>& g);

// Transparent truncation at X = L: boundary mass on Gamma_L scaled by
// -1/(L-i), and the load -2i/(L^2+1) \int_{Gamma_L} w_in v dY with the
// incoming trace w_in(L,Y) = (L+i) sin(pi Y).
struct RobinBoundary {
  SpMatC matrix;
  Eigen::VectorXcd load;
};

RobinBoundary assemble_robin_boundary(const Mesh& mesh, double L);

// Integrals over the slanted side Gamma; the arc-length parameter s is
// measured from the tip corner. Traces and tangential derivatives come
// from the per-edge P1/P2 shape functions, 3-point Gauss per edge.
enum class GammaWeight { One, ArcLength };

double gamma_weighted_integral(const Mesh& mesh, const Eigen::VectorXd& field, GammaWeight weight);

struct GammaEnergy {
  double grad_term = 0.0;  // \int w (d_s f)^2 ds
  double mass_term = 0.0;  // \int w f^2 ds
};

GammaEnergy gamma_weighted_energy(const Mesh& mesh, const Eigen::VectorXd& field,
                                  GammaWeight weight);
GammaEnergy gamma_weighted_energy(const Mesh& mesh, const Eigen::VectorXcd& field,
                                  GammaWeight weight);  // squared moduli

// \int_domain (d_x f)^2 dz, volume quadrature as in the mass matrix.
double dx_energy(const Mesh& mesh, const Eigen::VectorXd& field);

// Mass-weighted fraction of \int f^2 carried by elements with all
// vertices at x < x_cut.
double mass_fraction_below(const Mesh& mesh, const Eigen::VectorXd& field, double x_cut);

// Coordinate text export: one "i j value" per line (value as re,im for
// complex matrices).
void export_coo(std::ostream& os, const SpMat& m);
void export_coo(std::ostream& os, const SpMatC& m);

}  // namespace strips
