#pragma once

#include <complex>
#include <optional>
#include <vector>

#include "strips/eigensolve.hpp"
#include "strips/fem.hpp"
#include "strips/geometry.hpp"

namespace strips {

// Mesh/truncation parameters shared by the scattering computations.
// y_layers scales with tan(alpha) so the sheared columns near the tip stay
// resolved; 0 keeps the automatic choice.
struct ScanOptions {
  double L = 8.0;
  double h = 0.1;
  ElementOrder order = ElementOrder::P2;
  int y_layers = 0;
  int workers = 1;
  double min_dalpha = 1e-4;      // adaptive insertion floor
  double unitarity_tol = 1e-2;
  int max_inserted = 0;          // 0 = 4x the initial grid
};

Mesh scattering_mesh(const HalfStripGeom& geom, const ScanOptions& opts);

// Solution of the truncated threshold problem with the complex Robin
// condition d(W-w_in)/dX = (W-w_in)/(L-i) at X = L.
struct ThresholdField {
  HalfStripGeom geom;
  Mesh mesh;
  Eigen::VectorXcd values;  // full nodal numbering, zero on Sigma_L
};

ThresholdField solve_threshold_field(const HalfStripGeom& geom, const ScanOptions& opts = {});

// S = 2/(L^2+1) \int_{Gamma_L} (W - w_in) w_in dY with w_in = (L+i) sin(pi Y).
std::complex<double> scattering_coefficient(const ThresholdField& field);

struct ScatteringSample {
  double alpha = 0.0;
  std::complex<double> S;
  double phase_unwrapped = 0.0;
  double abs_S_error = 0.0;  // | |S| - 1 |
  double truncation_L = 8.0;
  double mesh_h = 0.1;
  bool accepted = true;      // unitarity within tolerance
};

// Solves at every grid angle, unwraps the phase by nearest-branch
// continuation and inserts midpoints where neighbors jump by more than
// pi/4 (the Fano-like fast runs alias a fixed grid).
std::vector<ScatteringSample> scan_phase(const std::vector<double>& alpha_grid,
                                         const ScanOptions& opts = {});

struct ThresholdAngles {
  std::vector<double> angles;  // ascending, angles[0] = 0 by definition
  std::vector<std::array<double, 2>> brackets;
  std::vector<int> bisection_steps;
  bool found_all = true;       // k_max crossings located in the scanned range
};

// Upward crossings of the unwrapped phase through pi + 2 pi m, refined by
// bisection on fresh solves to |dalpha| < tol.
ThresholdAngles find_threshold_angles(const std::vector<ScatteringSample>& scan, int k_max,
                                      const ScanOptions& opts = {}, double tol = 1e-3);

struct NearFieldSpectrum {
  double alpha = 0.0;
  std::vector<double> mu;                    // below pi^2, ascending
  int n_below = 0;
  std::vector<double> truncation_sensitive;  // the subset inside the 2% band under pi^2
};

// Discrete spectrum of the near-field operator from the Dirichlet-truncated
// half strip; conforming FEM and the truncation both shift eigenvalues up,
// so anything found below pi^2 is genuine.
NearFieldSpectrum near_field_discrete_spectrum(const HalfStripGeom& geom, double h, int count,
                                               const ScanOptions& opts = {});

struct ModelConstants {
  double B = 0.0;
  double B_rellich = 0.0;
  double D = 0.0;
  double D_lower_bound = 0.0;  // 3 pi^2 \int U^2
  double alpha_star = 0.0;
  double imag_residual = 0.0;  // ||Im v|| / ||Re v|| after the 2i normalization
};

// B = \int_Gamma s((d_s v)^2 - pi^2 v^2) ds on the real bounded
// representative v = W/(2i), cross-checked by the Rellich-Morawetz volume
// identity B_rellich = 2/(cos a sin a) \int (d_X v)^2.
ModelConstants constant_B(double alpha_star, const ScanOptions& opts = {});

// D = \int |grad U|^2 - pi^2 U^2 for the straight-end corrector problem
// (Neumann data -pi cos(pi Y) on Gamma(0), Dirichlet at X = L).
ModelConstants constant_D(double L, double h, const ScanOptions& opts = {});

struct PhaseDerivative {
  double integral = 0.0;  // \int_Gamma s(|d_s W|^2 - pi^2 |W|^2) ds
  double fd_slope = 0.0;  // centered difference of the unwrapped phase
};

// The phase slope of S at a threshold angle equals the Gamma integral;
// positive means the counter-clockwise crossing.
PhaseDerivative phase_derivative_check(double alpha_star, const ScanOptions& opts = {},
                                       double dalpha = 1e-3);

}  // namespace strips
