#pragma once

#include <string>
#include <vector>

#include "strips/eigensolve.hpp"
#include "strips/geometry.hpp"
#include "strips/scattering.hpp"

namespace strips {

// pi^2/eps^2 + (p+1/2)^2 pi^2, p = 0..count-1 (Fourier series oracle for
// the straight trapezoid).
std::vector<double> exact_alpha0_spectrum(double eps, int count);

double normalized_threshold(double eps);  // pi^2/eps^2

// Mesh controls for one trapezoid eigensolve. h = 0 picks eps/6; the
// defaults keep the thickness resolution tied to eps while the x spacing
// stays at a physical scale.
struct TrapezoidSolveOptions {
  double h = 0.0;
  int y_layers = 0;
  double x_target_h = 0.0;
  ElementOrder order = ElementOrder::P2;
  bool graded = true;
};

struct TrapezoidSolution {
  Mesh mesh;
  DofMap map;
  EigenResult result;  // eigenvectors in the reduced numbering
  Eigen::VectorXd eigenfunction(int k) const;  // full nodal numbering
};

TrapezoidSolution trapezoid_spectrum(const TrapezoidGeom& geom, int count,
                                     const TrapezoidSolveOptions& opts = {});

enum class Regime { DiscreteSpectrum, GenericDirichlet, ThresholdNeumann, RobinModelK, RobinModelZero };

const char* to_string(Regime regime);

struct ComparisonRecord {
  double eps = 0.0;
  double tau = 0.0;        // model regimes only
  double computed = 0.0;   // lambda (or eps^2 lambda for the discrete regime)
  double predicted = 0.0;
  double residual = 0.0;
};

struct AsymptoticComparison {
  Regime regime = Regime::GenericDirichlet;
  double alpha = 0.0;
  int index = 0;  // p or q
  std::vector<ComparisonRecord> records;
  double fitted_rate = 0.0;     // log-log least-squares slope vs eps
  bool rate_meaningful = false; // enough eps values to fit
  std::string note;
};

// Least-squares slope of log(residual) against log(eps).
double fit_rate(const std::vector<double>& eps_list, const std::vector<double>& residuals);

// |eps^2 lambda_p - mu_p| decays super-algebraically (Theorem regime with
// the near-field discrete spectrum as the limit).
AsymptoticComparison verify_thm1_discrete(double alpha, const std::vector<double>& eps_list, int p,
                                          double mu_p);

// lambda_{N_circ+q} - pi^2/eps^2 -> q^2 pi^2 away from threshold angles.
AsymptoticComparison verify_thm1_generic(double alpha, const std::vector<double>& eps_list, int q,
                                         int n_circ, const std::vector<double>& known_thresholds);

// At a threshold angle the limit is (q-1/2)^2 pi^2.
AsymptoticComparison verify_thm1_threshold(double alpha_star, const std::vector<double>& eps_list,
                                           int q, int n_circ);

// Robin-model matches: T^eps(alpha* + tau eps) against dispersion roots
// with c = 2 tau B.
AsymptoticComparison verify_model_K(double alpha_star, double B, int n_circ,
                                    const std::vector<double>& tau_list,
                                    const std::vector<double>& eps_list);

// T^eps(tau sqrt(eps)) against dispersion roots with c = 2 tau^2 D.
AsymptoticComparison verify_model_zero(double D, const std::vector<double>& tau_list,
                                       const std::vector<double>& eps_list);

enum class Parity { Symmetric, Antisymmetric };

struct LabeledEigenvalue {
  double value = 0.0;
  Parity parity = Parity::Symmetric;
};

// Broken-strip spectrum as the union of the mixed-BC trapezoid family
// (symmetric about the fold line) and the pure-Dirichlet one
// (skew-symmetric).
std::vector<LabeledEigenvalue> broken_strip_spectrum(double eps, double alpha, int count,
                                                     const TrapezoidSolveOptions& opts = {});

struct DiveTable {
  double eps = 0.0;
  std::vector<double> alphas;
  std::vector<std::vector<double>> eigenvalues;  // per alpha, ascending
  std::vector<int> count_below_threshold;
};

DiveTable dive_sweep(double eps, const std::vector<double>& alpha_grid, int count,
                     const TrapezoidSolveOptions& opts = {});

// Follows eigenvalue branches across a parameter grid by value continuity
// (nearest neighbor), the tracking used to trace the diving branch through
// crossings.
std::vector<std::vector<double>> track_branches(const std::vector<std::vector<double>>& spectra);

}  // namespace strips
