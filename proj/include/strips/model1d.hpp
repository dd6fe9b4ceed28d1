#pragma once

#include <vector>

namespace strips {

// 1D Robin spectral problem on I = (0,1):
//   -gamma'' = eta gamma,  gamma(1) = 0,  gamma'(0) = -c gamma(0),
// with c = 2 tau B around a positive threshold angle and c = 2 tau^2 D
// around the straight end (angle kappa = tau sqrt(eps)).
enum class RobinVariant { ThresholdK, ZeroAngle };

struct RobinModel {
  RobinVariant variant = RobinVariant::ThresholdK;
  double tau = 0.0;
  double B_or_D = 0.5;

  double coeff() const;  // the c above
};

enum class Model1dMethod { DispersionRoot, FEM1D };

struct ModelSpectrum {
  std::vector<double> etas;  // strictly increasing, at most one negative
  Model1dMethod method = Model1dMethod::DispersionRoot;
};

// Roots of t coth t = c (the single negative eigenvalue, present iff
// c > 1) and t cot t = c per branch ((q-1)pi, q pi), bisected to 1e-12
// on t = sqrt(|eta|).
ModelSpectrum dispersion_eigenvalues(const RobinModel& model, int count);

// P2 elements on (0,1) with gamma(1) = 0 and the rank-one boundary term
// -c gamma(0) gamma'(0); dense solve, O(n^-4) agreement with the roots.
ModelSpectrum fem1d_eigenvalues(const RobinModel& model, int n_elements, int count);

// -4 B^2 tau^2 (ThresholdK) or -4 D^2 tau^4 (ZeroAngle).
double fall_asymptote(const RobinModel& model);

// Dirichlet limits of eta_q as tau -> +-infinity: q^2 pi^2 for tau -> -inf
// of the K model, (q-1)^2 pi^2 for tau -> +inf (and both signs for the
// zero-angle model).
double limit_spectrum(RobinVariant variant, int tau_sign, int q);

}  // namespace strips
