#include "strips/harness.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "strips/model1d.hpp"

namespace strips {

namespace {
constexpr double kPi = 3.14159265358979323846;

TrapezoidSolveOptions with_defaults(TrapezoidSolveOptions opts, double eps) {
  if (opts.h <= 0.0) opts.h = eps / 6.0;
  if (opts.y_layers == 0) opts.y_layers = std::max(2, static_cast<int>(std::round(eps / opts.h)));
  if (opts.x_target_h <= 0.0) opts.x_target_h = opts.h;
  return opts;
}
}  // namespace

std::vector<double> exact_alpha0_spectrum(double eps, int count) {
  if (!(eps > 0.0)) throw std::invalid_argument("exact_alpha0_spectrum: eps must be positive");
  std::vector<double> values(count);
  for (int p = 0; p < count; ++p)
    values[p] = kPi * kPi / (eps * eps) + (p + 0.5) * (p + 0.5) * kPi * kPi;
  return values;
}

double normalized_threshold(double eps) { return kPi * kPi / (eps * eps); }

const char* to_string(Regime regime) {
  switch (regime) {
    case Regime::DiscreteSpectrum: return "DiscreteSpectrum";
    case Regime::GenericDirichlet: return "GenericDirichlet";
    case Regime::ThresholdNeumann: return "ThresholdNeumann";
    case Regime::RobinModelK: return "RobinModelK";
    case Regime::RobinModelZero: return "RobinModelZero";
  }
  return "?";
}

Eigen::VectorXd TrapezoidSolution::eigenfunction(int k) const {
  return expand_vector<double>(result.eigenvectors.col(k), map);
}

TrapezoidSolution trapezoid_spectrum(const TrapezoidGeom& geom, int count,
                                     const TrapezoidSolveOptions& opts_in) {
  const TrapezoidSolveOptions opts = with_defaults(opts_in, geom.eps);
  GradingSpec grading;
  grading.graded = opts.graded;
  grading.y_layers = opts.y_layers;
  grading.x_target_h = opts.x_target_h;

  TrapezoidSolution sol;
  sol.mesh = build_trapezoid_mesh(geom, opts.h, grading, opts.order);
  const SpMat K = assemble_stiffness(sol.mesh);
  const SpMat M = assemble_mass(sol.mesh);
  std::set<EdgeTag> tags = {EdgeTag::DirichletWall};
  if (geom.gamma_bc == GammaBc::Dirichlet) tags.insert(EdgeTag::FreeSide);
  sol.map = make_dof_map(sol.mesh, tags);
  const SpMat Kr = reduce(K, sol.map);
  const SpMat Mr = reduce(M, sol.map);
  sol.result = solve_gevp_smallest(Kr, Mr, count);
  return sol;
}

double fit_rate(const std::vector<double>& eps_list, const std::vector<double>& residuals) {
  const size_t n = eps_list.size();
  if (n < 2 || residuals.size() != n) return 0.0;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < n; ++i) {
    const double x = std::log(eps_list[i]);
    const double y = std::log(std::max(residuals[i], 1e-300));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

namespace {

// thickness layers that refine as eps shrinks, so the FEM floor decays at
// least as fast as the regimes under test
int sweep_layers(double eps) {
  return std::max(8, static_cast<int>(std::round(12.0 * std::pow(0.1 / eps, 1.0))));
}

TrapezoidSolveOptions sweep_options(double eps) {
  TrapezoidSolveOptions opts;
  opts.h = eps / 6.0;
  opts.y_layers = sweep_layers(eps);
  opts.x_target_h = 1.0 / 40.0;
  return opts;
}

void finish_rate(AsymptoticComparison& cmp, const std::vector<double>& eps_list) {
  std::vector<double> res;
  res.reserve(cmp.records.size());
  for (const auto& r : cmp.records) res.push_back(r.residual);
  cmp.fitted_rate = fit_rate(eps_list, res);
  cmp.rate_meaningful = eps_list.size() >= 2;
}

}  // namespace

AsymptoticComparison verify_thm1_discrete(double alpha, const std::vector<double>& eps_list, int p,
                                          double mu_p) {
  AsymptoticComparison cmp;
  cmp.regime = Regime::DiscreteSpectrum;
  cmp.alpha = alpha;
  cmp.index = p;
  if (!(mu_p > 0.0 && mu_p < kPi * kPi)) {
    cmp.note = "empty regime: no discrete near-field eigenvalue supplied";
    return cmp;
  }
  for (double eps : eps_list) {
    const TrapezoidSolution sol = trapezoid_spectrum({eps, alpha}, p, sweep_options(eps));
    ComparisonRecord rec;
    rec.eps = eps;
    rec.computed = eps * eps * sol.result.eigenvalues(p - 1);
    rec.predicted = mu_p;
    rec.residual = std::abs(rec.computed - rec.predicted);
    cmp.records.push_back(rec);
  }
  finish_rate(cmp, eps_list);
  return cmp;
}

AsymptoticComparison verify_thm1_generic(double alpha, const std::vector<double>& eps_list, int q,
                                         int n_circ, const std::vector<double>& known_thresholds) {
  AsymptoticComparison cmp;
  cmp.regime = Regime::GenericDirichlet;
  cmp.alpha = alpha;
  cmp.index = q;
  for (double a : known_thresholds)
    if (std::abs(alpha - a) < 0.05)
      cmp.note = "warning: alpha within 0.05 of a threshold angle, regime invalid";
  const double predicted = q * q * kPi * kPi;
  for (double eps : eps_list) {
    const TrapezoidSolution sol = trapezoid_spectrum({eps, alpha}, n_circ + q, sweep_options(eps));
    ComparisonRecord rec;
    rec.eps = eps;
    rec.computed = sol.result.eigenvalues(n_circ + q - 1) - normalized_threshold(eps);
    rec.predicted = predicted;
    rec.residual = std::abs(rec.computed - rec.predicted);
    cmp.records.push_back(rec);
  }
  finish_rate(cmp, eps_list);
  return cmp;
}

AsymptoticComparison verify_thm1_threshold(double alpha_star, const std::vector<double>& eps_list,
                                           int q, int n_circ) {
  AsymptoticComparison cmp;
  cmp.regime = Regime::ThresholdNeumann;
  cmp.alpha = alpha_star;
  cmp.index = q;
  const double predicted = (q - 0.5) * (q - 0.5) * kPi * kPi;
  for (double eps : eps_list) {
    const TrapezoidSolution sol =
        trapezoid_spectrum({eps, alpha_star}, n_circ + q, sweep_options(eps));
    ComparisonRecord rec;
    rec.eps = eps;
    rec.computed = sol.result.eigenvalues(n_circ + q - 1) - normalized_threshold(eps);
    rec.predicted = predicted;
    rec.residual = std::abs(rec.computed - rec.predicted);
    cmp.records.push_back(rec);
  }
  finish_rate(cmp, eps_list);
  return cmp;
}

AsymptoticComparison verify_model_K(double alpha_star, double B, int n_circ,
                                    const std::vector<double>& tau_list,
                                    const std::vector<double>& eps_list) {
  AsymptoticComparison cmp;
  cmp.regime = Regime::RobinModelK;
  cmp.alpha = alpha_star;
  cmp.index = 1;
  for (double eps : eps_list)
    for (double tau : tau_list) {
      const double alpha = alpha_star + tau * eps;
      if (!(alpha > 0.0 && alpha < kPi / 2.0)) {
        cmp.note = "warning: alpha* + tau*eps left (0, pi/2); point skipped";
        continue;
      }
      const RobinModel model{RobinVariant::ThresholdK, tau, B};
      const double eta1 = dispersion_eigenvalues(model, 1).etas[0];
      const TrapezoidSolution sol = trapezoid_spectrum({eps, alpha}, n_circ + 1, sweep_options(eps));
      ComparisonRecord rec;
      rec.eps = eps;
      rec.tau = tau;
      rec.computed = sol.result.eigenvalues(n_circ) - normalized_threshold(eps);
      rec.predicted = eta1;
      rec.residual = std::abs(rec.computed - rec.predicted);
      cmp.records.push_back(rec);
    }
  return cmp;
}

AsymptoticComparison verify_model_zero(double D, const std::vector<double>& tau_list,
                                       const std::vector<double>& eps_list) {
  AsymptoticComparison cmp;
  cmp.regime = Regime::RobinModelZero;
  cmp.index = 1;
  for (double eps : eps_list)
    for (double tau : tau_list) {
      const double kappa = tau * std::sqrt(eps);
      if (!(std::abs(kappa) < kPi / 2.0)) {
        cmp.note = "warning: tau*sqrt(eps) left (-pi/2, pi/2); point skipped";
        continue;
      }
      const RobinModel model{RobinVariant::ZeroAngle, tau, D};
      const double eta1 = dispersion_eigenvalues(model, 1).etas[0];
      const TrapezoidSolution sol = trapezoid_spectrum({eps, kappa}, 1, sweep_options(eps));
      ComparisonRecord rec;
      rec.eps = eps;
      rec.tau = tau;
      rec.computed = sol.result.eigenvalues(0) - normalized_threshold(eps);
      rec.predicted = eta1;
      rec.residual = std::abs(rec.computed - rec.predicted);
      cmp.records.push_back(rec);
    }
  return cmp;
}

std::vector<LabeledEigenvalue> broken_strip_spectrum(double eps, double alpha, int count,
                                                     const TrapezoidSolveOptions& opts) {
  TrapezoidGeom sym{eps, alpha, GammaBc::Neumann};
  TrapezoidGeom anti{eps, alpha, GammaBc::Dirichlet};
  const TrapezoidSolution s = trapezoid_spectrum(sym, count, opts);
  const TrapezoidSolution a = trapezoid_spectrum(anti, count, opts);
  std::vector<LabeledEigenvalue> merged;
  merged.reserve(2 * static_cast<size_t>(count));
  for (int i = 0; i < s.result.eigenvalues.size(); ++i)
    merged.push_back({s.result.eigenvalues(i), Parity::Symmetric});
  for (int i = 0; i < a.result.eigenvalues.size(); ++i)
    merged.push_back({a.result.eigenvalues(i), Parity::Antisymmetric});
  std::sort(merged.begin(), merged.end(),
            [](const LabeledEigenvalue& x, const LabeledEigenvalue& y) { return x.value < y.value; });
  merged.resize(std::min<size_t>(merged.size(), 2 * static_cast<size_t>(count)));
  return merged;
}

DiveTable dive_sweep(double eps, const std::vector<double>& alpha_grid, int count,
                     const TrapezoidSolveOptions& opts) {
  DiveTable table;
  table.eps = eps;
  const double threshold = normalized_threshold(eps);
  for (double alpha : alpha_grid) {
    const TrapezoidSolution sol = trapezoid_spectrum({eps, alpha}, count, opts);
    std::vector<double> vals(sol.result.eigenvalues.data(),
                             sol.result.eigenvalues.data() + sol.result.eigenvalues.size());
    vals.resize(std::min<size_t>(vals.size(), count));
    table.alphas.push_back(alpha);
    table.count_below_threshold.push_back(static_cast<int>(
        std::count_if(vals.begin(), vals.end(), [&](double v) { return v < threshold; })));
    table.eigenvalues.push_back(std::move(vals));
  }
  return table;
}

std::vector<std::vector<double>> track_branches(const std::vector<std::vector<double>>& spectra) {
  if (spectra.empty()) return {};
  const size_t nb = spectra.front().size();
  std::vector<std::vector<double>> branches(nb);
  for (size_t b = 0; b < nb; ++b) branches[b].push_back(spectra[0][b]);
  for (size_t k = 1; k < spectra.size(); ++k) {
    std::vector<char> used(spectra[k].size(), 0);
    for (size_t b = 0; b < nb; ++b) {
      const double prev = branches[b].back();
      size_t best = 0;
      double best_d = std::numeric_limits<double>::infinity();
      for (size_t j = 0; j < spectra[k].size(); ++j) {
        if (used[j]) continue;
        const double d = std::abs(spectra[k][j] - prev);
        if (d < best_d) {
          best_d = d;
          best = j;
        }
      }
      used[best] = 1;
      branches[b].push_back(spectra[k][best]);
    }
  }
  return branches;
}

}  // namespace strips
