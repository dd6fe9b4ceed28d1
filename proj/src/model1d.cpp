#include "strips/model1d.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>

namespace strips {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kBracketMargin = 1e-10;

double bisect(double lo, double hi, double flo, const auto& f) {
  // plain bisection to 1e-13 on the abscissa
  for (int it = 0; it < 200 && hi - lo > 1e-13; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if ((fm < 0) == (flo < 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// t coth t - c, increasing from 1 - c at t -> 0.
double negative_branch_root(double c) {
  const auto f = [c](double t) { return t / std::tanh(t) - c; };
  // t < t coth t < t + 1 pins the root inside (c-1, c)
  const double lo = std::max(kBracketMargin, c - 1.0);
  return bisect(lo, c, f(lo), f);
}

// t cot t - c on ((q-1)pi, q pi), strictly decreasing on each branch.
double positive_branch_root(double c, int q) {
  const auto f = [c](double t) { return t * std::cos(t) / std::sin(t) - c; };
  const double lo = (q - 1) * kPi + kBracketMargin;
  const double hi = q * kPi - kBracketMargin;
  const double flo = (q == 1) ? (1.0 - c) : f(lo);
  if (flo < 0 && q == 1) throw std::logic_error("positive_branch_root: no branch-1 root for c>=1");
  return bisect(lo, hi, flo, f);
}

}  // namespace

double RobinModel::coeff() const {
  return variant == RobinVariant::ThresholdK ? 2.0 * tau * B_or_D
                                             : 2.0 * tau * tau * B_or_D;
}

ModelSpectrum dispersion_eigenvalues(const RobinModel& model, int count) {
  if (count < 1) throw std::invalid_argument("dispersion_eigenvalues: count must be >= 1");
  const double c = model.coeff();
  ModelSpectrum spec;
  spec.method = Model1dMethod::DispersionRoot;
  spec.etas.reserve(count);
  if (c > 1.0) {
    const double t = negative_branch_root(c);
    spec.etas.push_back(-t * t);
  } else if (c == 1.0) {
    spec.etas.push_back(0.0);
  } else {
    const double t = positive_branch_root(c, 1);
    spec.etas.push_back(t * t);
  }
  for (int q = 2; static_cast<int>(spec.etas.size()) < count; ++q) {
    const double t = positive_branch_root(c, q);
    spec.etas.push_back(t * t);
  }
  return spec;
}

ModelSpectrum fem1d_eigenvalues(const RobinModel& model, int n_elements, int count) {
  if (n_elements < 8) throw std::invalid_argument("fem1d_eigenvalues: need at least 8 elements");
  const double c = model.coeff();
  const int n_nodes = 2 * n_elements + 1;  // vertex/midpoint interleaved, x=0 first
  const double h = 1.0 / n_elements;

  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n_nodes, n_nodes);
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n_nodes, n_nodes);
  const double k3 = 1.0 / (3.0 * h), m30 = h / 30.0;
  const double ke[3][3] = {{7 * k3, -8 * k3, k3}, {-8 * k3, 16 * k3, -8 * k3}, {k3, -8 * k3, 7 * k3}};
  const double me[3][3] = {{4 * m30, 2 * m30, -m30}, {2 * m30, 16 * m30, 2 * m30},
                           {-m30, 2 * m30, 4 * m30}};
  for (int e = 0; e < n_elements; ++e) {
    const int base = 2 * e;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        K(base + i, base + j) += ke[i][j];
        M(base + i, base + j) += me[i][j];
      }
  }
  K(0, 0) -= c;

  const int n = n_nodes - 1;  // gamma(1) = 0 eliminates the last dof
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(K.topLeftCorner(n, n),
                                                                M.topLeftCorner(n, n));
  ModelSpectrum spec;
  spec.method = Model1dMethod::FEM1D;
  count = std::min(count, n);
  spec.etas.assign(ges.eigenvalues().data(), ges.eigenvalues().data() + count);
  return spec;
}

double fall_asymptote(const RobinModel& model) {
  if (model.tau == 0.0) return 0.0;
  const double v = model.B_or_D;
  return model.variant == RobinVariant::ThresholdK
             ? -4.0 * v * v * model.tau * model.tau
             : -4.0 * v * v * model.tau * model.tau * model.tau * model.tau;
}

double limit_spectrum(RobinVariant variant, int tau_sign, int q) {
  if (q < 1) throw std::invalid_argument("limit_spectrum: q must be >= 1");
  if (variant == RobinVariant::ZeroAngle) {
    if (q < 2) throw std::invalid_argument("limit_spectrum: zero-angle limits defined for q >= 2");
    return (q - 1) * (q - 1) * kPi * kPi;
  }
  if (tau_sign < 0) return q * q * kPi * kPi;
  if (q < 2) throw std::invalid_argument("limit_spectrum: eta_1 diverges as tau -> +infinity");
  return (q - 1) * (q - 1) * kPi * kPi;
}

}  // namespace strips
