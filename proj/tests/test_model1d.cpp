#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "strips/model1d.hpp"

using namespace strips;

namespace {
constexpr double kPi = 3.14159265358979323846;

RobinModel k_model(double c) { return {RobinVariant::ThresholdK, c, 0.5}; }  // 2B = 1 => c = tau
}

TEST_CASE("c = 0 gives the Neumann spectrum (q - 1/2)^2 pi^2") {
  const ModelSpectrum spec = dispersion_eigenvalues(k_model(0.0), 5);
  for (int q = 1; q <= 5; ++q)
    CHECK(spec.etas[q - 1] == doctest::Approx((q - 0.5) * (q - 0.5) * kPi * kPi).epsilon(1e-12));
}

TEST_CASE("c = 1 puts an eigenvalue exactly at zero") {
  const ModelSpectrum spec = dispersion_eigenvalues(k_model(1.0), 3);
  CHECK(std::abs(spec.etas[0]) < 1e-12);
  CHECK(spec.etas[1] > kPi * kPi);
}

TEST_CASE("c = 30 negative root close to -4 B^2 tau^2 = -900") {
  const ModelSpectrum spec = dispersion_eigenvalues(k_model(30.0), 1);
  CHECK(spec.etas[0] < 0.0);
  CHECK(std::abs(spec.etas[0] - (-900.0)) / 900.0 < 0.02);
  CHECK(spec.etas[0] == doctest::Approx(fall_asymptote(k_model(30.0))).epsilon(0.02));
}

TEST_CASE("monotonicity: every eta_q non-increasing in c") {
  const double cs[] = {0.0, 0.5, 1.0, 2.0, 10.0};
  std::vector<std::vector<double>> spectra;
  for (double c : cs) spectra.push_back(dispersion_eigenvalues(k_model(c), 5).etas);
  for (size_t i = 1; i < spectra.size(); ++i)
    for (int q = 0; q < 5; ++q) CHECK(spectra[i][q] <= spectra[i - 1][q] + 1e-12);
}

TEST_CASE("interlacing with the Dirichlet/Neumann limits") {
  for (double c : {0.3, 0.9, 2.0, 10.0}) {
    const ModelSpectrum spec = dispersion_eigenvalues(k_model(c), 5);
    for (int q = 2; q <= 5; ++q) {
      CHECK(spec.etas[q - 1] > (q - 1) * (q - 1) * kPi * kPi);
      CHECK(spec.etas[q - 1] < (q - 0.5) * (q - 0.5) * kPi * kPi);
    }
    if (c < 1.0) {
      CHECK(spec.etas[0] > 0.0);
      CHECK(spec.etas[0] < kPi * kPi / 4.0);
    }
  }
}

TEST_CASE("negative tau shifts positive roots toward q^2 pi^2") {
  const ModelSpectrum spec = dispersion_eigenvalues(k_model(-1e6), 3);
  for (int q = 1; q <= 3; ++q)
    CHECK(spec.etas[q - 1] == doctest::Approx(q * q * kPi * kPi).epsilon(1e-4));
}

TEST_CASE("dispersion roots and 1D FEM agree to 1e-6 relative at n = 256") {
  for (double c : {0.0, 0.5, 1.0, 2.0, 30.0}) {
    const ModelSpectrum roots = dispersion_eigenvalues(k_model(c), 5);
    const ModelSpectrum fem = fem1d_eigenvalues(k_model(c), 256, 5);
    for (int q = 0; q < 5; ++q) {
      const double scale = std::max(1.0, std::abs(roots.etas[q]));
      CHECK(std::abs(roots.etas[q] - fem.etas[q]) / scale < 1e-6);
    }
  }
  // zero-crossing at c = 1: |eta_1| < 1e-6 by FEM as well
  CHECK(std::abs(fem1d_eigenvalues(k_model(1.0), 256, 1).etas[0]) < 1e-6);
}

TEST_CASE("FEM convergence is fourth order (Richardson ratio about 16)") {
  const RobinModel model = k_model(2.0);
  const double exact = dispersion_eigenvalues(model, 1).etas[0];
  const double e64 = std::abs(fem1d_eigenvalues(model, 64, 1).etas[0] - exact);
  const double e128 = std::abs(fem1d_eigenvalues(model, 128, 1).etas[0] - exact);
  CHECK(e64 / e128 == doctest::Approx(16.0).epsilon(0.5));
}

TEST_CASE("c = 0, n = 64 FEM reproduces pi^2/4 to 1e-6") {
  CHECK(std::abs(fem1d_eigenvalues(k_model(0.0), 64, 1).etas[0] - kPi * kPi / 4.0) < 1e-6);
}

TEST_CASE("zero-angle model: evenness and the reduction identity") {
  const double D = 0.7, B = 0.45, tau = 1.7;
  const RobinModel zp{RobinVariant::ZeroAngle, tau, D};
  const RobinModel zm{RobinVariant::ZeroAngle, -tau, D};
  const ModelSpectrum sp = dispersion_eigenvalues(zp, 4);
  const ModelSpectrum sm = dispersion_eigenvalues(zm, 4);
  for (int q = 0; q < 4; ++q) CHECK(sp.etas[q] == sm.etas[q]);

  // spectrum of the zero-angle model at tau equals the K model at D tau^2 / B
  const RobinModel keq{RobinVariant::ThresholdK, D * tau * tau / B, B};
  CHECK(zp.coeff() == doctest::Approx(keq.coeff()).epsilon(1e-15));
  const ModelSpectrum sk = dispersion_eigenvalues(keq, 4);
  for (int q = 0; q < 4; ++q) CHECK(sp.etas[q] == doctest::Approx(sk.etas[q]).epsilon(1e-14));
}

TEST_CASE("fall asymptotes and Dirichlet limits") {
  CHECK(fall_asymptote({RobinVariant::ThresholdK, 30.0, 0.5}) == doctest::Approx(-900.0));
  CHECK(fall_asymptote({RobinVariant::ZeroAngle, 5.0, 0.5}) == doctest::Approx(-625.0));
  CHECK(fall_asymptote({RobinVariant::ThresholdK, 0.0, 0.5}) == 0.0);

  CHECK(limit_spectrum(RobinVariant::ThresholdK, -1, 1) == doctest::Approx(kPi * kPi));
  CHECK(limit_spectrum(RobinVariant::ThresholdK, +1, 2) == doctest::Approx(kPi * kPi));
  CHECK(limit_spectrum(RobinVariant::ZeroAngle, +1, 3) == doctest::Approx(4 * kPi * kPi));
}

TEST_CASE("asymptote ratio approaches 1 for large tau") {
  const RobinModel model = k_model(100.0);  // 2B = 1, tau = 100
  const double eta1 = dispersion_eigenvalues(model, 1).etas[0];
  CHECK(std::abs(eta1 / fall_asymptote(model) - 1.0) < 0.05);
}
