#include "strips/scattering.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <future>
#include <stdexcept>

namespace strips {

namespace {

constexpr double kPi = 3.14159265358979323846;
const std::complex<double> kI(0.0, 1.0);

double wrap_to_pi(double d) {
  while (d > kPi) d -= 2.0 * kPi;
  while (d <= -kPi) d += 2.0 * kPi;
  return d;
}

std::set<EdgeTag> sigma_only() { return {EdgeTag::DirichletWall}; }
std::set<EdgeTag> sigma_and_artificial() {
  return {EdgeTag::DirichletWall, EdgeTag::ArtificialBoundary};
}

// 5-point Gauss on [0,1]
const std::array<double, 5> kGt = {0.5 * (1 - 0.9061798459386640), 0.5 * (1 - 0.5384693101056831),
                                   0.5, 0.5 * (1 + 0.5384693101056831),
                                   0.5 * (1 + 0.9061798459386640)};
const std::array<double, 5> kGw = {0.2369268850561891 / 2, 0.4786286704993665 / 2,
                                   0.5688888888888889 / 2, 0.4786286704993665 / 2,
                                   0.2369268850561891 / 2};

}  // namespace

Mesh scattering_mesh(const HalfStripGeom& geom, const ScanOptions& opts) {
  GradingSpec grading;
  grading.x_target_h = opts.h;
  // extra layers against the shear of the mapped columns near the tip
  grading.y_layers = opts.y_layers > 0
                         ? opts.y_layers
                         : static_cast<int>(std::ceil((1.0 + 0.55 * std::tan(geom.alpha)) / opts.h));
  return build_halfstrip_mesh(geom, opts.h, grading, opts.order);
}

ThresholdField solve_threshold_field(const HalfStripGeom& geom, const ScanOptions& opts) {
  ThresholdField out;
  out.geom = geom;
  out.mesh = scattering_mesh(geom, opts);

  const SpMat K = assemble_stiffness(out.mesh);
  const SpMat M = assemble_mass(out.mesh);
  const RobinBoundary rb = assemble_robin_boundary(out.mesh, geom.truncation_L);

  SpMatC A = (K - kPi * kPi * M).cast<std::complex<double>>() + rb.matrix;

  // solve for the scattered part V = W - I_h[w_in]; the substituted load is
  // on the scale of ||A||*||V||, which keeps the solver's relative-residual
  // contract meaningful (the raw Robin load is orders of magnitude smaller)
  Eigen::VectorXcd win(out.mesh.n_dofs());
  for (int i = 0; i < out.mesh.n_dofs(); ++i)
    win(i) = (out.mesh.nodes(i, 0) + kI) * std::sin(kPi * out.mesh.nodes(i, 1));

  const DofMap map = make_dof_map(out.mesh, sigma_only());
  const SpMatC Ared = reduce(A, map);
  const Eigen::VectorXcd win_red = reduce_vector<std::complex<double>>(win, map);
  const Eigen::VectorXcd bred =
      reduce_vector<std::complex<double>>(rb.load, map) - Ared * win_red;
  const Eigen::VectorXcd v = solve_complex_symmetric(Ared, bred);
  out.values = expand_vector<std::complex<double>>((v + win_red).eval(), map);
  return out;
}

std::complex<double> scattering_coefficient(const ThresholdField& field) {
  const double L = field.geom.truncation_L;
  const Mesh& mesh = field.mesh;
  std::complex<double> acc(0.0, 0.0);
  const int nd = mesh.order == ElementOrder::P1 ? 2 : 3;
  for (const auto& e : mesh.boundary_edges) {
    if (e.tag != EdgeTag::ArtificialBoundary) continue;
    const Eigen::RowVector2d pa = mesh.nodes.row(e.a), pb = mesh.nodes.row(e.b);
    const double len = (pb - pa).norm();
    const std::array<int, 3> dofs = {e.a, e.b, e.mid};
    for (size_t k = 0; k < kGt.size(); ++k) {
      const double t = kGt[k];
      std::array<double, 3> N;
      if (mesh.order == ElementOrder::P1)
        N = {1 - t, t, 0};
      else
        N = {(1 - t) * (1 - 2 * t), t * (2 * t - 1), 4 * t * (1 - t)};
      std::complex<double> w(0.0, 0.0);
      for (int i = 0; i < nd; ++i) w += field.values(dofs[i]) * N[i];
      const double y = pa(1) + t * (pb(1) - pa(1));
      const std::complex<double> win = (L + kI) * std::sin(kPi * y);
      acc += len * kGw[k] * (w - win) * win;
    }
  }
  return 2.0 / (L * L + 1.0) * acc;
}

namespace {

ScatteringSample sample_at(double alpha, const ScanOptions& opts) {
  ScatteringSample s;
  s.alpha = alpha;
  s.truncation_L = opts.L;
  s.mesh_h = opts.h;
  const ThresholdField field = solve_threshold_field({alpha, opts.L}, opts);
  s.S = scattering_coefficient(field);
  s.abs_S_error = std::abs(std::abs(s.S) - 1.0);
  s.accepted = s.abs_S_error < opts.unitarity_tol;
  return s;
}

std::vector<ScatteringSample> solve_grid(const std::vector<double>& grid,
                                         const ScanOptions& opts) {
  std::vector<ScatteringSample> out(grid.size());
  if (opts.workers <= 1) {
    for (size_t i = 0; i < grid.size(); ++i) out[i] = sample_at(grid[i], opts);
    return out;
  }
  std::vector<std::future<ScatteringSample>> jobs;
  jobs.reserve(grid.size());
  for (double a : grid)
    jobs.push_back(std::async(std::launch::async, [a, &opts] { return sample_at(a, opts); }));
  for (size_t i = 0; i < jobs.size(); ++i) out[i] = jobs[i].get();
  return out;
}

void unwrap_in_place(std::vector<ScatteringSample>& samples) {
  if (samples.empty()) return;
  samples[0].phase_unwrapped = std::arg(samples[0].S);
  for (size_t i = 1; i < samples.size(); ++i)
    samples[i].phase_unwrapped =
        samples[i - 1].phase_unwrapped +
        wrap_to_pi(std::arg(samples[i].S) - std::arg(samples[i - 1].S));
}

}  // namespace

std::vector<ScatteringSample> scan_phase(const std::vector<double>& alpha_grid,
                                         const ScanOptions& opts) {
  if (alpha_grid.empty()) return {};
  for (size_t i = 1; i < alpha_grid.size(); ++i)
    if (!(alpha_grid[i] > alpha_grid[i - 1]))
      throw std::invalid_argument("scan_phase: grid must be strictly increasing");

  std::vector<ScatteringSample> samples = solve_grid(alpha_grid, opts);
  unwrap_in_place(samples);

  const int cap = opts.max_inserted > 0 ? opts.max_inserted
                                        : 6 * static_cast<int>(alpha_grid.size());
  int inserted = 0;
  bool changed = true;
  while (changed && inserted < cap) {
    changed = false;
    // a narrow Fano loop (a full 2 pi swing between neighbors) aliases to a
    // small phase jump, so the jump criterion alone can miss it; loops live
    // where S approaches -1, so refine around local minima of |S + 1| too
    std::vector<char> split(samples.size() - 1, 0);
    for (size_t i = 0; i + 1 < samples.size(); ++i) {
      const double da = samples[i + 1].alpha - samples[i].alpha;
      const double dphi = samples[i + 1].phase_unwrapped - samples[i].phase_unwrapped;
      if (std::abs(dphi) > kPi / 4.0 && da > opts.min_dalpha) split[i] = 1;
    }
    for (size_t i = 0; i < samples.size(); ++i) {
      const double m = std::abs(samples[i].S + 1.0);
      if (m >= 1.0) continue;
      const bool min_left = i == 0 || m <= std::abs(samples[i - 1].S + 1.0);
      const bool min_right = i + 1 == samples.size() || m <= std::abs(samples[i + 1].S + 1.0);
      if (!(min_left && min_right)) continue;
      if (i > 0 && samples[i].alpha - samples[i - 1].alpha > 2e-3) split[i - 1] = 1;
      if (i + 1 < samples.size() && samples[i + 1].alpha - samples[i].alpha > 2e-3) split[i] = 1;
    }
    for (size_t i = split.size(); i-- > 0 && inserted < cap;) {
      if (!split[i]) continue;
      ScatteringSample mid = sample_at(0.5 * (samples[i].alpha + samples[i + 1].alpha), opts);
      samples.insert(samples.begin() + static_cast<long>(i) + 1, mid);
      ++inserted;
      changed = true;
    }
    unwrap_in_place(samples);
  }
  return samples;
}

ThresholdAngles find_threshold_angles(const std::vector<ScatteringSample>& scan, int k_max,
                                      const ScanOptions& opts, double tol) {
  if (scan.size() < 2) throw std::invalid_argument("find_threshold_angles: scan too short");
  ThresholdAngles out;
  out.angles.push_back(0.0);  // alpha*_0, S(0) = -1
  out.brackets.push_back({0.0, 0.0});
  out.bisection_steps.push_back(0);

  for (int m = 1; static_cast<int>(out.angles.size()) <= k_max; ++m) {
    const double level = kPi + 2.0 * kPi * m;
    bool found = false;
    for (size_t i = 0; i + 1 < scan.size(); ++i) {
      const double f_lo = scan[i].phase_unwrapped - level;
      const double f_hi = scan[i + 1].phase_unwrapped - level;
      if (f_lo < 0.0 && f_hi >= 0.0) {
        double lo = scan[i].alpha, hi = scan[i + 1].alpha;
        double phase_lo = scan[i].phase_unwrapped;
        int steps = 0;
        while (hi - lo > tol) {
          const double mid_alpha = 0.5 * (lo + hi);
          const ScatteringSample mid = sample_at(mid_alpha, opts);
          // nearest-branch continuation from the lower endpoint
          const double phase_mid = phase_lo + wrap_to_pi(std::arg(mid.S) - phase_lo);
          if (phase_mid - level < 0.0) {
            lo = mid_alpha;
            phase_lo = phase_mid;
          } else {
            hi = mid_alpha;
          }
          ++steps;
        }
        out.angles.push_back(0.5 * (lo + hi));
        out.brackets.push_back({scan[i].alpha, scan[i + 1].alpha});
        out.bisection_steps.push_back(steps);
        found = true;
        break;
      }
    }
    if (!found) {
      out.found_all = false;
      break;
    }
  }
  return out;
}

NearFieldSpectrum near_field_discrete_spectrum(const HalfStripGeom& geom, double h, int count,
                                               const ScanOptions& opts_in) {
  if (!(geom.alpha > 0.0 && geom.alpha < kPi / 2.0))
    throw std::invalid_argument("near_field_discrete_spectrum: alpha must lie in (0, pi/2)");
  ScanOptions opts = opts_in;
  opts.h = h;
  opts.L = geom.truncation_L;
  const Mesh mesh = scattering_mesh(geom, opts);
  const SpMat K = assemble_stiffness(mesh);
  const SpMat M = assemble_mass(mesh);
  const DofMap map = make_dof_map(mesh, sigma_and_artificial());
  const SpMat Kr = reduce(K, map);
  const SpMat Mr = reduce(M, map);
  const EigenResult res = solve_gevp_smallest(Kr, Mr, count);

  NearFieldSpectrum spec;
  spec.alpha = geom.alpha;
  const double threshold = kPi * kPi;
  for (int i = 0; i < res.eigenvalues.size(); ++i) {
    const double mu = res.eigenvalues(i);
    if (mu < threshold) {
      spec.mu.push_back(mu);
      if (mu > threshold * 0.98) spec.truncation_sensitive.push_back(mu);
    }
  }
  spec.n_below = static_cast<int>(spec.mu.size());
  return spec;
}

namespace {

// The Gamma-integral \int s((d_s v)^2 - pi^2 v^2) ds has an r^(2*lam-1)
// tail at the upper corner of Gamma (lam = pi/(pi+2a) < 1), which converges
// too slowly for any feasible mesh to capture by quadrature. Split it:
// plain quadrature away from the corner, plus the analytic tail of the
// fitted corner expansion v ~ C1 r^lam + C2 r^(3 lam) + C3 r^(lam+2).
struct CornerSplit {
  GammaEnergy far;                           // s-weighted, rho >= delta
  std::array<std::complex<double>, 3> c{};   // fitted corner coefficients
  std::array<double, 3> expo{};
  double delta = 0.0;                        // exact split radius
  double ell = 0.0;                          // length of Gamma
};

CornerSplit corner_split_energy(const Mesh& mesh, const Eigen::VectorXcd& field, double alpha,
                                double delta_target) {
  CornerSplit out;
  const double lam = singular_exponent_top(alpha);
  out.expo = {lam, 3.0 * lam, lam + 2.0};
  out.ell = 1.0 / std::cos(alpha);
  const Eigen::RowVector2d tip = mesh.nodes.row(mesh.corner_nodes[0]);
  const Eigen::RowVector2d top = mesh.nodes.row(mesh.corner_nodes[1]);

  // align the split radius with a mesh node so edges fall wholly on one side
  out.delta = std::numeric_limits<double>::infinity();
  for (const auto& e : mesh.boundary_edges) {
    if (e.tag != EdgeTag::FreeSide) continue;
    for (int v : {e.a, e.b}) {
      const double rho = (mesh.nodes.row(v) - top).norm();
      if (rho >= delta_target && rho < out.delta) out.delta = rho;
    }
  }

  const std::array<double, 3> gt = {0.5 * (1 - std::sqrt(3.0 / 5.0)), 0.5,
                                    0.5 * (1 + std::sqrt(3.0 / 5.0))};
  const std::array<double, 3> gw = {5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0};
  const bool p2 = mesh.order == ElementOrder::P2;
  const int nd = p2 ? 3 : 2;

  // least-squares data for the corner window delta <= rho <= 6*delta
  Eigen::Matrix3d gram = Eigen::Matrix3d::Zero();
  Eigen::Vector3cd rhs = Eigen::Vector3cd::Zero();

  for (const auto& e : mesh.boundary_edges) {
    if (e.tag != EdgeTag::FreeSide) continue;
    const Eigen::RowVector2d pa = mesh.nodes.row(e.a), pb = mesh.nodes.row(e.b);
    const double len = (pb - pa).norm();
    const std::array<int, 3> dofs = {e.a, e.b, e.mid};
    const double rho_min =
        std::min((pa - top).norm(), (pb - top).norm());
    if (rho_min >= out.delta - 1e-12) {
      for (size_t k = 0; k < gt.size(); ++k) {
        const double t = gt[k];
        std::array<double, 3> N, dN;
        if (p2) {
          N = {(1 - t) * (1 - 2 * t), t * (2 * t - 1), 4 * t * (1 - t)};
          dN = {4 * t - 3, 4 * t - 1, 4 - 8 * t};
        } else {
          N = {1 - t, t, 0};
          dN = {-1, 1, 0};
        }
        std::complex<double> f{}, df{};
        for (int i = 0; i < nd; ++i) {
          f += field(dofs[i]) * N[i];
          df += field(dofs[i]) * dN[i];
        }
        const Eigen::RowVector2d p = pa + t * (pb - pa);
        const double s = (p - tip).norm();
        out.far.grad_term += len * gw[k] * s * std::norm(df / len);
        out.far.mass_term += len * gw[k] * s * std::norm(f);
      }
    }
    // fit window nodes (vertices and midpoints)
    for (int i = 0; i < nd; ++i) {
      if (i == 2 && !p2) break;
      const int dof = dofs[i];
      const double rho = (mesh.nodes.row(dof) - top).norm();
      if (rho < out.delta - 1e-12 || rho > 6.0 * delta_target) continue;
      Eigen::Vector3d basis;
      for (int j = 0; j < 3; ++j) basis(j) = std::pow(rho, out.expo[j]);
      gram += basis * basis.transpose();
      rhs += basis * field(dof);
    }
  }
  const auto ldlt = gram.ldlt();
  const Eigen::Vector3d re = ldlt.solve(rhs.real().eval());
  const Eigen::Vector3d im = ldlt.solve(rhs.imag().eval());
  for (int j = 0; j < 3; ++j) out.c[j] = std::complex<double>(re(j), im(j));
  return out;
}

// \int_0^delta (ell - rho) (|g'|^2 - pi^2 |g|^2) drho for the fitted
// g = sum c_j rho^(e_j), via the moments \int (ell-rho) rho^a drho.
double corner_tail(const CornerSplit& cs) {
  const auto moment = [&](double a) {
    return cs.ell * std::pow(cs.delta, a + 1) / (a + 1) -
           std::pow(cs.delta, a + 2) / (a + 2);
  };
  double tail = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      const double cij = (cs.c[i] * std::conj(cs.c[j])).real();
      tail += cij * cs.expo[i] * cs.expo[j] * moment(cs.expo[i] + cs.expo[j] - 2.0);
      tail -= cij * kPi * kPi * moment(cs.expo[i] + cs.expo[j]);
    }
  return tail;
}

double corrected_gamma_integral(const Mesh& mesh, const Eigen::VectorXcd& field, double alpha) {
  const double ell = 1.0 / std::cos(alpha);
  const CornerSplit cs = corner_split_energy(mesh, field, alpha, 0.03 * ell);
  return cs.far.grad_term - kPi * kPi * cs.far.mass_term + corner_tail(cs);
}

}  // namespace

ModelConstants constant_B(double alpha_star, const ScanOptions& opts) {
  const ThresholdField field = solve_threshold_field({alpha_star, opts.L}, opts);
  const std::complex<double> S = scattering_coefficient(field);
  if (!(std::abs(S + 1.0) < 1e-2))
    throw std::invalid_argument("constant_B: |S+1| >= 1e-2, not a threshold angle");

  // bounded representative v = W/(2i) = sin(pi Y) + decaying
  const Eigen::VectorXcd v = field.values / (2.0 * kI);
  const Eigen::VectorXd re = v.real(), im = v.imag();
  ModelConstants out;
  out.alpha_star = alpha_star;
  out.imag_residual = im.norm() / re.norm();

  out.B = corrected_gamma_integral(field.mesh, re.cast<std::complex<double>>(), alpha_star);
  out.B_rellich = 2.0 / (std::cos(alpha_star) * std::sin(alpha_star)) * dx_energy(field.mesh, re);
  return out;
}

ModelConstants constant_D(double L, double h, const ScanOptions& opts_in) {
  if (!(L >= 4.0)) throw std::invalid_argument("constant_D: need L >= 4");
  ScanOptions opts = opts_in;
  opts.L = L;
  opts.h = h;
  const HalfStripGeom geom{0.0, L};
  const Mesh mesh = scattering_mesh(geom, opts);
  const SpMat K = assemble_stiffness(mesh);
  const SpMat M = assemble_mass(mesh);
  SpMat A = K - kPi * kPi * M;

  const Eigen::VectorXd load = boundary_load<double>(
      mesh, EdgeTag::FreeSide, [](double, double y) { return -kPi * std::cos(kPi * y); });

  const DofMap map = make_dof_map(mesh, sigma_and_artificial());
  SpMat Ared = reduce(A, map);
  Ared.makeCompressed();
  Eigen::SimplicialLDLT<SpMat> ldlt(Ared);
  if (ldlt.info() != Eigen::Success)
    throw SolverError("constant_D: factorization failed (pi^2 near a truncated eigenvalue; change L)");
  const Eigen::VectorXd bred = reduce_vector<double>(load, map);
  const Eigen::VectorXd u = ldlt.solve(bred);
  const double rel = (Ared * u - bred).norm() / bred.norm();
  if (!(rel < 1e-8))
    throw SolverError("constant_D: near-singular system (residual " + std::to_string(rel) +
                      "); change L");

  const Eigen::VectorXd U = expand_vector<double>(u, map);
  ModelConstants out;
  out.D = u.dot(bred);  // U^T (K - pi^2 M) U by the discrete equation
  out.D_lower_bound = 3.0 * kPi * kPi * U.dot(M * U);
  return out;
}

PhaseDerivative phase_derivative_check(double alpha_star, const ScanOptions& opts, double dalpha) {
  PhaseDerivative out;
  const ThresholdField field = solve_threshold_field({alpha_star, opts.L}, opts);
  out.integral = corrected_gamma_integral(field.mesh, field.values, alpha_star);

  const ScatteringSample lo = sample_at(alpha_star - dalpha, opts);
  const ScatteringSample hi = sample_at(alpha_star + dalpha, opts);
  out.fd_slope = wrap_to_pi(std::arg(hi.S) - std::arg(lo.S)) / (2.0 * dalpha);
  return out;
}

}  // namespace strips
