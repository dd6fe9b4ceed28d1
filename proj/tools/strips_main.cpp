// Command-line front end: every workflow as a subcommand with CSV/JSON
// output under a run directory. Exit codes: 0 success, 1 invariant
// violation, 2 usage error, 3 solver failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "strips/harness.hpp"
#include "strips/io.hpp"
#include "strips/model1d.hpp"
#include "strips/scattering.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace strips;

namespace {

constexpr double kPi = 3.14159265358979323846;

struct GlobalConfig {
  std::string out = "out";
  int workers = 1;
};

fs::path prepare_outdir(const GlobalConfig& g) {
  fs::path dir(g.out);
  fs::create_directories(dir);
  return dir;
}

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = n == 1 ? a : a + (b - a) * i / (n - 1);
  return v;
}

ElementOrder parse_order(int p) {
  if (p == 1) return ElementOrder::P1;
  if (p == 2) return ElementOrder::P2;
  throw CLI::ValidationError("--order", "element order must be 1 or 2");
}

int run_spectrum(const GlobalConfig& g, double eps, double alpha, int count, double h, int order,
                 const std::string& gamma_bc, bool dump_modes) {
  TrapezoidGeom geom{eps, alpha,
                     gamma_bc == "dirichlet" ? GammaBc::Dirichlet : GammaBc::Neumann};
  TrapezoidSolveOptions opts;
  opts.h = h;
  opts.order = parse_order(order);
  const TrapezoidSolution sol = trapezoid_spectrum(geom, count, opts);

  const fs::path dir = prepare_outdir(g);
  CsvTable t;
  t.header = {"p", "lambda", "lambda_minus_threshold", "residual"};
  for (int i = 0; i < sol.result.eigenvalues.size(); ++i)
    t.rows.push_back({double(i + 1), sol.result.eigenvalues(i),
                      sol.result.eigenvalues(i) - normalized_threshold(eps),
                      sol.result.residual_norms(i)});
  write_csv(dir / "spectrum.csv", t);
  if (dump_modes) {
    for (int k = 0; k < sol.result.eigenvalues.size(); ++k) {
      std::ofstream os(dir / ("mode_" + std::to_string(k + 1) + ".txt"));
      const Eigen::VectorXd u = sol.eigenfunction(k);
      for (int i = 0; i < u.size(); ++i)
        os << sol.mesh.nodes(i, 0) << " " << sol.mesh.nodes(i, 1) << " " << format_g12(u(i))
           << "\n";
    }
  }
  write_manifest(dir, "spectrum",
                 {{"eps", format_g12(eps)},
                  {"alpha", format_g12(alpha)},
                  {"count", std::to_string(count)},
                  {"h", format_g12(opts.h > 0 ? opts.h : eps / 6.0)},
                  {"order", std::to_string(order)},
                  {"gamma_bc", gamma_bc}},
                 {{"mesh_dofs", std::to_string(sol.mesh.n_dofs())},
                  {"solver_tol", "1e-9"}});
  std::cout << "wrote " << (dir / "spectrum.csv").string() << "\n";
  return 0;
}

int run_scan(const GlobalConfig& g, double a0, double a1, int samples, double L, double h) {
  ScanOptions opts;
  opts.L = L;
  opts.h = h;
  opts.workers = g.workers;
  const auto scan = scan_phase(linspace(a0, a1, samples), opts);

  const fs::path dir = prepare_outdir(g);
  CsvTable t;
  t.header = {"alpha", "re_S", "im_S", "phase_unwrapped", "abs_S_error"};
  int violations = 0;
  for (const auto& s : scan) {
    t.rows.push_back({s.alpha, s.S.real(), s.S.imag(), s.phase_unwrapped, s.abs_S_error});
    if (!s.accepted) ++violations;
  }
  write_csv(dir / "scan.csv", t);
  write_manifest(dir, "scan",
                 {{"alpha_min", format_g12(a0)},
                  {"alpha_max", format_g12(a1)},
                  {"samples", std::to_string(samples)},
                  {"L", format_g12(L)},
                  {"h", format_g12(h)}},
                 {{"points", std::to_string(scan.size())},
                  {"unitarity_violations", std::to_string(violations)}});
  std::cout << "wrote " << (dir / "scan.csv").string() << " (" << scan.size() << " points)\n";
  if (violations > 0) {
    std::cerr << violations << " samples violate |S| = 1 within 1e-2\n";
    return 1;
  }
  return 0;
}

int run_thresholds(const GlobalConfig& g, double max_alpha, int k_max, double L, double h,
                   double tol) {
  ScanOptions opts;
  opts.L = L;
  opts.h = h;
  opts.workers = g.workers;
  // the Fano loops around threshold angles span ~0.02 rad; the grid must
  // place samples inside them or the 2 pi phase swing aliases away
  const int samples = std::max(16, static_cast<int>(std::ceil(max_alpha / 0.006)));
  const auto scan = scan_phase(linspace(0.0, max_alpha, samples), opts);
  const ThresholdAngles angles = find_threshold_angles(scan, k_max, opts, tol);

  const fs::path dir = prepare_outdir(g);
  json j;
  j["angles"] = angles.angles;
  j["found_all"] = angles.found_all;
  for (size_t i = 0; i < angles.angles.size(); ++i) {
    j["detail"][i]["alpha"] = angles.angles[i];
    j["detail"][i]["bracket"] = angles.brackets[i];
    j["detail"][i]["bisection_steps"] = angles.bisection_steps[i];
  }
  std::ofstream(dir / "thresholds.json") << j.dump(2) << "\n";
  write_manifest(dir, "thresholds",
                 {{"max_alpha", format_g12(max_alpha)},
                  {"k_max", std::to_string(k_max)},
                  {"L", format_g12(L)},
                  {"h", format_g12(h)},
                  {"tol", format_g12(tol)}});
  std::cout << "wrote " << (dir / "thresholds.json").string() << "\n";
  for (double a : angles.angles) std::cout << "  alpha* = " << a << "\n";
  return angles.found_all ? 0 : 1;
}

int run_constants(const GlobalConfig& g, double alpha_star, double L, double h) {
  ScanOptions opts;
  opts.L = L;
  opts.h = h;
  const ModelConstants b = constant_B(alpha_star, opts);
  const ModelConstants d = constant_D(L, h, opts);

  const fs::path dir = prepare_outdir(g);
  json j;
  j["alpha_star"] = alpha_star;
  j["B"] = b.B;
  j["B_rellich"] = b.B_rellich;
  j["B_rel_diff"] = std::abs(b.B - b.B_rellich) / b.B;
  j["imag_residual"] = b.imag_residual;
  j["D"] = d.D;
  j["D_lower_bound"] = d.D_lower_bound;
  std::ofstream(dir / "constants.json") << j.dump(2) << "\n";
  write_manifest(dir, "constants",
                 {{"alpha_star", format_g12(alpha_star)}, {"L", format_g12(L)},
                  {"h", format_g12(h)}});
  std::cout << "B = " << b.B << ", B_rellich = " << b.B_rellich << ", D = " << d.D << "\n";
  const bool ok = b.B > 0 && b.B_rellich > 0 && d.D > 0 && d.D >= d.D_lower_bound &&
                  std::abs(b.B - b.B_rellich) / b.B < 1e-2;
  if (!ok) std::cerr << "constants invariant violated\n";
  return ok ? 0 : 1;
}

int run_model1d(const GlobalConfig& g, const std::string& variant, double two_b, double two_d,
                std::vector<double> tau_range, int samples, int count) {
  const RobinVariant var = variant == "zero" ? RobinVariant::ZeroAngle : RobinVariant::ThresholdK;
  const double bd = var == RobinVariant::ThresholdK ? two_b / 2.0 : two_d / 2.0;

  const fs::path dir = prepare_outdir(g);
  CsvTable t;
  t.header = {"tau"};
  for (int q = 1; q <= count; ++q) t.header.push_back("eta_" + std::to_string(q));
  for (double tau : linspace(tau_range[0], tau_range[1], samples)) {
    const ModelSpectrum spec = dispersion_eigenvalues({var, tau, bd}, count);
    std::vector<double> row = {tau};
    row.insert(row.end(), spec.etas.begin(), spec.etas.end());
    t.rows.push_back(row);
  }
  write_csv(dir / "model1d.csv", t);
  write_manifest(dir, "model1d",
                 {{"variant", variant},
                  {"two_b", format_g12(two_b)},
                  {"two_d", format_g12(two_d)},
                  {"tau_min", format_g12(tau_range[0])},
                  {"tau_max", format_g12(tau_range[1])},
                  {"samples", std::to_string(samples)},
                  {"count", std::to_string(count)}});
  std::cout << "wrote " << (dir / "model1d.csv").string() << "\n";
  return 0;
}

json comparison_to_json(const AsymptoticComparison& cmp) {
  json j;
  j["regime"] = to_string(cmp.regime);
  j["alpha"] = cmp.alpha;
  j["index"] = cmp.index;
  j["fitted_rate"] = cmp.fitted_rate;
  if (!cmp.note.empty()) j["note"] = cmp.note;
  for (size_t i = 0; i < cmp.records.size(); ++i) {
    const auto& r = cmp.records[i];
    j["records"][i] = {{"eps", r.eps},
                       {"tau", r.tau},
                       {"computed", r.computed},
                       {"predicted", r.predicted},
                       {"residual", r.residual}};
  }
  return j;
}

int run_verify(const GlobalConfig& g, const std::string& regime, double alpha, double alpha_star,
               int q, std::vector<double> eps_list, std::vector<double> tau_list, double B,
               double D, double L) {
  AsymptoticComparison cmp;
  if (regime == "discrete") {
    const NearFieldSpectrum nf = near_field_discrete_spectrum({alpha, L}, 0.05, 4);
    if (nf.mu.empty()) {
      std::cerr << "no discrete near-field spectrum at alpha = " << alpha << "\n";
      return 1;
    }
    cmp = verify_thm1_discrete(alpha, eps_list, q, nf.mu[std::min<size_t>(q - 1, nf.mu.size() - 1)]);
  } else if (regime == "generic") {
    const NearFieldSpectrum nf = near_field_discrete_spectrum({alpha, L}, 0.05, 4);
    cmp = verify_thm1_generic(alpha, eps_list, q, nf.n_below, {});
  } else if (regime == "threshold") {
    const NearFieldSpectrum nf = near_field_discrete_spectrum({alpha_star, L}, 0.05, 4);
    cmp = verify_thm1_threshold(alpha_star, eps_list, q, nf.n_below);
  } else if (regime == "model-k") {
    const NearFieldSpectrum nf = near_field_discrete_spectrum({alpha_star, L}, 0.05, 4);
    cmp = verify_model_K(alpha_star, B, nf.n_below, tau_list, eps_list);
  } else if (regime == "model-zero") {
    cmp = verify_model_zero(D, tau_list, eps_list);
  } else {
    throw CLI::ValidationError("--regime", "unknown regime " + regime);
  }

  const fs::path dir = prepare_outdir(g);
  std::ofstream(dir / "verify.json") << comparison_to_json(cmp).dump(2) << "\n";
  write_manifest(dir, "verify",
                 {{"regime", regime},
                  {"alpha", format_g12(alpha)},
                  {"alpha_star", format_g12(alpha_star)},
                  {"q", std::to_string(q)}});
  std::cout << "wrote " << (dir / "verify.json").string() << " (fitted rate " << cmp.fitted_rate
            << ")\n";
  return 0;
}

int run_broken(const GlobalConfig& g, double eps, double alpha, int count) {
  const auto spectrum = broken_strip_spectrum(eps, alpha, count);
  const fs::path dir = prepare_outdir(g);
  CsvTable t;
  t.header = {"k", "lambda", "symmetric"};
  for (size_t i = 0; i < spectrum.size(); ++i)
    t.rows.push_back({double(i + 1), spectrum[i].value,
                      spectrum[i].parity == Parity::Symmetric ? 1.0 : 0.0});
  write_csv(dir / "broken.csv", t);
  write_manifest(dir, "broken",
                 {{"eps", format_g12(eps)}, {"alpha", format_g12(alpha)},
                  {"count", std::to_string(count)}});
  std::cout << "wrote " << (dir / "broken.csv").string() << "\n";
  return 0;
}

int run_mesh_dump(const GlobalConfig& g, const std::string& domain, double eps, double alpha,
                  double L, double h, int order, bool coo) {
  Mesh mesh;
  if (domain == "trapezoid")
    mesh = build_trapezoid_mesh({eps, alpha}, h, {}, parse_order(order));
  else if (domain == "halfstrip")
    mesh = build_halfstrip_mesh({alpha, L}, h, {}, parse_order(order));
  else
    throw CLI::ValidationError("--domain", "expected trapezoid or halfstrip");

  const fs::path dir = prepare_outdir(g);
  std::ofstream os(dir / "mesh.txt");
  write_mesh_text(os, mesh);
  if (coo) {
    std::ofstream ks(dir / "stiffness.coo");
    export_coo(ks, assemble_stiffness(mesh));
    std::ofstream ms(dir / "mass.coo");
    export_coo(ms, assemble_mass(mesh));
  }
  write_manifest(dir, "mesh-dump",
                 {{"domain", domain},
                  {"eps", format_g12(eps)},
                  {"alpha", format_g12(alpha)},
                  {"L", format_g12(L)},
                  {"h", format_g12(h)},
                  {"order", std::to_string(order)}},
                 {{"dofs", std::to_string(mesh.n_dofs())},
                  {"triangles", std::to_string(mesh.n_triangles())}});
  std::cout << "wrote " << (dir / "mesh.txt").string() << " (" << mesh.n_dofs() << " dofs)\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral laboratory for thin broken quantum strips"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Read options from a config file");

  GlobalConfig g;
  app.add_option("--out", g.out, "Output directory")->envname("STRIPS_OUT");
  app.add_option("--workers", g.workers, "Concurrent scan jobs");

  // spectrum
  double eps = 0.02, alpha = 0.0, h = 0.0, L = 8.0;
  int count = 5, order = 2;
  std::string gamma_bc = "neumann";
  bool dump_modes = false;
  auto* spectrum = app.add_subcommand("spectrum", "Trapezoid eigenvalues");
  spectrum->add_option("--eps", eps, "Strip thickness")->required();
  spectrum->add_option("--alpha", alpha, "Tip angle (radians)")->required();
  spectrum->add_option("--count", count, "Number of eigenvalues");
  spectrum->add_option("--h", h, "Target mesh size (default eps/6)");
  spectrum->add_option("--order", order, "Element order (1 or 2)");
  spectrum->add_option("--gamma-bc", gamma_bc, "neumann|dirichlet on the slanted side")
      ->check(CLI::IsMember({"neumann", "dirichlet"}));
  spectrum->add_flag("--dump-eigenfunctions", dump_modes, "Write nodal eigenfunctions");

  // scan
  double a0 = 0.0, a1 = 0.45 * kPi, scan_h = 0.1;
  int samples = 50;
  auto* scan = app.add_subcommand("scan", "Scattering coefficient sweep");
  scan->add_option("--alpha-min", a0, "Scan start");
  scan->add_option("--alpha-max", a1, "Scan end");
  scan->add_option("--samples", samples, "Grid points");
  scan->add_option("--L", L, "Truncation abscissa");
  scan->add_option("--h", scan_h, "Target mesh size");

  // thresholds
  double max_alpha = 1.5, th_tol = 1e-3, th_h = 0.1;
  int k_max = 1;
  auto* thresholds = app.add_subcommand("thresholds", "Threshold angles alpha*_k");
  thresholds->add_option("--max-alpha", max_alpha, "Scan range end");
  thresholds->add_option("--k-max", k_max, "Positive crossings to locate");
  thresholds->add_option("--L", L, "Truncation abscissa");
  thresholds->add_option("--h", th_h, "Target mesh size");
  thresholds->add_option("--tol", th_tol, "Bisection tolerance on alpha");

  // constants
  double alpha_star = 1.321, c_h = 0.05;
  auto* constants = app.add_subcommand("constants", "Model constants B and D");
  constants->add_option("--alpha-star", alpha_star, "Verified threshold angle");
  constants->add_option("--L", L, "Truncation abscissa");
  constants->add_option("--h", c_h, "Target mesh size");

  // model1d
  std::string variant = "k";
  double two_b = 1.0, two_d = 1.0;
  std::vector<double> tau_range = {-30.0, 30.0};
  int m_samples = 121, m_count = 5;
  auto* model1d = app.add_subcommand("model1d", "1D Robin model sweeps");
  model1d->add_option("--variant", variant, "k|zero")->check(CLI::IsMember({"k", "zero"}));
  model1d->add_option("--two-b", two_b, "Value of 2B");
  model1d->add_option("--two-d", two_d, "Value of 2D");
  model1d->add_option("--tau-range", tau_range, "Sweep range")->expected(2);
  model1d->add_option("--samples", m_samples, "Sweep points");
  model1d->add_option("--count", m_count, "Eigenvalues per tau");

  // verify
  std::string regime = "generic";
  std::vector<double> eps_list = {0.1, 0.05, 0.025};
  std::vector<double> tau_list = {10.0};
  double vB = 0.5, vD = 0.5, v_alpha = kPi / 4.0, v_alpha_star = 1.321;
  int v_q = 1;
  auto* verify = app.add_subcommand("verify", "Asymptotic regime checks");
  verify->add_option("--regime", regime, "discrete|generic|threshold|model-k|model-zero")
      ->required()
      ->check(CLI::IsMember({"discrete", "generic", "threshold", "model-k", "model-zero"}));
  verify->add_option("--alpha", v_alpha, "Angle for discrete/generic");
  verify->add_option("--alpha-star", v_alpha_star, "Threshold angle");
  verify->add_option("--q", v_q, "Mode index");
  verify->add_option("--eps", eps_list, "Thickness sweep");
  verify->add_option("--tau", tau_list, "Model tau values");
  verify->add_option("--B", vB, "Constant B");
  verify->add_option("--D", vD, "Constant D");
  verify->add_option("--L", L, "Near-field truncation");

  // broken
  double b_eps = 0.02, b_alpha = 0.0;
  int b_count = 5;
  auto* broken = app.add_subcommand("broken", "Broken-strip spectrum by symmetrization");
  broken->add_option("--eps", b_eps, "Strip thickness")->required();
  broken->add_option("--alpha", b_alpha, "Half angle")->required();
  broken->add_option("--count", b_count, "Eigenvalues per parity family");

  // mesh-dump
  std::string domain = "trapezoid";
  double md_eps = 0.02, md_alpha = 0.0, md_h = 0.01;
  int md_order = 2;
  bool md_coo = false;
  auto* mesh_dump = app.add_subcommand("mesh-dump", "Write a mesh in plain text");
  mesh_dump->add_option("--domain", domain, "trapezoid|halfstrip");
  mesh_dump->add_option("--eps", md_eps, "Strip thickness (trapezoid)");
  mesh_dump->add_option("--alpha", md_alpha, "Angle");
  mesh_dump->add_option("--L", L, "Truncation (halfstrip)");
  mesh_dump->add_option("--h", md_h, "Target mesh size");
  mesh_dump->add_option("--order", md_order, "Element order");
  mesh_dump->add_flag("--coo", md_coo, "Also export stiffness/mass in coordinate format");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (spectrum->parsed())
      return run_spectrum(g, eps, alpha, count, h, order, gamma_bc, dump_modes);
    if (scan->parsed()) return run_scan(g, a0, a1, samples, L, scan_h);
    if (thresholds->parsed()) return run_thresholds(g, max_alpha, k_max, L, th_h, th_tol);
    if (constants->parsed()) return run_constants(g, alpha_star, L, c_h);
    if (model1d->parsed())
      return run_model1d(g, variant, two_b, two_d, tau_range, m_samples, m_count);
    if (verify->parsed())
      return run_verify(g, regime, v_alpha, v_alpha_star, v_q, eps_list, tau_list, vB, vD, L);
    if (broken->parsed()) return run_broken(g, b_eps, b_alpha, b_count);
    if (mesh_dump->parsed())
      return run_mesh_dump(g, domain, md_eps, md_alpha, L, md_h, md_order, md_coo);
  } catch (const SolverError& e) {
    std::cerr << "solver failure: " << e.what() << "\n";
    return 3;
  } catch (const CLI::ValidationError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid configuration: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
