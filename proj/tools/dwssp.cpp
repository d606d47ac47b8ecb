// Command-line front end: method analysis, certification, multistep
// optimization and the advection/Burgers experiment reproductions.
//
// Exit codes: 0 success, 2 validation error, 3 solver failure, 4 I/O error.

#include <CLI11.hpp>

#include "dwssp/experiments.hpp"
#include "dwssp/io.hpp"
#include "dwssp/methods.hpp"
#include "dwssp/solver.hpp"
#include "dwssp/ssp.hpp"

#include <cmath>
#include <complex>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

namespace {

using namespace dwssp;

bool g_verbose = false;

void note(const std::string& msg) {
  if (g_verbose) std::cerr << "[dwssp] " << msg << "\n";
}

// A method argument is either a built-in name or a path to a JSON document.
io::MethodVariant resolve_method(const std::string& spec) {
  if (spec.size() > 5 && spec.substr(spec.size() - 5) == ".json")
    return io::load_method_file(spec);
  if (std::filesystem::exists(spec)) return io::load_method_file(spec);
  return tableau_by_name(spec);
}

std::optional<double> family_parameter(const std::string& spec) {
  const std::string prefix = "dw-family:";
  if (spec.rfind(prefix, 0) != 0) return std::nullopt;
  return std::stod(spec.substr(prefix.size()));
}

int cmd_analyze(const std::string& method_spec) {
  const io::MethodVariant method = resolve_method(method_spec);
  if (const auto* m = std::get_if<DownwindLmm>(&method)) {
    std::cout << "method: " << method_spec << " (multistep, k=" << m->k
              << ")\n";
    std::cout << "classification: "
              << (m->is_explicit() ? "explicit" : "implicit") << "\n";
    const VectorXd res = lmm_order_residuals(*m, 3);
    int order = -1;
    for (int i = 0; i <= 3 && std::abs(res(i)) <= 1e-10; ++i) order = i;
    std::cout << "order residuals (i=0..3):";
    for (long i = 0; i < res.size(); ++i) std::cout << ' ' << io::fmt17(res(i));
    std::cout << "\nobserved order: " << order << "\n";
    return 0;
  }

  const DownwindTableau& t = std::get<DownwindTableau>(method);
  std::cout << "method: " << method_spec << " (Runge-Kutta, s=" << t.s << ")\n";
  std::cout << "classification: "
            << (t.is_explicit() ? "explicit" : "implicit") << "\n";

  const VectorXd res = rk_order_residuals(t, 3);
  std::cout << "order residuals (conditions through order 3):";
  for (long i = 0; i < res.size(); ++i) std::cout << ' ' << io::fmt17(res(i));
  int order = 0;
  if (std::abs(res(0)) <= 1e-10) order = 1;
  if (order == 1 && std::abs(res(1)) <= 1e-10) order = 2;
  if (order == 2 && std::abs(res(2)) <= 1e-10 && std::abs(res(3)) <= 1e-10)
    order = 3;
  std::cout << "\nobserved order: " << order << "\n";

  const RationalStabilityFunction f = stability_function(t);
  std::cout << "stability numerator:";
  for (long i = 0; i < f.num.size(); ++i) std::cout << ' ' << io::fmt17(f.num(i));
  std::cout << "\nstability denominator:";
  for (long i = 0; i < f.den.size(); ++i) std::cout << ' ' << io::fmt17(f.den(i));
  std::cout << "\n|psi(inf)|: " << io::fmt17(psi_infinity_magnitude(f)) << "\n";

  double worst = 0.0;
  const int samples = 100000;
  for (int i = 0; i < samples; ++i) {
    const double y = -1e4 + 2e4 * (static_cast<double>(i) / (samples - 1));
    worst = std::max(worst, std::abs(evaluate_psi(f, {0.0, y})));
  }
  std::cout << "imaginary-axis sample max |psi|: " << io::fmt17(worst) << "\n";
  std::cout << "A-stable (sampled): " << (worst <= 1.0 + 1e-10 ? "yes" : "no")
            << "\n";
  return 0;
}

int cmd_certify(const std::string& method_spec, double tol,
                const std::string& out_path) {
  const io::MethodVariant method = resolve_method(method_spec);
  std::string report;
  if (const auto* m = std::get_if<DownwindLmm>(&method)) {
    const double ct = lmm_downwind_ssp_coefficient(*m);
    const bool unbounded = std::isinf(ct);
    report = io::certification_report_json(method_spec, ct, true, nullptr, ct,
                                           unbounded, tol);
  } else {
    const DownwindTableau& t = std::get<DownwindTableau>(method);
    bool unbounded = false;
    double ct = 0.0;
    try {
      ct = rk_downwind_ssp_coefficient(t, tol);
    } catch (const BracketOverflowError&) {
      unbounded = true;
      ct = kSspBracketCap;
    }
    const double r_query = unbounded ? kSspBracketCap : std::max(0.0, ct - tol);
    note("certified parameter " + io::fmt17(ct) +
         ", extracting certificate at " + io::fmt17(r_query));
    const FeasibilityResult res = rk_feasible_at(t, r_query);
    const ShuOsherRep* cert =
        res.certificate.has_value() ? &*res.certificate : nullptr;
    report = io::certification_report_json(method_spec, r_query, res.feasible,
                                           cert, ct, unbounded, tol);
    if (const auto r = family_parameter(method_spec)) {
      if (!unbounded && std::abs(*r - ct) > 100 * tol + 1e-9)
        std::cerr << "warning: certified parameter " << io::fmt17(ct)
                  << " differs from the family parameter " << io::fmt17(*r)
                  << "\n";
    }
  }
  if (out_path.empty()) {
    std::cout << report << "\n";
  } else {
    std::ofstream out(out_path);
    if (!out) throw io::IoError("cannot open '" + out_path + "' for writing");
    out << report << "\n";
  }
  return 0;
}

int cmd_optimal_lmm(int k, int p, bool explicit_method, double tol) {
  const auto [m, ct] = optimal_lmm(k, p, !explicit_method, tol);
  std::cout << io::lmm_to_json(m) << "\n";
  if (ct >= kSspBracketCap)
    std::cout << "Ctilde: unbounded (bracket cap " << io::fmt17(kSspBracketCap)
              << ")\n";
  else
    std::cout << "Ctilde: " << io::fmt17(ct) << "\n";
  return 0;
}

SpatialScheme parse_spatial(const std::string& s) {
  if (s == "first") return SpatialScheme::FirstOrder;
  if (s == "weno5") return SpatialScheme::Weno5;
  throw std::invalid_argument("--spatial must be 'first' or 'weno5'");
}

int cmd_advect(double cfl, int n, double t_end, const std::string& spatial,
               double r, const std::string& out, int jobs) {
  const SpatialScheme scheme = parse_spatial(spatial);
  note("running square-wave advection, cfl=" + io::fmt17(cfl));
  const SquareWaveResult result =
      run_square_wave(cfl, n, scheme, r, t_end, jobs);
  ExperimentSpec spec;
  spec.problem = Problem::AdvectionSquare;
  spec.n = n;
  spec.cfl = cfl;
  spec.t_end = t_end;
  spec.spatial = scheme;
  spec.r = r;
  for (const MethodRun& mr : result.runs) spec.methods.push_back(mr.method);
  write_square_wave_dir(out, spec, result);
  note("wrote " + out);
  return 0;
}

int cmd_converge(double cfl, const std::vector<int>& sizes,
                 const std::string& out) {
  note("running convergence sweep");
  const ConvergenceTable table = run_convergence_table(cfl, sizes);
  ExperimentSpec spec;
  spec.problem = Problem::AdvectionSine;
  spec.n = sizes.empty() ? 0 : sizes.back();
  spec.cfl = cfl;
  spec.t_end = 1.0;
  spec.spatial = SpatialScheme::Weno5;
  spec.methods = table.methods;
  write_convergence_dir(out, spec, table);
  note("wrote " + out);
  return 0;
}

int cmd_burgers(double cfl, int n, const std::string& out, int jobs) {
  note("running Burgers comparison, cfl=" + io::fmt17(cfl));
  const BurgersResult result = run_burgers(cfl, n, jobs);
  ExperimentSpec spec;
  spec.problem = Problem::Burgers;
  spec.n = n;
  spec.cfl = cfl;
  spec.t_end = 0.16;
  spec.spatial = SpatialScheme::Weno5;
  for (const MethodRun& mr : result.runs) spec.methods.push_back(mr.method);
  write_burgers_dir(out, spec, result);
  note("wrote " + out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Strong-stability-preserving time integration with paired "
               "upwind/downwind spatial operators"};
  app.require_subcommand(1);
  app.add_flag("-v,--verbose", g_verbose, "progress notes on stderr");

  std::string method_spec;
  double tol = 1e-8;
  std::string out_path;

  CLI::App* analyze = app.add_subcommand(
      "analyze", "order, stability function and classification of a method");
  analyze->add_option("method", method_spec, "built-in name or JSON file")
      ->required();

  CLI::App* certify = app.add_subcommand(
      "certify", "certified step-size coefficient with certificate");
  certify->add_option("method", method_spec, "built-in name or JSON file")
      ->required();
  certify->add_option("--tol", tol, "bisection tolerance")
      ->check(CLI::PositiveNumber);
  certify->add_option("--out", out_path, "write the JSON report here");

  int k = 1, p = 1;
  bool explicit_method = false;
  CLI::App* opt = app.add_subcommand(
      "optimal-lmm", "best k-step multistep method of order p");
  opt->add_option("--k", k, "step count")->required()->check(CLI::PositiveNumber);
  opt->add_option("--p", p, "order")->required()
      ->check(CLI::NonNegativeNumber);
  opt->add_flag("--explicit", explicit_method, "restrict to explicit methods");
  opt->add_option("--tol", tol, "bisection tolerance")
      ->check(CLI::PositiveNumber);

  double cfl = 8.0, t_end = 1.0, r = 8.0;
  int n = 128, jobs = 1;
  std::string spatial = "first";
  std::string out_dir = "dwssp-out";
  std::vector<int> sizes = {32, 64, 128, 256};

  CLI::App* advect = app.add_subcommand(
      "advect", "square-wave advection comparison at t = 1");
  advect->add_option("--cfl", cfl, "time step in units of the Euler bound")
      ->check(CLI::PositiveNumber);
  advect->add_option("--n", n, "grid cells")->check(CLI::Range(2, 1 << 20));
  advect->add_option("--t-end", t_end, "final time")
      ->check(CLI::PositiveNumber);
  advect->add_option("--spatial", spatial, "first | weno5");
  advect->add_option("--r", r, "family parameter");
  advect->add_option("--out", out_dir, "output directory");
  advect->add_option("--jobs", jobs, "concurrent method runs")
      ->check(CLI::PositiveNumber);

  CLI::App* converge =
      app.add_subcommand("converge", "WENO5 sine advection error table");
  converge->add_option("--cfl", cfl, "time step in units of the Euler bound")
      ->check(CLI::PositiveNumber);
  converge->add_option("--sizes", sizes, "ascending grid sizes")
      ->delimiter(',');
  converge->add_option("--out", out_dir, "output directory");

  CLI::App* burgers =
      app.add_subcommand("burgers", "Burgers shock comparison at t = 0.16");
  burgers->add_option("--cfl", cfl, "time step in units of the Euler bound")
      ->check(CLI::PositiveNumber);
  burgers->add_option("--n", n, "grid cells")->check(CLI::Range(64, 1 << 20));
  burgers->add_option("--out", out_dir, "output directory");
  burgers->add_option("--jobs", jobs, "concurrent method runs")
      ->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (app.got_subcommand(analyze)) return cmd_analyze(method_spec);
    if (app.got_subcommand(certify))
      return cmd_certify(method_spec, tol, out_path);
    if (app.got_subcommand(opt))
      return cmd_optimal_lmm(k, p, explicit_method, tol);
    if (app.got_subcommand(advect))
      return cmd_advect(cfl, n, t_end, spatial, r, out_dir, jobs);
    if (app.got_subcommand(converge)) return cmd_converge(cfl, sizes, out_dir);
    if (app.got_subcommand(burgers)) return cmd_burgers(cfl, n, out_dir, jobs);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const io::IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return 4;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "solver failure: " << e.what() << "\n";
    return 3;
  }
  return 2;
}
