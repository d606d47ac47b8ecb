#include "dwssp/experiments.hpp"

#include "dwssp/io.hpp"

#include <json.hpp>

#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <mutex>
#include <thread>

namespace dwssp {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kBurgersTimeCap = 0.16;

SemiDiscretization make_semi(Problem problem, SpatialScheme spatial,
                             const PeriodicGrid& grid,
                             const GridFunction& u0) {
  switch (problem) {
    case Problem::AdvectionSquare:
    case Problem::AdvectionSine:
      return spatial == SpatialScheme::FirstOrder ? advection_first_order(grid)
                                                  : advection_weno5(grid);
    case Problem::Burgers: {
      if (spatial != SpatialScheme::Weno5)
        throw std::invalid_argument(
            "experiments: the Burgers problem uses the weno5 scheme");
      const double a = max_norm(u0);
      return burgers_weno5(grid, a > 0.0 ? a : 1.0);
    }
  }
  throw std::logic_error("unreachable");
}

double wrap_unit(double x) {
  double y = std::fmod(x, 1.0);
  if (y < 0.0) y += 1.0;
  return y;
}

}  // namespace

GridFunction initial_data(Problem problem, const PeriodicGrid& grid) {
  GridFunction u = GridFunction::zero(grid);
  for (int i = 0; i < grid.n; ++i) {
    const double x = grid.node(i);
    switch (problem) {
      case Problem::AdvectionSquare:
        u.values(i) = x < 0.5 ? 1.0 : 0.0;
        break;
      case Problem::AdvectionSine:
      case Problem::Burgers:
        u.values(i) = std::sin(2.0 * kPi * x);
        break;
    }
  }
  return u;
}

GridFunction reference_solution(Problem problem, int n, double t_end) {
  if (!(t_end > 0.0))
    throw std::invalid_argument("reference_solution: t_end > 0 required");
  const PeriodicGrid grid(n);
  switch (problem) {
    case Problem::AdvectionSquare: {
      GridFunction u = GridFunction::zero(grid);
      for (int i = 0; i < grid.n; ++i)
        u.values(i) = wrap_unit(grid.node(i) - t_end) < 0.5 ? 1.0 : 0.0;
      return u;
    }
    case Problem::AdvectionSine: {
      GridFunction u = GridFunction::zero(grid);
      for (int i = 0; i < grid.n; ++i)
        u.values(i) = std::sin(2.0 * kPi * (grid.node(i) - t_end));
      return u;
    }
    case Problem::Burgers: {
      if (t_end > kBurgersTimeCap + 1e-12)
        throw std::invalid_argument(
            "reference_solution: Burgers reference supports t_end <= 0.16");
      const PeriodicGrid fine(8 * n);
      const GridFunction u0 = initial_data(Problem::Burgers, fine);
      RunConfig config;
      config.method = ssprk33();
      config.semi = make_semi(Problem::Burgers, SpatialScheme::Weno5, fine, u0);
      config.cfl = 0.4;
      config.t_end = t_end;
      const RunResult res = run(config, u0);
      GridFunction out = GridFunction::zero(grid);
      for (int i = 0; i < n; ++i) out.values(i) = res.final_state.values(8 * i);
      return out;
    }
  }
  throw std::logic_error("unreachable");
}

MethodRun run_single_method(const ExperimentSpec& spec,
                            const std::string& method) {
  const PeriodicGrid grid(spec.n);
  const GridFunction u0 = initial_data(spec.problem, grid);

  RunConfig config;
  config.method = tableau_by_name(method);
  config.semi = make_semi(spec.problem, spec.spatial, grid, u0);
  config.cfl = spec.cfl;
  config.t_end = spec.t_end;
  if (config.semi.linear) {
    config.newton.jacobian_mode = JacobianMode::AssembledLinear;
  } else {
    // The fully implicit stage systems at large CFL defeat short-restart
    // GMRES; give the inner solver the full stacked dimension.
    const int stages = std::get<DownwindTableau>(config.method).s;
    config.newton.krylov_restart =
        std::max(config.newton.krylov_restart, stages * spec.n);
  }

  RunResult res = run(config, u0);
  return MethodRun{method, std::move(res.final_state), std::move(res.trace)};
}

namespace {

std::vector<std::string> comparison_methods(double r) {
  return {"backward-euler", "trapezoidal", "dw-family:" + io::fmt17(r)};
}

// Runs independent jobs on up to `jobs` threads; rethrows the first failure.
void parallel_tasks(std::vector<std::function<void()>> tasks, int jobs) {
  if (jobs <= 1 || tasks.size() <= 1) {
    for (auto& t : tasks) t();
    return;
  }
  std::atomic<size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&]() {
    while (true) {
      const size_t i = next.fetch_add(1);
      if (i >= tasks.size()) return;
      try {
        tasks[i]();
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  const int nthreads = std::min<int>(jobs, static_cast<int>(tasks.size()));
  pool.reserve(nthreads);
  for (int i = 0; i < nthreads; ++i) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace

SquareWaveResult run_square_wave(double cfl, int n, SpatialScheme spatial,
                                 double r, double t_end, int jobs) {
  if (!(cfl > 0.0)) throw std::invalid_argument("run_square_wave: cfl > 0");
  ExperimentSpec spec;
  spec.problem = Problem::AdvectionSquare;
  spec.n = n;
  spec.cfl = cfl;
  spec.t_end = t_end;
  spec.spatial = spatial;
  spec.r = r;
  spec.methods = comparison_methods(spec.r);

  SquareWaveResult out;
  out.runs.resize(spec.methods.size());
  std::vector<std::function<void()>> tasks;
  for (size_t i = 0; i < spec.methods.size(); ++i)
    tasks.push_back(
        [&, i] { out.runs[i] = run_single_method(spec, spec.methods[i]); });
  parallel_tasks(std::move(tasks), jobs);
  out.exact = reference_solution(spec.problem, spec.n, spec.t_end);
  return out;
}

ConvergenceTable run_convergence_table(double cfl,
                                       const std::vector<int>& sizes) {
  for (size_t i = 1; i < sizes.size(); ++i)
    if (sizes[i] <= sizes[i - 1])
      throw std::invalid_argument("run_convergence_table: sizes must ascend");

  ConvergenceTable table;
  table.methods = comparison_methods(8.0);
  for (size_t row = 0; row < sizes.size(); ++row) {
    ExperimentSpec spec;
    spec.problem = Problem::AdvectionSine;
    spec.n = sizes[row];
    spec.cfl = cfl;
    spec.t_end = 1.0;
    spec.spatial = SpatialScheme::Weno5;

    ConvergenceTable::Row r;
    r.n = spec.n;
    const GridFunction exact =
        reference_solution(spec.problem, spec.n, spec.t_end);
    for (size_t m = 0; m < table.methods.size(); ++m) {
      const MethodRun mr = run_single_method(spec, table.methods[m]);
      const double err =
          max_norm(GridFunction(mr.solution.grid,
                                mr.solution.values - exact.values));
      r.error.push_back(err);
      if (row == 0) {
        r.order.push_back(std::numeric_limits<double>::quiet_NaN());
      } else {
        r.order.push_back(std::log2(table.rows[row - 1].error[m] / err));
      }
    }
    table.rows.push_back(std::move(r));
  }
  return table;
}

BurgersResult run_burgers(double cfl, int n, int jobs) {
  if (n < 64) throw std::invalid_argument("run_burgers: n >= 64 required");
  if (!(cfl > 0.0)) throw std::invalid_argument("run_burgers: cfl > 0");

  ExperimentSpec spec;
  spec.problem = Problem::Burgers;
  spec.n = n;
  spec.cfl = cfl;
  spec.t_end = kBurgersTimeCap;
  spec.spatial = SpatialScheme::Weno5;
  spec.methods = comparison_methods(spec.r);

  BurgersResult out;
  out.cfl = cfl;
  out.cfl_alt = 0.5 * cfl;
  out.runs.resize(spec.methods.size());

  std::vector<std::function<void()>> tasks;
  for (size_t i = 0; i < spec.methods.size(); ++i)
    tasks.push_back(
        [&, i] { out.runs[i] = run_single_method(spec, spec.methods[i]); });
  tasks.push_back([&] {
    ExperimentSpec alt = spec;
    alt.cfl = out.cfl_alt;
    out.family_alt = run_single_method(alt, spec.methods.back());
  });
  tasks.push_back([&] {
    out.reference = reference_solution(Problem::Burgers, n, spec.t_end);
  });
  parallel_tasks(std::move(tasks), jobs);
  return out;
}

DissipationEstimate dissipation_probe(double r, int q, double dx, double dt) {
  if (!(r > 0.0) || q < 1 || !(dx > 0.0) || !(dt > 0.0))
    throw std::invalid_argument("dissipation_probe: positive inputs required");
  DissipationEstimate est;
  est.diffusive_term = r * std::pow(dx, q) * dt;
  est.ratio_vs_second_order = est.diffusive_term / (dt * dt);
  est.first_order_pollution = est.ratio_vs_second_order >= 1.0;
  return est;
}

std::string sanitize_method_name(const std::string& method) {
  std::string out = method;
  for (char& ch : out)
    if (ch == ':' || ch == '/' || ch == ' ') ch = '-';
  return out;
}

std::string spec_to_json(const ExperimentSpec& spec) {
  nlohmann::json j;
  switch (spec.problem) {
    case Problem::AdvectionSquare: j["problem"] = "advection-square"; break;
    case Problem::AdvectionSine: j["problem"] = "advection-sine"; break;
    case Problem::Burgers: j["problem"] = "burgers"; break;
  }
  j["n"] = spec.n;
  j["cfl"] = spec.cfl;
  j["t_end"] = spec.t_end;
  j["methods"] = spec.methods;
  j["spatial"] = spec.spatial == SpatialScheme::FirstOrder ? "first-order"
                                                           : "weno5";
  j["r"] = spec.r;
  return j.dump(2);
}

namespace {

namespace fs = std::filesystem;

// Stage into a sibling directory and rename so partially written outputs
// never appear under the final name.
class StagedDir {
 public:
  explicit StagedDir(const std::string& dir) : final_(dir) {
    staging_ = final_;
    staging_ += ".staging";
    fs::remove_all(staging_);
    fs::create_directories(staging_);
  }
  fs::path path(const std::string& name) const { return staging_ / name; }
  void commit() {
    fs::remove_all(final_);
    if (final_.has_parent_path()) fs::create_directories(final_.parent_path());
    fs::rename(staging_, final_);
  }

 private:
  fs::path final_, staging_;
};

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream out(p);
  if (!out) throw io::IoError("cannot open '" + p.string() + "'");
  out << text;
  if (!text.empty() && text.back() != '\n') out << '\n';
}

void write_runs(const StagedDir& staged, const std::vector<MethodRun>& runs,
                const std::string& suffix = "") {
  for (const MethodRun& mr : runs) {
    const std::string base = sanitize_method_name(mr.method) + suffix;
    io::write_grid_csv_file(staged.path(base + ".csv").string(), mr.solution);
    io::write_trace_csv_file(staged.path(base + "-trace.csv").string(),
                             mr.trace);
  }
}

std::string gnuplot_solution_script(const std::vector<std::string>& files,
                                    const std::string& exact_file,
                                    const std::string& title,
                                    const std::string& xrange) {
  std::string s;
  s += "set datafile separator ','\n";
  s += "set key outside\n";
  s += "set xlabel 'x'\nset ylabel 'u'\n";
  s += "set title '" + title + "'\n";
  if (!xrange.empty()) s += "set xrange [" + xrange + "]\n";
  s += "plot \\\n";
  for (const std::string& f : files)
    s += "  '" + f + "' using 1:2 skip 1 with lines title '" + f + "', \\\n";
  s += "  '" + exact_file + "' using 1:2 skip 1 with lines lw 2 title '" +
       exact_file + "'\n";
  return s;
}

}  // namespace

void write_square_wave_dir(const std::string& dir, const ExperimentSpec& spec,
                           const SquareWaveResult& result) {
  StagedDir staged(dir);
  write_text(staged.path("spec.json"), spec_to_json(spec));
  write_runs(staged, result.runs);
  io::write_grid_csv_file(staged.path("exact.csv").string(), result.exact);
  std::vector<std::string> files;
  for (const MethodRun& mr : result.runs)
    files.push_back(sanitize_method_name(mr.method) + ".csv");
  write_text(staged.path("plot.gp"),
             gnuplot_solution_script(files, "exact.csv",
                                     "square wave advection", ""));
  staged.commit();
}

void write_convergence_dir(const std::string& dir, const ExperimentSpec& spec,
                           const ConvergenceTable& table) {
  StagedDir staged(dir);
  write_text(staged.path("spec.json"), spec_to_json(spec));

  std::string csv = "n";
  for (const std::string& m : table.methods) {
    const std::string base = sanitize_method_name(m);
    csv += "," + base + "_error," + base + "_order";
  }
  csv += "\n";
  for (const auto& row : table.rows) {
    csv += std::to_string(row.n);
    for (size_t m = 0; m < table.methods.size(); ++m) {
      csv += "," + io::fmt17(row.error[m]) + ",";
      if (!std::isnan(row.order[m])) csv += io::fmt17(row.order[m]);
    }
    csv += "\n";
  }
  write_text(staged.path("table.csv"), csv);

  std::string gp;
  gp += "set datafile separator ','\n";
  gp += "set logscale xy\nset xlabel 'n'\nset ylabel 'max error'\n";
  gp += "set title 'sine advection convergence'\n";
  gp += "plot \\\n";
  for (size_t m = 0; m < table.methods.size(); ++m) {
    gp += "  'table.csv' using 1:" + std::to_string(2 * m + 2) +
          " skip 1 with linespoints title '" +
          sanitize_method_name(table.methods[m]) + "'";
    gp += (m + 1 < table.methods.size()) ? ", \\\n" : "\n";
  }
  write_text(staged.path("plot.gp"), gp);
  staged.commit();
}

void write_burgers_dir(const std::string& dir, const ExperimentSpec& spec,
                       const BurgersResult& result) {
  StagedDir staged(dir);
  write_text(staged.path("spec.json"), spec_to_json(spec));
  write_runs(staged, result.runs);
  const std::string alt_base =
      sanitize_method_name(result.family_alt.method) + "-cfl" +
      io::fmt17(result.cfl_alt);
  io::write_grid_csv_file(staged.path(alt_base + ".csv").string(),
                          result.family_alt.solution);
  io::write_trace_csv_file(staged.path(alt_base + "-trace.csv").string(),
                           result.family_alt.trace);
  io::write_grid_csv_file(staged.path("reference.csv").string(),
                          result.reference);

  std::vector<std::string> files;
  for (const MethodRun& mr : result.runs)
    files.push_back(sanitize_method_name(mr.method) + ".csv");
  files.push_back(alt_base + ".csv");
  write_text(staged.path("plot.gp"),
             gnuplot_solution_script(files, "reference.csv",
                                     "Burgers shock closeup", "0.4:0.6"));
  staged.commit();
}

}  // namespace dwssp
