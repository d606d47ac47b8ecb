#pragma once

#include "dwssp/solver.hpp"

#include <string>
#include <vector>

namespace dwssp {

enum class Problem { AdvectionSquare, AdvectionSine, Burgers };

struct ExperimentSpec {
  Problem problem = Problem::AdvectionSquare;
  int n = 128;
  double cfl = 8.0;
  double t_end = 1.0;
  std::vector<std::string> methods;
  SpatialScheme spatial = SpatialScheme::FirstOrder;
  double r = 8.0;  // family parameter when a dw-family method is requested
};

/// Initial data on the grid. The square wave is 1 left of x = 1/2 and 0 from
/// x = 1/2 on (a node exactly at 1/2 takes the value 0); the sine problems
/// use sin(2 pi x).
GridFunction initial_data(Problem problem, const PeriodicGrid& grid);

/// Exact or oracle end state. Advection problems shift the initial data by
/// t_end (exact for the periodic unit-speed equation). The Burgers reference
/// is computed on an 8x finer grid with the explicit three-stage third-order
/// method and WENO5 at CFL 0.4, then subsampled onto the requested grid; a
/// numerical reference, supported for 0 < t_end <= 0.16.
GridFunction reference_solution(Problem problem, int n, double t_end);

struct MethodRun {
  std::string method;
  GridFunction solution;
  MonitorTrace trace;
};

/// Advance one named method on the spec's problem and grid.
MethodRun run_single_method(const ExperimentSpec& spec,
                            const std::string& method);

struct SquareWaveResult {
  std::vector<MethodRun> runs;
  GridFunction exact;
};

/// Square-wave advection at t = 1 with dx = 1/n, comparing backward Euler,
/// the trapezoidal method and the downwind family at parameter r. Method
/// runs are independent; jobs > 1 executes them concurrently.
SquareWaveResult run_square_wave(double cfl, int n = 128,
                                 SpatialScheme spatial = SpatialScheme::FirstOrder,
                                 double r = 8.0, double t_end = 1.0,
                                 int jobs = 1);

struct ConvergenceTable {
  std::vector<std::string> methods;
  struct Row {
    int n = 0;
    std::vector<double> error;  // per method, max norm at t = 1
    std::vector<double> order;  // log2(e_prev / e), NaN on the first row
  };
  std::vector<Row> rows;
};

/// WENO5 sine advection errors at t = 1 for the three comparison methods
/// over the given ascending grid sizes.
ConvergenceTable run_convergence_table(double cfl,
                                       const std::vector<int>& sizes);

struct BurgersResult {
  std::vector<MethodRun> runs;       // at the requested cfl
  MethodRun family_alt;              // downwind family at cfl/2
  double cfl = 0.0, cfl_alt = 0.0;
  GridFunction reference;
};

/// WENO5 Burgers runs to t = 0.16 at the given CFL plus the downwind family
/// at half that CFL, with the fine-grid reference. Requires n >= 64.
BurgersResult run_burgers(double cfl, int n, int jobs = 1);

struct DissipationEstimate {
  double diffusive_term = 0.0;         // r * dx^q * dt
  double ratio_vs_second_order = 0.0;  // (r * dx^q * dt) / dt^2
  bool first_order_pollution = false;  // ratio >= 1: accuracy-limiting regime
};

/// Size of the spatial-coupling diffusion term of the downwind family
/// relative to the second-order error term, for a spatial scheme of order q.
DissipationEstimate dissipation_probe(double r, int q, double dx, double dt);

/// Write spec.json, one solution CSV per method, trace CSVs, the reference
/// when present, and table.csv for convergence results into dir (created if
/// needed). Files appear atomically via rename from a staging directory.
void write_square_wave_dir(const std::string& dir, const ExperimentSpec& spec,
                           const SquareWaveResult& result);
void write_convergence_dir(const std::string& dir, const ExperimentSpec& spec,
                           const ConvergenceTable& table);
void write_burgers_dir(const std::string& dir, const ExperimentSpec& spec,
                       const BurgersResult& result);

/// File-name-safe form of a method identifier ("dw-family:8" ->
/// "dw-family-8").
std::string sanitize_method_name(const std::string& method);

std::string spec_to_json(const ExperimentSpec& spec);

}  // namespace dwssp
