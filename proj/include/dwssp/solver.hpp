#pragma once

#include "dwssp/methods.hpp"
#include "dwssp/operators.hpp"

#include <functional>
#include <variant>
#include <vector>

namespace dwssp {

enum class JacobianMode { FdMatvec, AssembledLinear };

struct NewtonSettings {
  double abs_tol = 1e-10;
  double rel_tol = 1e-12;
  int max_newton = 50;
  int krylov_restart = 30;
  double krylov_tol = 1e-4;  // relative inner tolerance (inexact Newton)
  JacobianMode jacobian_mode = JacobianMode::FdMatvec;
};

struct NewtonDiagnostics {
  int iterations = 0;
  std::vector<double> residual_history;
};

class NewtonError : public std::runtime_error {
 public:
  NewtonError(const std::string& msg, NewtonDiagnostics diag)
      : std::runtime_error(msg), diagnostics(std::move(diag)) {}
  NewtonDiagnostics diagnostics;
};

/// Inexact Newton with restarted GMRES inner solves. Directional derivatives
/// are central finite differences with step sqrt(machine epsilon) * (1+|x|).
/// Stops when |residual(x)| <= abs_tol + rel_tol * |residual(guess)|;
/// throws NewtonError with the residual history otherwise.
Eigen::VectorXd newton_krylov_solve(
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& residual,
    Eigen::VectorXd guess, const NewtonSettings& settings,
    NewtonDiagnostics* diag = nullptr);

struct StepContext {
  std::variant<DownwindTableau, DownwindLmm> method;
  SemiDiscretization semi;
  double dt = 0.0;
  NewtonSettings newton;
};

struct StepStats {
  int newton_iterations = 0;
  double residual = 0.0;
};

/// One step of the downwind RK method. Explicit tableaus advance by forward
/// substitution. Implicit stages are solved monolithically: for linear
/// discretizations with JacobianMode::AssembledLinear the stacked
/// (s n) x (s n) system is factored dense, otherwise Newton-GMRES runs on the
/// stacked stage residual with the previous solution replicated as guess.
GridFunction rk_step(const StepContext& ctx, const GridFunction& u,
                     StepStats* stats = nullptr);

struct LmmHistoryEntry {
  Eigen::VectorXd u, Fu, Ftu;
};

/// One step of the downwind multistep method given the k previous states
/// (oldest first) with their operator evaluations.
GridFunction lmm_step(const StepContext& ctx,
                      const std::vector<LmmHistoryEntry>& history,
                      StepStats* stats = nullptr);

struct MonitorRecord {
  int step = 0;
  double t = 0.0;
  double tv = 0.0;
  double maxnorm = 0.0;
  int newton_iters = 0;
  double residual = 0.0;
};

struct MonitorTrace {
  std::vector<MonitorRecord> records;
  void append(const MonitorRecord& rec);
};

struct RunConfig {
  std::variant<DownwindTableau, DownwindLmm> method;
  SemiDiscretization semi;
  double cfl = 1.0;
  double t_end = 1.0;
  NewtonSettings newton;
  double startup_family_r = 8.0;  // multistep startup integrator parameter
};

struct RunResult {
  GridFunction final_state;
  MonitorTrace trace;
};

/// Advance u0 to t_end with dt = cfl * dt_fe, shortening the final step to
/// land on t_end exactly. Multistep methods build their history with the
/// two-stage downwind family at the same dt (parameter
/// max(startup_family_r, cfl)); those startup steps appear in the trace.
/// Linear discretizations reuse one dense factorization across equal steps.
RunResult run(const RunConfig& config, const GridFunction& u0);

}  // namespace dwssp
