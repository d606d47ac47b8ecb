#pragma once

#include <Eigen/Dense>

#include <stdexcept>

namespace dwssp {

/// Equality-constrained linear program in standard form:
///   find x >= 0 with Aeq x = beq, optionally minimizing objective . x.
/// All decision variables carry the implicit lower bound 0.
struct LinearProgram {
  Eigen::MatrixXd Aeq;
  Eigen::VectorXd beq;
  int nvars = 0;
  Eigen::VectorXd objective;  // empty => feasibility problem only
};

struct LpSolution {
  bool feasible = false;
  Eigen::VectorXd x;          // basic feasible (or optimal) point when feasible
  double max_violation = 0.0; // phase-1 objective remaining when infeasible
  double objective_value = 0.0;
  int pivots = 0;
};

/// Phase-1 simplex on the scaled constraints; feasible iff the minimized
/// artificial objective drops below 1e-9. Dantzig pricing with a switch to
/// Bland's rule after 1e3 pivots; hard stop (exception) at 1e5 pivots.
LpSolution lp_feasible(const LinearProgram& lp);

/// Two-phase simplex: phase-1 feasibility, then minimize lp.objective.
/// Returns feasible=false (no exception) for infeasible programs.
LpSolution lp_minimize(const LinearProgram& lp);

class SimplexCycleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace dwssp
