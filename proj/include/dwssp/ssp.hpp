#pragma once

#include "dwssp/methods.hpp"
#include "dwssp/simplex.hpp"

#include <optional>
#include <utility>

namespace dwssp {

/// Outcome of a nonnegative-representation query at a fixed parameter r.
struct FeasibilityResult {
  bool feasible = false;
  std::optional<ShuOsherRep> certificate;  // present iff feasible
  double max_violation = 0.0;
};

/// Coefficients of the one-step linear amplification map of an explicit
/// representation, expanded over the basis w^{j-l} wt^l with w = 1 + z/r
/// and wt = 1 + zt/r:
///   psi(z, zt) = sum_{0 <= l <= j <= s} gamma(j, l) w^{j-l} wt^l.
struct GammaExpansion {
  int s = 0;
  double r = 0.0;
  MatrixXd gamma;  // (s+1) x (s+1), lower triangular

  double sum() const { return gamma.sum(); }
};

class BracketOverflowError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NotExplicitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NegativeGammaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Cap used when bracketing an unbounded certification parameter; bisection
/// results at or above this value are reported as "effectively unbounded".
inline constexpr double kSspBracketCap = 1e6;

/// Build the representation-matching LP for the tableau at parameter r.
/// Variables are v (s+1), P and Ptilde (row-major, (s+1) x s each); the
/// equalities tie the representation to the Butcher coefficients and force
/// unit row sums.
LinearProgram make_rk_feasibility_lp(const DownwindTableau& t, double r);

/// Nonnegative-representation feasibility of the tableau at parameter r >= 0.
/// Infeasibility is a result, not an error.
FeasibilityResult rk_feasible_at(const DownwindTableau& t, double r);

/// Largest certifiable parameter, located by doubling to an infeasible
/// bracket and bisecting to the given tolerance. Throws BracketOverflowError
/// when feasible at the bracket cap ("effectively unbounded"). Monotonicity
/// of feasibility below the result is spot-checked at three interior points.
double rk_downwind_ssp_coefficient(const DownwindTableau& t, double tol);

/// Closed form min over j <= k-1 of alpha_j / (beta_j + betatilde_j), with
/// 0/0 treated as no constraint (+inf over an empty set). Returns 0 when any
/// alpha_j, beta_j or betatilde_j with j <= k-1 is negative.
double lmm_downwind_ssp_coefficient(const DownwindLmm& m);

/// Best k-step method of order p under the nonnegativity constraints,
/// obtained by bisection over r with an LP feasibility oracle in the
/// variables delta_j = alpha_j - r (beta_j + betatilde_j), beta, betatilde.
/// Ties at the final r are broken by minimizing sum(betatilde); afterwards
/// each (beta_j, betatilde_j) pair is reduced by its common part, which
/// leaves the order residuals unchanged. Returns the method and its
/// certification parameter (kSspBracketCap when effectively unbounded).
std::pair<DownwindLmm, double> optimal_lmm(int k, int p, bool implicit,
                                           double tol);

/// Expand the linear amplification polynomial of an explicit representation.
/// Throws NotExplicitError when the stage rows are not strictly lower
/// triangular.
GammaExpansion amplification_gamma(const ShuOsherRep& rep);

/// sum of gamma(j, l) * (j - 2l); equals the representation parameter r for
/// first-order-accurate representations and is bounded by the stage count.
/// Requires all gamma >= -1e-12 (NegativeGammaError otherwise).
double verify_stage_bound(const GammaExpansion& g);

}  // namespace dwssp
