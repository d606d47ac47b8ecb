#include "dwssp/ssp.hpp"

#include <cmath>
#include <limits>

namespace dwssp {

namespace {

double ipow(double base, int e) {
  double acc = 1.0;
  for (int i = 0; i < e; ++i) acc *= base;
  return acc;
}

// Variable layout for the representation LP.
struct RepVars {
  int s;
  int n() const { return (s + 1) * (2 * s + 1); }
  int v(int i) const { return i; }
  int p(int i, int j) const { return (s + 1) + i * s + j; }
  int pt(int i, int j) const { return (s + 1) + (s + 1) * s + i * s + j; }
};

ShuOsherRep rep_from_solution(const DownwindTableau& t, double r,
                              const Eigen::VectorXd& x) {
  const RepVars vars{t.s};
  ShuOsherRep rep;
  rep.s = t.s;
  rep.r = r;
  rep.v = VectorXd::Zero(t.s + 1);
  rep.P = MatrixXd::Zero(t.s + 1, t.s);
  rep.Ptilde = MatrixXd::Zero(t.s + 1, t.s);
  auto clean = [](double y) { return std::abs(y) < 1e-12 ? 0.0 : y; };
  for (int i = 0; i <= t.s; ++i) {
    rep.v(i) = clean(x(vars.v(i)));
    for (int j = 0; j < t.s; ++j) {
      rep.P(i, j) = clean(x(vars.p(i, j)));
      rep.Ptilde(i, j) = clean(x(vars.pt(i, j)));
    }
  }
  return rep;
}

}  // namespace

LinearProgram make_rk_feasibility_lp(const DownwindTableau& t, double r) {
  const int s = t.s;
  const RepVars vars{s};
  const int nrows = 2 * s * (s + 1) + (s + 1);
  LinearProgram lp;
  lp.nvars = vars.n();
  lp.Aeq = MatrixXd::Zero(nrows, lp.nvars);
  lp.beq = VectorXd::Zero(nrows);

  // Rows of the extended coefficient arrays: stages stacked over the update.
  MatrixXd Aext(s + 1, s), Atext(s + 1, s);
  Aext << t.A, t.b.transpose();
  Atext << t.Atilde, t.btilde.transpose();

  int row = 0;
  for (int i = 0; i <= s; ++i) {
    for (int j = 0; j < s; ++j) {
      // p_ij + r sum_l (p_il + pt_il) A(l,j) = r Aext(i,j)
      lp.Aeq(row, vars.p(i, j)) += 1.0;
      for (int l = 0; l < s; ++l) {
        lp.Aeq(row, vars.p(i, l)) += r * t.A(l, j);
        lp.Aeq(row, vars.pt(i, l)) += r * t.A(l, j);
      }
      lp.beq(row) = r * Aext(i, j);
      ++row;
      // pt_ij + r sum_l (p_il + pt_il) Atilde(l,j) = r Atext(i,j)
      lp.Aeq(row, vars.pt(i, j)) += 1.0;
      for (int l = 0; l < s; ++l) {
        lp.Aeq(row, vars.p(i, l)) += r * t.Atilde(l, j);
        lp.Aeq(row, vars.pt(i, l)) += r * t.Atilde(l, j);
      }
      lp.beq(row) = r * Atext(i, j);
      ++row;
    }
  }
  for (int i = 0; i <= s; ++i) {
    lp.Aeq(row, vars.v(i)) = 1.0;
    for (int j = 0; j < s; ++j) {
      lp.Aeq(row, vars.p(i, j)) = 1.0;
      lp.Aeq(row, vars.pt(i, j)) = 1.0;
    }
    lp.beq(row) = 1.0;
    ++row;
  }
  return lp;
}

FeasibilityResult rk_feasible_at(const DownwindTableau& t, double r) {
  if (r < 0.0) throw std::domain_error("rk_feasible_at: r >= 0 required");
  const LpSolution sol = lp_feasible(make_rk_feasibility_lp(t, r));
  FeasibilityResult out;
  out.feasible = sol.feasible;
  out.max_violation = sol.max_violation;
  if (sol.feasible) {
    out.certificate = rep_from_solution(t, r, sol.x);
    out.max_violation = std::min(0.0, out.certificate->min_entry());
  }
  return out;
}

double rk_downwind_ssp_coefficient(const DownwindTableau& t, double tol) {
  if (!(tol > 0.0))
    throw std::invalid_argument("rk_downwind_ssp_coefficient: tol > 0 required");
  if (!rk_feasible_at(t, 0.0).feasible)
    throw std::runtime_error(
        "rk_downwind_ssp_coefficient: method infeasible at r = 0");

  double lo = 0.0;
  double hi = -1.0;
  double d = 1.0;
  while (true) {
    if (rk_feasible_at(t, d).feasible) {
      lo = d;
      if (d >= kSspBracketCap)
        throw BracketOverflowError(
            "rk_downwind_ssp_coefficient: feasible at the bracket cap; "
            "coefficient is effectively unbounded");
      d = std::min(2.0 * d, kSspBracketCap);
    } else {
      hi = d;
      break;
    }
  }
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (rk_feasible_at(t, mid).feasible)
      lo = mid;
    else
      hi = mid;
  }
  // Monotonicity spot check below the returned value.
  if (lo > tol) {
    for (double f : {0.25, 0.5, 0.75}) {
      if (!rk_feasible_at(t, f * (lo - tol)).feasible)
        throw std::runtime_error(
            "rk_downwind_ssp_coefficient: feasibility is not monotone below "
            "the bisection result");
    }
  }
  return lo;
}

double lmm_downwind_ssp_coefficient(const DownwindLmm& m) {
  for (int j = 0; j < m.k; ++j) {
    if (m.alpha(j) < 0.0 || m.beta(j) < 0.0 || m.betatilde(j) < 0.0) return 0.0;
  }
  double best = std::numeric_limits<double>::infinity();
  for (int j = 0; j < m.k; ++j) {
    const double denom = m.beta(j) + m.betatilde(j);
    if (denom > 0.0) best = std::min(best, m.alpha(j) / denom);
  }
  return best;
}

namespace {

// LP for fixed r over (delta_0..delta_{k-1}, beta_0..beta_nb, bt_0..bt_nb)
// with nb = k for implicit methods and k-1 for explicit ones. Equalities are
// the order conditions with alpha_j = delta_j + r (beta_j + bt_j).
LinearProgram make_lmm_lp(int k, int p, int nb, double r) {
  LinearProgram lp;
  lp.nvars = k + 2 * (nb + 1);
  const int ib = k;            // beta block offset
  const int ibt = k + nb + 1;  // betatilde block offset
  lp.Aeq = MatrixXd::Zero(p + 1, lp.nvars);
  lp.beq = VectorXd::Zero(p + 1);
  for (int i = 0; i <= p; ++i) {
    for (int j = 0; j < k; ++j) {
      const double ji = ipow(j, i);
      lp.Aeq(i, j) += ji;  // delta_j
      lp.Aeq(i, ib + j) += r * ji;
      lp.Aeq(i, ibt + j) += r * ji;
    }
    if (i > 0) {
      for (int j = 0; j <= nb; ++j) {
        const double w = i * ipow(j, i - 1);
        lp.Aeq(i, ib + j) += w;
        lp.Aeq(i, ibt + j) -= w;
      }
    }
    lp.beq(i) = ipow(k, i);
  }
  return lp;
}

DownwindLmm lmm_from_solution(int k, int nb, double r, const VectorXd& x) {
  DownwindLmm m;
  m.k = k;
  m.alpha = VectorXd::Zero(k);
  m.beta = VectorXd::Zero(k + 1);
  m.betatilde = VectorXd::Zero(k + 1);
  const int ib = k;
  const int ibt = k + nb + 1;
  for (int j = 0; j <= nb; ++j) {
    m.beta(j) = x(ib + j);
    m.betatilde(j) = x(ibt + j);
  }
  for (int j = 0; j < k; ++j)
    m.alpha(j) = x(j) + r * (m.beta(j) + m.betatilde(j));
  // Remove the common part of each pair; the order conditions depend only on
  // the difference and the ratios alpha/(beta+betatilde) can only grow.
  for (int j = 0; j <= k; ++j) {
    const double common = std::min(m.beta(j), m.betatilde(j));
    m.beta(j) -= common;
    m.betatilde(j) -= common;
  }
  auto snap = [](VectorXd& v) {
    for (long i = 0; i < v.size(); ++i)
      if (std::abs(v(i)) < 1e-12) v(i) = 0.0;
  };
  snap(m.alpha);
  snap(m.beta);
  snap(m.betatilde);
  return m;
}

}  // namespace

std::pair<DownwindLmm, double> optimal_lmm(int k, int p, bool implicit,
                                           double tol) {
  if (k < 1) throw std::invalid_argument("optimal_lmm: k >= 1 required");
  if (p < 0) throw std::invalid_argument("optimal_lmm: p >= 0 required");
  if (!(tol > 0.0)) throw std::invalid_argument("optimal_lmm: tol > 0 required");
  const int pmax = implicit ? k + 1 : k;
  if (p > pmax)
    throw std::invalid_argument(
        "optimal_lmm: order p exceeds what k steps support");
  const int nb = implicit ? k : k - 1;

  auto feasible_at = [&](double r) {
    return lp_feasible(make_lmm_lp(k, p, nb, r));
  };

  if (!feasible_at(0.0).feasible)
    throw std::runtime_error(
        "optimal_lmm: no consistent method for the requested order");

  double lo = 0.0;
  double hi = -1.0;
  double d = 1.0;
  bool unbounded = false;
  while (true) {
    if (feasible_at(d).feasible) {
      lo = d;
      if (d >= kSspBracketCap) {
        unbounded = true;
        break;
      }
      d = std::min(2.0 * d, kSspBracketCap);
    } else {
      hi = d;
      break;
    }
  }
  if (!unbounded) {
    while (hi - lo > tol) {
      const double mid = 0.5 * (lo + hi);
      if (feasible_at(mid).feasible)
        lo = mid;
      else
        hi = mid;
    }
  }

  // Extract a method at the optimum. Ties are broken by minimizing the
  // downwind weight sum. Right at the feasibility boundary the LP tolerance
  // can leave coefficient junk at the 1e-9 level, so step the extraction
  // parameter down until the recovered method is exactly nonnegative with
  // clean order residuals, and report that method's own coefficient.
  double margin = 0.0;
  for (int attempt = 0; attempt < 10; ++attempt) {
    const double re = lo - margin;
    LinearProgram lp = make_lmm_lp(k, p, nb, re);
    lp.objective = VectorXd::Zero(lp.nvars);
    for (int j = 0; j <= nb; ++j) lp.objective(k + nb + 1 + j) = 1.0;
    const LpSolution sol = lp_minimize(lp);
    if (sol.feasible) {
      const DownwindLmm m = lmm_from_solution(k, nb, re, sol.x);
      const bool nonneg = m.alpha.minCoeff() >= 0.0 &&
                          m.beta.minCoeff() >= 0.0 &&
                          m.betatilde.minCoeff() >= 0.0;
      const double res = lmm_order_residuals(m, p).cwiseAbs().maxCoeff();
      const double direct = lmm_downwind_ssp_coefficient(m);
      if (nonneg && res <= 1e-9 && direct >= re - tol) {
        if (unbounded) return {m, kSspBracketCap};
        return {m, std::min(direct, lo)};
      }
    }
    margin = (margin == 0.0) ? tol : 4.0 * margin;
    if (lo - margin <= 0.0) break;
  }
  throw std::runtime_error("optimal_lmm: could not extract a clean method");
}

GammaExpansion amplification_gamma(const ShuOsherRep& rep) {
  if (!rep.is_explicit())
    throw NotExplicitError(
        "amplification_gamma: representation is not explicit");
  const int s = rep.s;
  // stage_poly[i](j, l): coefficient of w^{j-l} wt^l in y_i.
  std::vector<MatrixXd> stage_poly(s + 1, MatrixXd::Zero(s + 1, s + 1));
  auto accumulate = [&](MatrixXd& dst, int i) {
    // dst += v_i + sum_{j<i} p_ij * w * y_j + pt_ij * wt * y_j
    dst(0, 0) += rep.v(i);
    for (int j = 0; j < std::min(i, s); ++j) {
      const double pj = rep.P(i, j);
      const double ptj = rep.Ptilde(i, j);
      if (pj == 0.0 && ptj == 0.0) continue;
      const MatrixXd& y = stage_poly[j];
      for (int a = 0; a < s; ++a) {
        for (int l = 0; l <= a; ++l) {
          const double g = y(a, l);
          if (g == 0.0) continue;
          if (pj != 0.0) dst(a + 1, l) += pj * g;       // multiply by w
          if (ptj != 0.0) dst(a + 1, l + 1) += ptj * g; // multiply by wt
        }
      }
    }
  };
  for (int i = 0; i < s; ++i) accumulate(stage_poly[i], i);
  GammaExpansion out;
  out.s = s;
  out.r = rep.r;
  out.gamma = MatrixXd::Zero(s + 1, s + 1);
  accumulate(out.gamma, s);
  return out;
}

double verify_stage_bound(const GammaExpansion& g) {
  if (g.gamma.minCoeff() < -1e-12)
    throw NegativeGammaError("verify_stage_bound: negative gamma coefficient");
  double acc = 0.0;
  for (int j = 0; j <= g.s; ++j)
    for (int l = 0; l <= j; ++l) acc += g.gamma(j, l) * (j - 2 * l);
  return acc;
}

}  // namespace dwssp
