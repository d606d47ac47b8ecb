#pragma once

// Test-only oracles, kept independent of the library paths they check.

#include "dwssp/methods.hpp"

#include <Eigen/Dense>

#include <random>

namespace dwssp::oracle {

// Certification route that never touches the LP machinery: the candidate
// representation at parameter r is unique whenever I + r(A + Atilde) is
// invertible, so feasibility reduces to building it row by row and checking
// signs. Rows of the extended arrays: stages stacked over (b, btilde).
inline bool closed_form_feasible(const DownwindTableau& t, double r,
                                 double tol = 1e-9) {
  const int s = t.s;
  const Eigen::MatrixXd K = t.A + t.Atilde;
  const Eigen::MatrixXd M = Eigen::MatrixXd::Identity(s, s) + r * K;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(M);
  if (!lu.isInvertible()) return false;
  const Eigen::MatrixXd Minv = lu.inverse();

  Eigen::MatrixXd Aext(s + 1, s), Atext(s + 1, s);
  Aext << t.A, t.b.transpose();
  Atext << t.Atilde, t.btilde.transpose();

  for (int i = 0; i <= s; ++i) {
    const Eigen::RowVectorXd m =
        r * (Aext.row(i) + Atext.row(i)) * Minv;
    const Eigen::RowVectorXd p = r * Aext.row(i) - r * m * t.A;
    const Eigen::RowVectorXd pt = r * Atext.row(i) - r * m * t.Atilde;
    const double v = 1.0 - m.sum();
    if (v < -tol || p.minCoeff() < -tol || pt.minCoeff() < -tol) return false;
  }
  return true;
}

inline double closed_form_ctilde(const DownwindTableau& t, double tol = 1e-10,
                                 double cap = 1e6) {
  double lo = 0.0, hi = -1.0;
  double d = 1.0;
  while (true) {
    if (closed_form_feasible(t, d)) {
      lo = d;
      if (d >= cap) return cap;
      d = std::min(2.0 * d, cap);
    } else {
      hi = d;
      break;
    }
  }
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    (closed_form_feasible(t, mid) ? lo : hi) = mid;
  }
  return lo;
}

// Random consistent nonnegative representation with row sums clamped below
// one so that I - P' - Pt' stays comfortably invertible.
inline ShuOsherRep random_rep(std::mt19937& rng, int s, bool explicit_only) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  ShuOsherRep rep;
  rep.s = s;
  rep.r = 0.5 + 8.0 * unif(rng);
  rep.v = Eigen::VectorXd::Zero(s + 1);
  rep.P = Eigen::MatrixXd::Zero(s + 1, s);
  rep.Ptilde = Eigen::MatrixXd::Zero(s + 1, s);
  for (int i = 0; i <= s; ++i) {
    for (int j = 0; j < s; ++j) {
      if (explicit_only && i < s && j >= i) continue;
      rep.P(i, j) = unif(rng);
      rep.Ptilde(i, j) = 0.5 * unif(rng);
    }
    const double sum = rep.P.row(i).sum() + rep.Ptilde.row(i).sum();
    const double limit = (i < s) ? 0.9 : 1.0;
    if (sum > limit) {
      rep.P.row(i) *= limit / sum;
      rep.Ptilde.row(i) *= limit / sum;
    }
    rep.v(i) = 1.0 - rep.P.row(i).sum() - rep.Ptilde.row(i).sum();
  }
  return rep;
}

}  // namespace dwssp::oracle
