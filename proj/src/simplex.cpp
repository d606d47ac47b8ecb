#include "dwssp/simplex.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace dwssp {

namespace {

constexpr double kFeasTol = 1e-9;     // artificial objective threshold
constexpr double kPivotTol = 1e-11;   // reduced-cost / pivot-entry threshold
constexpr int kBlandAfter = 1000;
constexpr int kMaxPivots = 100000;

// Full-tableau two-phase simplex for min c.x s.t. Ax = b, x >= 0.
//
// Tableau layout: rows 0..m-1 are constraints, row m holds reduced costs and
// -objective; columns 0..n-1 structural, n..n+m-1 artificial, last column rhs.
class Tableau {
 public:
  Tableau(const Eigen::MatrixXd& A, const Eigen::VectorXd& b) {
    m_ = static_cast<int>(A.rows());
    n_ = static_cast<int>(A.cols());
    T_.setZero(m_ + 1, n_ + m_ + 1);
    basis_.resize(m_);
    for (int i = 0; i < m_; ++i) {
      double scale = A.row(i).cwiseAbs().maxCoeff();
      if (scale < 1e-300) scale = 1.0;
      double sgn = (b(i) < 0.0) ? -1.0 : 1.0;
      T_.row(i).head(n_) = sgn / scale * A.row(i);
      T_(i, n_ + i) = 1.0;
      T_(i, n_ + m_) = sgn / scale * b(i);
      basis_[i] = n_ + i;
    }
    // Phase-1 reduced costs: c = 1 on artificials, basis = artificials.
    for (int j = 0; j < n_; ++j) T_(m_, j) = -T_.col(j).head(m_).sum();
    T_(m_, n_ + m_) = -T_.col(n_ + m_).head(m_).sum();
  }

  // Runs the simplex loop on the current cost row. allow_artificial controls
  // whether artificial columns may enter the basis.
  void iterate(bool allow_artificial) {
    const int last = n_ + m_;
    while (true) {
      int enter = -1;
      const int limit = allow_artificial ? last : n_;
      if (pivots_ < kBlandAfter) {
        double best = -kPivotTol;
        for (int j = 0; j < limit; ++j)
          if (T_(m_, j) < best) { best = T_(m_, j); enter = j; }
      } else {
        for (int j = 0; j < limit; ++j)
          if (T_(m_, j) < -kPivotTol) { enter = j; break; }
      }
      if (enter < 0) return;  // optimal

      int leave = -1;
      double best_ratio = std::numeric_limits<double>::infinity();
      for (int i = 0; i < m_; ++i) {
        const double a = T_(i, enter);
        if (a > kPivotTol) {
          const double ratio = T_(i, last) / a;
          if (ratio < best_ratio - 1e-15 ||
              (ratio < best_ratio + 1e-15 && leave >= 0 &&
               basis_[i] < basis_[leave])) {
            best_ratio = ratio;
            leave = i;
          }
        }
      }
      if (leave < 0)
        throw std::runtime_error("simplex: unbounded direction encountered");

      pivot(leave, enter);
      if (++pivots_ > kMaxPivots)
        throw SimplexCycleError("simplex: pivot limit exceeded (cycling?)");
    }
  }

  double objective() const { return -T_(m_, n_ + m_); }
  int pivots() const { return pivots_; }

  Eigen::VectorXd solution() const {
    Eigen::VectorXd x = Eigen::VectorXd::Zero(n_);
    for (int i = 0; i < m_; ++i)
      if (basis_[i] < n_) x(basis_[i]) = T_(i, n_ + m_);
    return x;
  }

  // Pivot basic artificials out (or drop their redundant rows) and install
  // the phase-2 cost row for the given objective.
  void enter_phase2(const Eigen::VectorXd& c) {
    for (int i = 0; i < m_; ++i) {
      if (basis_[i] < n_) continue;
      int col = -1;
      for (int j = 0; j < n_; ++j)
        if (std::abs(T_(i, j)) > 1e-8) { col = j; break; }
      if (col >= 0) {
        pivot(i, col);
      } else {
        T_.row(i).setZero();  // redundant constraint
        basis_[i] = -1;
      }
    }
    // Fresh reduced costs: r_j = c_j - c_B . T(:,j).
    for (int j = 0; j <= n_ + m_; ++j) {
      double cb = 0.0;
      for (int i = 0; i < m_; ++i)
        if (basis_[i] >= 0 && basis_[i] < n_) cb += c(basis_[i]) * T_(i, j);
      const double cj = (j < n_) ? c(j) : 0.0;
      T_(m_, j) = (j == n_ + m_) ? -cb : cj - cb;
    }
  }

 private:
  void pivot(int p, int e) {
    T_.row(p) /= T_(p, e);
    for (int i = 0; i <= m_; ++i) {
      if (i == p) continue;
      const double f = T_(i, e);
      if (f != 0.0) {
        T_.row(i) -= f * T_.row(p);
        T_(i, e) = 0.0;
      }
    }
    T_(p, e) = 1.0;
    basis_[p] = e;
  }

  int m_ = 0, n_ = 0;
  Eigen::MatrixXd T_;
  std::vector<int> basis_;
  int pivots_ = 0;
};

}  // namespace

LpSolution lp_feasible(const LinearProgram& lp) {
  if (!lp.beq.allFinite() || !lp.Aeq.allFinite())
    throw std::invalid_argument("lp_feasible: non-finite entries");
  LpSolution out;
  if (lp.beq.size() == 0) {
    out.feasible = true;
    out.x = Eigen::VectorXd::Zero(lp.nvars);
    return out;
  }
  Tableau tab(lp.Aeq, lp.beq);
  tab.iterate(true);
  out.pivots = tab.pivots();
  const double phase1 = tab.objective();
  out.feasible = phase1 <= kFeasTol;
  out.max_violation = out.feasible ? 0.0 : phase1;
  if (out.feasible) out.x = tab.solution();
  return out;
}

LpSolution lp_minimize(const LinearProgram& lp) {
  if (lp.objective.size() != lp.nvars)
    throw std::invalid_argument("lp_minimize: objective size mismatch");
  LpSolution out;
  Tableau tab(lp.Aeq, lp.beq);
  tab.iterate(true);
  out.pivots = tab.pivots();
  const double phase1 = tab.objective();
  if (phase1 > kFeasTol) {
    out.feasible = false;
    out.max_violation = phase1;
    return out;
  }
  tab.enter_phase2(lp.objective);
  tab.iterate(false);
  out.feasible = true;
  out.pivots = tab.pivots();
  out.x = tab.solution();
  out.objective_value = lp.objective.dot(out.x);
  return out;
}

}  // namespace dwssp
