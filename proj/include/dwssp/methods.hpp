#pragma once

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace dwssp {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Thrown when a matrix required to be invertible is rank-deficient
/// (smallest singular value below 1e-12 times the largest).
class SingularMatrixError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Butcher-style coefficients of a downwind Runge-Kutta method.
///
/// Stages:  y_i = u + dt * sum_j A(i,j) F(y_j) + dt * sum_j Atilde(i,j) Ftilde(y_j)
/// Update:  u'  = u + dt * sum_j b(j) F(y_j)   + dt * sum_j btilde(j) Ftilde(y_j)
///
/// F is the upwind-biased operator, Ftilde the downwind-biased one.
/// The abscissae satisfy c = (A - Atilde) * ones for every method in scope.
struct DownwindTableau {
  int s = 0;
  MatrixXd A;       // s x s
  MatrixXd Atilde;  // s x s
  VectorXd b;       // s
  VectorXd btilde;  // s
  VectorXd c;       // s

  /// True iff A(i,j) = Atilde(i,j) = 0 for all j >= i (0-based rows/cols).
  bool is_explicit(double tol = 0.0) const;
};

/// Nonnegative representation of a downwind RK method at parameter r.
///
/// Rows 0..s-1 describe the stages, row s the final update:
///   y_i = v(i) u + sum_j P(i,j)      (y_j + (dt/r) F(y_j))
///               + sum_j Ptilde(i,j) (y_j + (dt/r) Ftilde(y_j))
///
/// A representation with all entries nonnegative is a certificate that the
/// method preserves forward-Euler monotonicity for dt <= r * dt_FE.
struct ShuOsherRep {
  int s = 0;
  double r = 0.0;
  VectorXd v;       // s+1
  MatrixXd P;       // (s+1) x s
  MatrixXd Ptilde;  // (s+1) x s

  /// Max deviation of v(i) + sum_j (P(i,j) + Ptilde(i,j)) from 1 over rows.
  double consistency_violation() const;
  /// Smallest entry over v, P, Ptilde.
  double min_entry() const;
  /// True iff the stage rows of P and Ptilde are strictly lower triangular
  /// (entries with j >= i all below tol in magnitude).
  bool is_explicit(double tol = 1e-10) const;
};

/// Coefficients of a k-step downwind linear multistep method.
///
///   u_n - dt beta(k) F(u_n) - dt betatilde(k) Ftilde(u_n)
///     = sum_{j=0}^{k-1} alpha(j) u_{n-k+j} + dt beta(j) F(u_{n-k+j})
///                       + dt betatilde(j) Ftilde(u_{n-k+j})
struct DownwindLmm {
  int k = 0;
  VectorXd alpha;      // k
  VectorXd beta;       // k+1
  VectorXd betatilde;  // k+1

  bool is_explicit() const { return beta(k) == 0.0 && betatilde(k) == 0.0; }
};

/// psi(z) = num(z) / den(z), coefficients in ascending powers of z.
/// Consistent methods have psi(0) = 1.
struct RationalStabilityFunction {
  VectorXd num;
  VectorXd den;
};

// ---------------------------------------------------------------------------
// Construction and conversion
// ---------------------------------------------------------------------------

/// Two-stage second-order fully implicit family with certificate parameter r.
/// Valid for r > 2 + sqrt(2); throws std::domain_error otherwise.
///
/// Row 0:  v = 2/(r(r-2)),  P(0,0) = 2/r,  Ptilde(0,1) = (r^2-4r+2)/(r(r-2))
/// Row 1:  P(1,0) = 1
/// Row 2:  P(2,1) = 1
ShuOsherRep make_optimal_family(double r);

/// Butcher coefficients of the representation:
///   A = (1/r) (I - P' - Pt')^{-1} P'   (P' = stage rows), likewise Atilde;
///   b^T = (p_u + pt_u) A + (1/r) p_u   (p_u = update row), likewise btilde;
///   c = (A - Atilde) * ones.
/// Requires r > 0 and I - P' - Pt' invertible (SingularMatrixError otherwise).
DownwindTableau shu_osher_to_butcher(const ShuOsherRep& rep);

/// The ordinary RK method obtained by substituting Ftilde = -F:
/// (A - Atilde, b - btilde, same c), returned with zero downwind parts.
DownwindTableau underlying_method(const DownwindTableau& t);

/// Classical order-condition residuals of the underlying method, one entry
/// per condition through order p (p in 1..3):
///   sum b - 1;  b.c - 1/2;  b.c^2 - 1/3, b.A.c - 1/6.
VectorXd rk_order_residuals(const DownwindTableau& t, int p);

/// Residual of the multistep order conditions for i = 0..p:
///   sum_j alpha_j j^i + sum_j (beta_j - betatilde_j) i j^{i-1} - k^i
/// with 0 * j^{-1} = 0 and 0^0 = 1.
VectorXd lmm_order_residuals(const DownwindLmm& m, int p);

/// Stability function of the underlying method,
///   psi(z) = det(I - z A' + z 1 b'^T) / det(I - z A'),
/// assembled by cofactor expansion over polynomials in z.
RationalStabilityFunction stability_function(const DownwindTableau& t);

/// Evaluate num(z)/den(z); throws std::domain_error near a pole of den.
std::complex<double> evaluate_psi(const RationalStabilityFunction& f,
                                  std::complex<double> z);

/// |psi(z)| in the limit |z| -> infinity (0 when the numerator degree is
/// smaller, +inf when it is larger than the denominator degree).
double psi_infinity_magnitude(const RationalStabilityFunction& f);

// ---------------------------------------------------------------------------
// Built-in methods
// ---------------------------------------------------------------------------

DownwindTableau forward_euler();
DownwindTableau backward_euler();
DownwindTableau trapezoidal_rk();  // implicit trapezoidal (Crank-Nicolson)
DownwindTableau ssprk22();
DownwindTableau ssprk33();

/// shu_osher_to_butcher(make_optimal_family(r)).
DownwindTableau family_tableau(double r);

/// Resolve "forward-euler", "backward-euler", "trapezoidal", "ssprk22",
/// "ssprk33" or "dw-family:<r>". Throws std::invalid_argument for other names.
DownwindTableau tableau_by_name(const std::string& name);

std::vector<std::string> builtin_method_names();

}  // namespace dwssp
