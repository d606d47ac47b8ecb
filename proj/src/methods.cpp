#include "dwssp/methods.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <cstdio>
#include <limits>

namespace dwssp {

namespace {

double ipow(double base, int e) {
  double acc = 1.0;
  for (int i = 0; i < e; ++i) acc *= base;
  return acc;
}

// Inverse with a relative rank check on the singular values.
MatrixXd checked_inverse(const MatrixXd& m, const char* what) {
  Eigen::JacobiSVD<MatrixXd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0 || sv(0) == 0.0 || sv(sv.size() - 1) < 1e-12 * sv(0)) {
    throw SingularMatrixError(std::string(what) +
                              ": matrix is singular to working precision");
  }
  return m.inverse();
}

using Poly = std::vector<double>;  // ascending coefficients

Poly poly_add(const Poly& a, const Poly& b) {
  Poly out(std::max(a.size(), b.size()), 0.0);
  for (size_t i = 0; i < a.size(); ++i) out[i] += a[i];
  for (size_t i = 0; i < b.size(); ++i) out[i] += b[i];
  return out;
}

Poly poly_mul(const Poly& a, const Poly& b) {
  Poly out(a.size() + b.size() - 1, 0.0);
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  return out;
}

// Determinant of a matrix of polynomials by cofactor expansion along the
// first column. Fine for the stage counts in use (s <= 4).
Poly poly_det(const std::vector<std::vector<Poly>>& m) {
  const size_t n = m.size();
  if (n == 1) return m[0][0];
  Poly acc{0.0};
  for (size_t i = 0; i < n; ++i) {
    std::vector<std::vector<Poly>> minor;
    minor.reserve(n - 1);
    for (size_t r = 0; r < n; ++r) {
      if (r == i) continue;
      std::vector<Poly> row;
      row.reserve(n - 1);
      for (size_t c = 1; c < n; ++c) row.push_back(m[r][c]);
      minor.push_back(std::move(row));
    }
    Poly term = poly_mul(m[i][0], poly_det(minor));
    if (i % 2 == 1)
      for (double& v : term) v = -v;
    acc = poly_add(acc, term);
  }
  return acc;
}

}  // namespace

bool DownwindTableau::is_explicit(double tol) const {
  for (int i = 0; i < s; ++i)
    for (int j = i; j < s; ++j)
      if (std::abs(A(i, j)) > tol || std::abs(Atilde(i, j)) > tol) return false;
  return true;
}

double ShuOsherRep::consistency_violation() const {
  double worst = 0.0;
  for (int i = 0; i <= s; ++i) {
    double sum = v(i) + P.row(i).sum() + Ptilde.row(i).sum();
    worst = std::max(worst, std::abs(sum - 1.0));
  }
  return worst;
}

double ShuOsherRep::min_entry() const {
  double m = v.minCoeff();
  m = std::min(m, P.minCoeff());
  m = std::min(m, Ptilde.minCoeff());
  return m;
}

bool ShuOsherRep::is_explicit(double tol) const {
  for (int i = 0; i < s; ++i)
    for (int j = i; j < s; ++j)
      if (std::abs(P(i, j)) > tol || std::abs(Ptilde(i, j)) > tol) return false;
  return true;
}

ShuOsherRep make_optimal_family(double r) {
  if (!(r > 2.0 + std::sqrt(2.0))) {
    throw std::domain_error(
        "make_optimal_family: requires r > 2 + sqrt(2), got r=" +
        std::to_string(r));
  }
  ShuOsherRep rep;
  rep.s = 2;
  rep.r = r;
  rep.v = VectorXd::Zero(3);
  rep.P = MatrixXd::Zero(3, 2);
  rep.Ptilde = MatrixXd::Zero(3, 2);
  rep.v(0) = 2.0 / (r * (r - 2.0));
  rep.P(0, 0) = 2.0 / r;
  rep.Ptilde(0, 1) = (r * r - 4.0 * r + 2.0) / (r * (r - 2.0));
  rep.P(1, 0) = 1.0;
  rep.P(2, 1) = 1.0;
  return rep;
}

DownwindTableau shu_osher_to_butcher(const ShuOsherRep& rep) {
  if (!(rep.r > 0.0))
    throw std::domain_error("shu_osher_to_butcher: requires r > 0");
  const int s = rep.s;
  const MatrixXd Pp = rep.P.topRows(s);
  const MatrixXd Pt = rep.Ptilde.topRows(s);
  const MatrixXd N = MatrixXd::Identity(s, s) - Pp - Pt;
  const MatrixXd Ninv = checked_inverse(N, "shu_osher_to_butcher");

  DownwindTableau t;
  t.s = s;
  t.A = Ninv * Pp / rep.r;
  t.Atilde = Ninv * Pt / rep.r;

  const VectorXd pu = rep.P.row(s).transpose();
  const VectorXd ptu = rep.Ptilde.row(s).transpose();
  t.b = t.A.transpose() * (pu + ptu) + pu / rep.r;
  t.btilde = t.Atilde.transpose() * (pu + ptu) + ptu / rep.r;
  t.c = (t.A - t.Atilde) * VectorXd::Ones(s);
  return t;
}

DownwindTableau underlying_method(const DownwindTableau& t) {
  DownwindTableau u;
  u.s = t.s;
  u.A = t.A - t.Atilde;
  u.Atilde = MatrixXd::Zero(t.s, t.s);
  u.b = t.b - t.btilde;
  u.btilde = VectorXd::Zero(t.s);
  u.c = t.c;
  return u;
}

VectorXd rk_order_residuals(const DownwindTableau& t, int p) {
  if (p < 1 || p > 3)
    throw std::invalid_argument("rk_order_residuals: supported orders are 1..3");
  const DownwindTableau u = underlying_method(t);
  std::vector<double> res;
  res.push_back(u.b.sum() - 1.0);
  if (p >= 2) res.push_back(u.b.dot(u.c) - 0.5);
  if (p >= 3) {
    res.push_back(u.b.dot(u.c.cwiseProduct(u.c)) - 1.0 / 3.0);
    res.push_back(u.b.dot(u.A * u.c) - 1.0 / 6.0);
  }
  return Eigen::Map<VectorXd>(res.data(), static_cast<long>(res.size()));
}

VectorXd lmm_order_residuals(const DownwindLmm& m, int p) {
  if (p < 0) throw std::invalid_argument("lmm_order_residuals: p >= 0 required");
  VectorXd res(p + 1);
  for (int i = 0; i <= p; ++i) {
    double acc = 0.0;
    for (int j = 0; j < m.k; ++j) acc += m.alpha(j) * ipow(j, i);
    if (i > 0) {
      for (int j = 0; j <= m.k; ++j)
        acc += (m.beta(j) - m.betatilde(j)) * i * ipow(j, i - 1);
    }
    res(i) = acc - ipow(m.k, i);
  }
  return res;
}

RationalStabilityFunction stability_function(const DownwindTableau& t) {
  const DownwindTableau u = underlying_method(t);
  const int s = u.s;

  auto entry = [&](double c0, double c1) { return Poly{c0, c1}; };
  std::vector<std::vector<Poly>> den(s, std::vector<Poly>(s));
  std::vector<std::vector<Poly>> num(s, std::vector<Poly>(s));
  for (int i = 0; i < s; ++i) {
    for (int j = 0; j < s; ++j) {
      const double diag = (i == j) ? 1.0 : 0.0;
      den[i][j] = entry(diag, -u.A(i, j));
      num[i][j] = entry(diag, -u.A(i, j) + u.b(j));
    }
  }

  Poly pn = poly_det(num);
  Poly pd = poly_det(den);
  pn.resize(s + 1, 0.0);
  pd.resize(s + 1, 0.0);

  RationalStabilityFunction f;
  f.num = Eigen::Map<VectorXd>(pn.data(), s + 1);
  f.den = Eigen::Map<VectorXd>(pd.data(), s + 1);
  return f;
}

std::complex<double> evaluate_psi(const RationalStabilityFunction& f,
                                  std::complex<double> z) {
  auto horner = [&](const VectorXd& coef) {
    std::complex<double> acc(0.0, 0.0);
    for (long i = coef.size() - 1; i >= 0; --i) acc = acc * z + coef(i);
    return acc;
  };
  const std::complex<double> den = horner(f.den);
  double scale = 0.0;
  const double az = std::max(1.0, std::abs(z));
  double zp = 1.0;
  for (long i = 0; i < f.den.size(); ++i) {
    scale = std::max(scale, std::abs(f.den(i)) * zp);
    zp *= az;
  }
  if (std::abs(den) < 1e-14 * scale)
    throw std::domain_error("evaluate_psi: z is too close to a pole");
  return horner(f.num) / den;
}

double psi_infinity_magnitude(const RationalStabilityFunction& f) {
  auto degree = [](const VectorXd& coef) {
    const double scale = coef.cwiseAbs().maxCoeff();
    for (long i = coef.size() - 1; i >= 0; --i)
      if (std::abs(coef(i)) > 1e-14 * scale) return i;
    return -1L;
  };
  const long dn = degree(f.num), dd = degree(f.den);
  if (dn < 0) return 0.0;
  if (dn < dd) return 0.0;
  if (dn > dd) return std::numeric_limits<double>::infinity();
  return std::abs(f.num(dn) / f.den(dd));
}

static DownwindTableau make_ordinary(int s, MatrixXd A, VectorXd b, VectorXd c) {
  DownwindTableau t;
  t.s = s;
  t.A = std::move(A);
  t.Atilde = MatrixXd::Zero(s, s);
  t.b = std::move(b);
  t.btilde = VectorXd::Zero(s);
  t.c = std::move(c);
  return t;
}

DownwindTableau forward_euler() {
  return make_ordinary(1, MatrixXd::Zero(1, 1), VectorXd::Ones(1),
                       VectorXd::Zero(1));
}

DownwindTableau backward_euler() {
  return make_ordinary(1, MatrixXd::Ones(1, 1), VectorXd::Ones(1),
                       VectorXd::Ones(1));
}

DownwindTableau trapezoidal_rk() {
  MatrixXd A(2, 2);
  A << 0.0, 0.0, 0.5, 0.5;
  VectorXd b(2), c(2);
  b << 0.5, 0.5;
  c << 0.0, 1.0;
  return make_ordinary(2, A, b, c);
}

DownwindTableau ssprk22() {
  MatrixXd A(2, 2);
  A << 0.0, 0.0, 1.0, 0.0;
  VectorXd b(2), c(2);
  b << 0.5, 0.5;
  c << 0.0, 1.0;
  return make_ordinary(2, A, b, c);
}

DownwindTableau ssprk33() {
  MatrixXd A(3, 3);
  A << 0.0, 0.0, 0.0,
       1.0, 0.0, 0.0,
       0.25, 0.25, 0.0;
  VectorXd b(3), c(3);
  b << 1.0 / 6.0, 1.0 / 6.0, 2.0 / 3.0;
  c << 0.0, 1.0, 0.5;
  return make_ordinary(3, A, b, c);
}

DownwindTableau family_tableau(double r) {
  return shu_osher_to_butcher(make_optimal_family(r));
}

DownwindTableau tableau_by_name(const std::string& name) {
  if (name == "forward-euler") return forward_euler();
  if (name == "backward-euler") return backward_euler();
  if (name == "trapezoidal") return trapezoidal_rk();
  if (name == "ssprk22") return ssprk22();
  if (name == "ssprk33") return ssprk33();
  const std::string prefix = "dw-family:";
  if (name.rfind(prefix, 0) == 0) {
    const std::string num = name.substr(prefix.size());
    size_t pos = 0;
    double r = 0.0;
    try {
      r = std::stod(num, &pos);
    } catch (const std::exception&) {
      throw std::invalid_argument("tableau_by_name: bad parameter in '" + name +
                                  "'");
    }
    if (pos != num.size())
      throw std::invalid_argument("tableau_by_name: bad parameter in '" + name +
                                  "'");
    return family_tableau(r);
  }
  throw std::invalid_argument("tableau_by_name: unknown method '" + name + "'");
}

std::vector<std::string> builtin_method_names() {
  return {"forward-euler", "backward-euler", "trapezoidal",
          "ssprk22",       "ssprk33",        "dw-family:<r>"};
}

}  // namespace dwssp
