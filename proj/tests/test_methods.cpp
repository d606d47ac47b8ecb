#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "dwssp/io.hpp"
#include "dwssp/methods.hpp"
#include "oracles.hpp"

#include <cmath>
#include <complex>
#include <random>

using namespace dwssp;

namespace {

// Tableau of the two-stage family written out directly, used to cross-check
// the representation-elimination route.
DownwindTableau family_tableau_direct(double r) {
  DownwindTableau t;
  t.s = 2;
  t.A = MatrixXd::Zero(2, 2);
  t.Atilde = MatrixXd::Zero(2, 2);
  t.b = VectorXd::Zero(2);
  t.btilde = VectorXd::Zero(2);
  t.c = VectorXd::Zero(2);
  const double q = (r * r - 4.0 * r + 2.0) / (2.0 * r);
  t.A(0, 0) = (r * r - 2.0 * r - 2.0) / (2.0 * r);
  t.A(1, 0) = (r - 2.0) / 2.0;
  t.Atilde(0, 1) = q;
  t.Atilde(1, 1) = q;
  t.b << (r - 2.0) / 2.0, 1.0 / r;
  t.btilde << 0.0, q;
  t.c << (r - 2.0) / r, (r - 1.0) / r;
  return t;
}

}  // namespace

TEST_CASE("optimal family representation at r = 8") {
  const ShuOsherRep rep = make_optimal_family(8.0);
  CHECK(rep.s == 2);
  CHECK(rep.v(0) == doctest::Approx(1.0 / 24.0).epsilon(1e-15));
  CHECK(rep.P(0, 0) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(rep.Ptilde(0, 1) == doctest::Approx(17.0 / 24.0).epsilon(1e-15));
  CHECK(rep.P(1, 0) == 1.0);
  CHECK(rep.P(2, 1) == 1.0);
  CHECK(rep.consistency_violation() <= 1e-12);
  CHECK(rep.min_entry() >= 0.0);
}

TEST_CASE("optimal family domain guard") {
  CHECK_THROWS_AS(make_optimal_family(2.0 + std::sqrt(2.0)), std::domain_error);
  CHECK_THROWS_AS(make_optimal_family(2.0), std::domain_error);
  CHECK_THROWS_AS(make_optimal_family(-1.0), std::domain_error);
  CHECK_NOTHROW(make_optimal_family(2.0 + std::sqrt(2.0) + 1e-9));
}

TEST_CASE("optimal family valid across a log grid of r") {
  for (double r = 3.5; r <= 1000.0; r *= 1.37) {
    const ShuOsherRep rep = make_optimal_family(r);
    CHECK(rep.min_entry() >= 0.0);
    CHECK(rep.consistency_violation() <= 1e-12);
  }
}

TEST_CASE("butcher conversion of the family at r = 8") {
  const DownwindTableau t = family_tableau(8.0);
  CHECK(t.A(0, 0) == doctest::Approx(23.0 / 8.0).epsilon(1e-14));
  CHECK(t.A(0, 1) == doctest::Approx(0.0));
  CHECK(t.A(1, 0) == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(t.A(1, 1) == doctest::Approx(0.0));
  CHECK(t.Atilde(0, 0) == doctest::Approx(0.0));
  CHECK(t.Atilde(0, 1) == doctest::Approx(17.0 / 8.0).epsilon(1e-14));
  CHECK(t.Atilde(1, 1) == doctest::Approx(17.0 / 8.0).epsilon(1e-14));
  CHECK(t.b(0) == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(t.b(1) == doctest::Approx(0.125).epsilon(1e-14));
  CHECK(t.btilde(0) == doctest::Approx(0.0));
  CHECK(t.btilde(1) == doctest::Approx(17.0 / 8.0).epsilon(1e-14));
  CHECK(t.c(0) == doctest::Approx(0.75).epsilon(1e-14));
  CHECK(t.c(1) == doctest::Approx(0.875).epsilon(1e-14));
  CHECK_FALSE(t.is_explicit());
}

TEST_CASE("butcher conversion agrees with the direct tableau for many r") {
  for (double r : {3.5, 5.0, 8.0, 20.0, 100.0}) {
    const DownwindTableau a = family_tableau(r);
    const DownwindTableau b = family_tableau_direct(r);
    CHECK((a.A - b.A).cwiseAbs().maxCoeff() <= 1e-11 * r);
    CHECK((a.Atilde - b.Atilde).cwiseAbs().maxCoeff() <= 1e-11 * r);
    CHECK((a.b - b.b).cwiseAbs().maxCoeff() <= 1e-11 * r);
    CHECK((a.btilde - b.btilde).cwiseAbs().maxCoeff() <= 1e-11 * r);
    CHECK((a.c - b.c).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("butcher conversion trivial cases") {
  SUBCASE("single explicit stage is forward Euler") {
    ShuOsherRep rep;
    rep.s = 1;
    rep.r = 1.0;
    rep.v = VectorXd::Zero(2);
    rep.v(0) = 1.0;
    rep.P = MatrixXd::Zero(2, 1);
    rep.Ptilde = MatrixXd::Zero(2, 1);
    rep.P(1, 0) = 1.0;
    const DownwindTableau t = shu_osher_to_butcher(rep);
    CHECK(t.A(0, 0) == 0.0);
    CHECK(t.b(0) == 1.0);
    CHECK(t.c(0) == 0.0);
  }
  SUBCASE("all-zero coefficient rows give the identity map") {
    ShuOsherRep rep;
    rep.s = 2;
    rep.r = 3.0;
    rep.v = VectorXd::Ones(3);
    rep.P = MatrixXd::Zero(3, 2);
    rep.Ptilde = MatrixXd::Zero(3, 2);
    const DownwindTableau t = shu_osher_to_butcher(rep);
    CHECK(t.A.cwiseAbs().maxCoeff() == 0.0);
    CHECK(t.b.cwiseAbs().maxCoeff() == 0.0);
    CHECK(t.btilde.cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("r <= 0 is rejected") {
    ShuOsherRep rep = make_optimal_family(8.0);
    rep.r = 0.0;
    CHECK_THROWS_AS(shu_osher_to_butcher(rep), std::domain_error);
  }
  SUBCASE("singular stage matrix is rejected") {
    ShuOsherRep rep;
    rep.s = 1;
    rep.r = 1.0;
    rep.v = VectorXd::Zero(2);
    rep.P = MatrixXd::Zero(2, 1);
    rep.Ptilde = MatrixXd::Zero(2, 1);
    rep.P(0, 0) = 1.0;  // I - P' = 0
    CHECK_THROWS_AS(shu_osher_to_butcher(rep), SingularMatrixError);
  }
}

TEST_CASE("c equals the row sums of A - Atilde by construction") {
  std::mt19937 rng(12345);
  for (int trial = 0; trial < 50; ++trial) {
    const int s = 1 + static_cast<int>(rng() % 3);
    const ShuOsherRep rep = oracle::random_rep(rng, s, false);
    DownwindTableau t;
    try {
      t = shu_osher_to_butcher(rep);
    } catch (const SingularMatrixError&) {
      continue;
    }
    const VectorXd expect = (t.A - t.Atilde) * VectorXd::Ones(s);
    CHECK((t.c - expect).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("underlying method of the family at r = 8") {
  const DownwindTableau u = underlying_method(family_tableau(8.0));
  CHECK(u.A(0, 0) == doctest::Approx(23.0 / 8.0).epsilon(1e-14));
  CHECK(u.A(0, 1) == doctest::Approx(-17.0 / 8.0).epsilon(1e-14));
  CHECK(u.A(1, 0) == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(u.A(1, 1) == doctest::Approx(-17.0 / 8.0).epsilon(1e-14));
  CHECK(u.b(0) == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(u.b(1) == doctest::Approx(-2.0).epsilon(1e-14));
  CHECK(u.Atilde.cwiseAbs().maxCoeff() == 0.0);
  CHECK(u.btilde.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("underlying method trivial cases") {
  const DownwindTableau fe = forward_euler();
  const DownwindTableau u = underlying_method(fe);
  CHECK((u.A - fe.A).cwiseAbs().maxCoeff() == 0.0);
  CHECK((u.b - fe.b).cwiseAbs().maxCoeff() == 0.0);

  DownwindTableau cancel = family_tableau(8.0);
  cancel.Atilde = cancel.A;
  cancel.btilde = cancel.b;
  const DownwindTableau z = underlying_method(cancel);
  CHECK(z.A.cwiseAbs().maxCoeff() == 0.0);
  CHECK(z.b.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("rk order residuals") {
  SUBCASE("family at r = 8 is second order") {
    const VectorXd res = rk_order_residuals(family_tableau(8.0), 2);
    CHECK(res.size() == 2);
    CHECK(res.cwiseAbs().maxCoeff() <= 1e-12);
  }
  SUBCASE("forward Euler misses the second-order condition by 1/2") {
    const VectorXd res = rk_order_residuals(forward_euler(), 2);
    CHECK(res(0) == doctest::Approx(0.0));
    CHECK(res(1) == doctest::Approx(-0.5));
  }
  SUBCASE("family at r = 8 is not third order") {
    const VectorXd res = rk_order_residuals(family_tableau(8.0), 3);
    CHECK(res.size() == 4);
    CHECK(res.head(2).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK(res.tail(2).cwiseAbs().maxCoeff() > 1e-6);
    // b'.c^2 - 1/3 at r = 8 evaluates to (3r-4)/(2r^2) - 1/3 = -17/96.
    CHECK(res(2) == doctest::Approx(-17.0 / 96.0).epsilon(1e-12));
  }
  SUBCASE("order depth is capped") {
    CHECK_THROWS_AS(rk_order_residuals(forward_euler(), 4),
                    std::invalid_argument);
    CHECK_THROWS_AS(rk_order_residuals(forward_euler(), 0),
                    std::invalid_argument);
  }
  SUBCASE("residuals agree between converted and directly written tableaus") {
    const VectorXd a = rk_order_residuals(family_tableau(8.0), 3);
    const VectorXd b = rk_order_residuals(family_tableau_direct(8.0), 3);
    CHECK((a - b).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("lmm order residuals") {
  SUBCASE("backward Euler") {
    DownwindLmm m;
    m.k = 1;
    m.alpha = VectorXd::Ones(1);
    m.beta = VectorXd::Zero(2);
    m.betatilde = VectorXd::Zero(2);
    m.beta(1) = 1.0;
    const VectorXd res = lmm_order_residuals(m, 2);
    CHECK(res(0) == doctest::Approx(0.0));
    CHECK(res(1) == doctest::Approx(0.0));
    CHECK(res(2) == doctest::Approx(1.0));
  }
  SUBCASE("trapezoidal rule is second order") {
    DownwindLmm m;
    m.k = 1;
    m.alpha = VectorXd::Ones(1);
    m.beta = VectorXd::Constant(2, 0.5);
    m.betatilde = VectorXd::Zero(2);
    const VectorXd res = lmm_order_residuals(m, 2);
    CHECK(res.cwiseAbs().maxCoeff() <= 1e-15);
  }
  SUBCASE("the zero method is inconsistent") {
    DownwindLmm m;
    m.k = 2;
    m.alpha = VectorXd::Zero(2);
    m.beta = VectorXd::Zero(3);
    m.betatilde = VectorXd::Zero(3);
    const VectorXd res = lmm_order_residuals(m, 0);
    CHECK(res.size() == 1);
    CHECK(res(0) == doctest::Approx(-1.0));
  }
}

TEST_CASE("stability function of the family at r = 8") {
  const RationalStabilityFunction f = stability_function(family_tableau(8.0));
  REQUIRE(f.num.size() == 3);
  REQUIRE(f.den.size() == 3);
  CHECK(f.num(0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(f.num(1) == doctest::Approx(0.25).epsilon(1e-13));
  CHECK(f.num(2) == doctest::Approx(1.0 / 64.0).epsilon(1e-13));
  CHECK(f.den(0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(f.den(1) == doctest::Approx(-0.75).epsilon(1e-13));
  CHECK(f.den(2) == doctest::Approx(17.0 / 64.0).epsilon(1e-13));

  const auto at_m1 = evaluate_psi(f, {-1.0, 0.0});
  CHECK(at_m1.real() == doctest::Approx(49.0 / 129.0).epsilon(1e-13));
  CHECK(at_m1.imag() == doctest::Approx(0.0));
  CHECK(psi_infinity_magnitude(f) == doctest::Approx(1.0 / 17.0).epsilon(1e-12));
}

TEST_CASE("psi is one at the origin for every built-in method") {
  for (const char* name :
       {"forward-euler", "backward-euler", "trapezoidal", "ssprk22",
        "ssprk33"}) {
    const auto f = stability_function(tableau_by_name(name));
    CHECK(std::abs(evaluate_psi(f, {0.0, 0.0}) - 1.0) <= 1e-14);
  }
  const auto f = stability_function(family_tableau(8.0));
  CHECK(std::abs(evaluate_psi(f, {0.0, 0.0}) - 1.0) <= 1e-14);
}

TEST_CASE("family is A-stable by imaginary-axis sampling") {
  for (double r : {4.0, 8.0, 16.0, 100.0}) {
    const auto f = stability_function(family_tableau(r));
    double worst = 0.0;
    const int samples = 100000;
    for (int i = 0; i < samples; ++i) {
      const double y = -1e4 + 2e4 * (static_cast<double>(i) / (samples - 1));
      worst = std::max(worst, std::abs(evaluate_psi(f, {0.0, y})));
    }
    CHECK(worst <= 1.0 + 1e-10);
  }
}

TEST_CASE("evaluate_psi rejects poles") {
  RationalStabilityFunction f;
  f.num = VectorXd::Ones(1);
  f.den = VectorXd::Zero(2);
  f.den(0) = -1.0;
  f.den(1) = 1.0;  // den(z) = z - 1
  CHECK_THROWS_AS(evaluate_psi(f, {1.0, 0.0}), std::domain_error);
  CHECK_NOTHROW(evaluate_psi(f, {2.0, 0.0}));
}

TEST_CASE("method name catalog") {
  CHECK(tableau_by_name("ssprk33").s == 3);
  CHECK(tableau_by_name("dw-family:8").s == 2);
  CHECK_THROWS_AS(tableau_by_name("dw-family:2"), std::domain_error);
  CHECK_THROWS_AS(tableau_by_name("dw-family:abc"), std::invalid_argument);
  CHECK_THROWS_AS(tableau_by_name("rk4"), std::invalid_argument);
  CHECK(forward_euler().is_explicit());
  CHECK(ssprk33().is_explicit());
  CHECK_FALSE(backward_euler().is_explicit());
  CHECK_FALSE(trapezoidal_rk().is_explicit());
}

TEST_CASE("method json round trips") {
  const DownwindTableau t = family_tableau(8.0);
  const auto parsed = io::method_from_json(io::tableau_to_json(t));
  const auto& t2 = std::get<DownwindTableau>(parsed);
  CHECK((t.A - t2.A).cwiseAbs().maxCoeff() == 0.0);
  CHECK((t.btilde - t2.btilde).cwiseAbs().maxCoeff() == 0.0);
  CHECK((t.c - t2.c).cwiseAbs().maxCoeff() == 0.0);

  DownwindLmm m;
  m.k = 2;
  m.alpha = VectorXd::Zero(2);
  m.alpha << 0.25, 0.75;
  m.beta = VectorXd::Zero(3);
  m.beta << 0.1, 0.2, 0.3;
  m.betatilde = VectorXd::Zero(3);
  const auto m2 = std::get<DownwindLmm>(io::method_from_json(io::lmm_to_json(m)));
  CHECK((m.alpha - m2.alpha).cwiseAbs().maxCoeff() == 0.0);
  CHECK((m.beta - m2.beta).cwiseAbs().maxCoeff() == 0.0);

  CHECK_THROWS_AS(io::method_from_json("{\"s\": 2}"), std::invalid_argument);
  CHECK_THROWS_AS(io::method_from_json("{"), std::invalid_argument);
  CHECK_THROWS_AS(io::method_from_json("{\"x\": 1}"), std::invalid_argument);
}
