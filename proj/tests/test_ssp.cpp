#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "dwssp/ssp.hpp"
#include "oracles.hpp"

#include <cmath>
#include <random>

using namespace dwssp;

namespace {

DownwindLmm lmm(int k, std::initializer_list<double> alpha,
                std::initializer_list<double> beta,
                std::initializer_list<double> betatilde) {
  DownwindLmm m;
  m.k = k;
  m.alpha = VectorXd::Zero(k);
  int i = 0;
  for (double a : alpha) m.alpha(i++) = a;
  m.beta = VectorXd::Zero(k + 1);
  i = 0;
  for (double b : beta) m.beta(i++) = b;
  m.betatilde = VectorXd::Zero(k + 1);
  i = 0;
  for (double b : betatilde) m.betatilde(i++) = b;
  return m;
}

}  // namespace

TEST_CASE("feasibility of the family tableau at and above its parameter") {
  const DownwindTableau t = family_tableau(8.0);
  const FeasibilityResult at8 = rk_feasible_at(t, 8.0);
  CHECK(at8.feasible);
  REQUIRE(at8.certificate.has_value());
  CHECK(at8.certificate->min_entry() >= -1e-9);
  CHECK(at8.certificate->consistency_violation() <= 1e-9);
  CHECK_FALSE(rk_feasible_at(t, 9.0).feasible);
  CHECK(rk_feasible_at(t, 0.0).feasible);
}

TEST_CASE("forward Euler is representable exactly up to one") {
  const DownwindTableau fe = forward_euler();
  CHECK(rk_feasible_at(fe, 1.0).feasible);
  CHECK_FALSE(rk_feasible_at(fe, 1.01).feasible);
}

TEST_CASE("certificates convert back to the queried tableau") {
  std::mt19937 rng(99);
  const std::vector<DownwindTableau> cases = {
      family_tableau(8.0), family_tableau(4.0), ssprk22(), trapezoidal_rk()};
  const std::vector<double> rs = {8.0, 4.0, 1.0, 2.0};
  for (size_t i = 0; i < cases.size(); ++i) {
    for (double f : {0.25, 0.6, 1.0}) {
      const double r = rs[i] * f;
      const FeasibilityResult res = rk_feasible_at(cases[i], r);
      REQUIRE(res.feasible);
      if (r == 0.0) continue;
      const DownwindTableau back = shu_osher_to_butcher(*res.certificate);
      CHECK((back.A - cases[i].A).cwiseAbs().maxCoeff() <= 1e-8);
      CHECK((back.Atilde - cases[i].Atilde).cwiseAbs().maxCoeff() <= 1e-8);
      CHECK((back.b - cases[i].b).cwiseAbs().maxCoeff() <= 1e-8);
      CHECK((back.btilde - cases[i].btilde).cwiseAbs().maxCoeff() <= 1e-8);
    }
  }
  (void)rng;
}

TEST_CASE("representation round trip through conversion and re-certification") {
  std::mt19937 rng(2024);
  int checked = 0;
  while (checked < 25) {
    const int s = 1 + static_cast<int>(rng() % 3);
    const ShuOsherRep rep = oracle::random_rep(rng, s, false);
    DownwindTableau t;
    try {
      t = shu_osher_to_butcher(rep);
    } catch (const SingularMatrixError&) {
      continue;
    }
    const FeasibilityResult res = rk_feasible_at(t, rep.r);
    REQUIRE(res.feasible);
    const DownwindTableau back = shu_osher_to_butcher(*res.certificate);
    const double scale = 1.0 + t.A.cwiseAbs().maxCoeff();
    CHECK((back.A - t.A).cwiseAbs().maxCoeff() <= 1e-10 * scale);
    CHECK((back.Atilde - t.Atilde).cwiseAbs().maxCoeff() <= 1e-10 * scale);
    CHECK((back.b - t.b).cwiseAbs().maxCoeff() <= 1e-10 * scale);
    CHECK((back.btilde - t.btilde).cwiseAbs().maxCoeff() <= 1e-10 * scale);
    ++checked;
  }
}

TEST_CASE("certification parameter of the family equals its r") {
  for (double r : {4.0, 8.0, 20.0}) {
    const double c = rk_downwind_ssp_coefficient(family_tableau(r), 1e-8);
    CHECK(c == doctest::Approx(r).epsilon(1e-8));
  }
}

TEST_CASE("certification parameters of catalog methods match the closed form") {
  const DownwindTableau cases[] = {forward_euler(), ssprk22(), ssprk33(),
                                   trapezoidal_rk(), backward_euler()};
  for (const DownwindTableau& t : cases) {
    const double expect = oracle::closed_form_ctilde(t);
    if (expect >= 1e6) continue;  // unbounded: covered below
    const double got = rk_downwind_ssp_coefficient(t, 1e-8);
    CHECK(got == doctest::Approx(expect).epsilon(1e-6));
  }
  CHECK(rk_downwind_ssp_coefficient(ssprk22(), 1e-8) ==
        doctest::Approx(1.0).epsilon(1e-7));
  CHECK(rk_downwind_ssp_coefficient(trapezoidal_rk(), 1e-8) ==
        doctest::Approx(2.0).epsilon(1e-7));
}

TEST_CASE("backward Euler certification overflows the bracket") {
  CHECK_THROWS_AS(rk_downwind_ssp_coefficient(backward_euler(), 1e-8),
                  BracketOverflowError);
}

TEST_CASE("feasibility is monotone around the family parameter") {
  const DownwindTableau t = family_tableau(8.0);
  for (double r : {0.5, 2.0, 5.0, 7.0, 7.9, 7.999}) {
    CHECK(rk_feasible_at(t, r).feasible);
    CHECK(oracle::closed_form_feasible(t, r));
  }
  for (double r : {8.0 + 1e-6 + 1e-9, 8.1, 10.0, 50.0}) {
    CHECK_FALSE(rk_feasible_at(t, r).feasible);
    CHECK_FALSE(oracle::closed_form_feasible(t, r));
  }
}

TEST_CASE("lp and closed-form feasibility agree on random tableaus") {
  std::mt19937 rng(5150);
  int checked = 0;
  while (checked < 20) {
    const int s = 1 + static_cast<int>(rng() % 2);
    const ShuOsherRep rep = oracle::random_rep(rng, s, false);
    DownwindTableau t;
    try {
      t = shu_osher_to_butcher(rep);
    } catch (const SingularMatrixError&) {
      continue;
    }
    for (double r : {0.3, 0.9, rep.r * 0.999, rep.r * 1.2, rep.r * 3.0}) {
      // Skip near-degenerate parameters where the two routes may disagree on
      // which side of the boundary a 1e-12 entry falls.
      const bool lp = rk_feasible_at(t, r).feasible;
      const bool cf = oracle::closed_form_feasible(t, r, 1e-7);
      const bool cf_tight = oracle::closed_form_feasible(t, r, 1e-12);
      if (cf != cf_tight) continue;
      CHECK(lp == cf);
    }
    ++checked;
  }
}

TEST_CASE("theorem bound: explicit catalog methods stay below the stage count") {
  struct Case { DownwindTableau t; int s; };
  const Case cases[] = {{forward_euler(), 1}, {ssprk22(), 2}, {ssprk33(), 3}};
  for (const Case& c : cases) {
    const double ct = rk_downwind_ssp_coefficient(c.t, 1e-9);
    CHECK(ct <= c.s + 1e-6);
  }
}

TEST_CASE("multistep coefficient closed form") {
  SUBCASE("backward Euler has no binding rows") {
    const double c =
        lmm_downwind_ssp_coefficient(lmm(1, {1.0}, {0.0, 1.0}, {0.0, 0.0}));
    CHECK(std::isinf(c));
  }
  SUBCASE("trapezoidal rule gives two") {
    const double c =
        lmm_downwind_ssp_coefficient(lmm(1, {1.0}, {0.5, 0.5}, {0.0, 0.0}));
    CHECK(c == doctest::Approx(2.0));
  }
  SUBCASE("forward Euler gives one") {
    const double c =
        lmm_downwind_ssp_coefficient(lmm(1, {1.0}, {1.0, 0.0}, {0.0, 0.0}));
    CHECK(c == doctest::Approx(1.0));
  }
  SUBCASE("negative coefficients void the certificate") {
    CHECK(lmm_downwind_ssp_coefficient(
              lmm(1, {1.0}, {-0.1, 1.0}, {0.0, 0.0})) == 0.0);
    CHECK(lmm_downwind_ssp_coefficient(
              lmm(1, {-1.0}, {1.0, 0.0}, {0.0, 0.0})) == 0.0);
  }
}

TEST_CASE("optimal multistep methods") {
  SUBCASE("first-order implicit is effectively unbounded") {
    const auto [m, c] = optimal_lmm(1, 1, true, 1e-8);
    CHECK(c == kSspBracketCap);
    CHECK(lmm_order_residuals(m, 1).cwiseAbs().maxCoeff() <= 1e-9);
  }
  SUBCASE("second order tops out at two, nondecreasing in k") {
    double prev = 0.0;
    for (int k = 1; k <= 6; ++k) {
      const auto [m, c] = optimal_lmm(k, 2, true, 1e-8);
      CHECK(c <= 2.0 + 1e-6);
      CHECK(c >= prev - 1e-6);
      CHECK(lmm_order_residuals(m, 2).cwiseAbs().maxCoeff() <= 1e-9);
      const double direct = lmm_downwind_ssp_coefficient(m);
      CHECK(direct >= c - 1e-6);
      prev = c;
    }
  }
  SUBCASE("k = 1 implicit second order recovers the trapezoidal rule") {
    const auto [m, c] = optimal_lmm(1, 2, true, 1e-9);
    CHECK(c == doctest::Approx(2.0).epsilon(1e-8));
    CHECK(m.alpha(0) == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(m.beta(0) == doctest::Approx(0.5).epsilon(1e-7));
    CHECK(m.beta(1) == doctest::Approx(0.5).epsilon(1e-7));
    CHECK(m.betatilde.cwiseAbs().maxCoeff() <= 1e-9);
  }
  SUBCASE("explicit two-step second order reaches one half") {
    const auto [m, c] = optimal_lmm(2, 2, false, 1e-9);
    CHECK(c == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(c <= 1.0 + 1e-6);
    CHECK(m.is_explicit());
    const double direct = lmm_downwind_ssp_coefficient(m);
    CHECK(direct >= c - 1e-6);
  }
  SUBCASE("downwind pairs are disjoint after the reduction pass") {
    for (int k = 1; k <= 4; ++k) {
      const auto [m, c] = optimal_lmm(k, 2, true, 1e-8);
      for (int j = 0; j <= k; ++j)
        CHECK(m.beta(j) * m.betatilde(j) == doctest::Approx(0.0));
    }
  }
  SUBCASE("order validation") {
    CHECK_THROWS_AS(optimal_lmm(1, 3, true, 1e-8), std::invalid_argument);
    CHECK_THROWS_AS(optimal_lmm(2, 3, false, 1e-8), std::invalid_argument);
    CHECK_THROWS_AS(optimal_lmm(0, 1, true, 1e-8), std::invalid_argument);
    CHECK_THROWS_AS(optimal_lmm(1, 1, true, 0.0), std::invalid_argument);
  }
}

TEST_CASE("amplification expansion of explicit representations") {
  SUBCASE("two-stage optimal explicit pair at r = 1") {
    ShuOsherRep rep;
    rep.s = 2;
    rep.r = 1.0;
    rep.v = VectorXd::Zero(3);
    rep.P = MatrixXd::Zero(3, 2);
    rep.Ptilde = MatrixXd::Zero(3, 2);
    rep.v(0) = 1.0;
    rep.P(1, 0) = 1.0;
    rep.v(2) = 0.5;
    rep.P(2, 1) = 0.5;
    const GammaExpansion g = amplification_gamma(rep);
    CHECK(g.gamma(0, 0) == doctest::Approx(0.5));
    CHECK(g.gamma(1, 0) == doctest::Approx(0.0));
    CHECK(g.gamma(2, 0) == doctest::Approx(0.5));
    CHECK(g.sum() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(verify_stage_bound(g) == doctest::Approx(1.0));
  }
  SUBCASE("forward Euler at r = 1") {
    ShuOsherRep rep;
    rep.s = 1;
    rep.r = 1.0;
    rep.v = VectorXd::Zero(2);
    rep.v(0) = 1.0;
    rep.P = MatrixXd::Zero(2, 1);
    rep.Ptilde = MatrixXd::Zero(2, 1);
    rep.P(1, 0) = 1.0;
    const GammaExpansion g = amplification_gamma(rep);
    CHECK(g.gamma(1, 0) == doctest::Approx(1.0));
    CHECK(g.gamma(0, 0) == doctest::Approx(0.0));
    CHECK(verify_stage_bound(g) == doctest::Approx(1.0));
  }
  SUBCASE("implicit representations are rejected") {
    CHECK_THROWS_AS(amplification_gamma(make_optimal_family(8.0)),
                    NotExplicitError);
  }
  SUBCASE("consistent explicit representations sum to one") {
    std::mt19937 rng(31);
    for (int trial = 0; trial < 30; ++trial) {
      const int s = 1 + static_cast<int>(rng() % 3);
      const ShuOsherRep rep = oracle::random_rep(rng, s, true);
      const GammaExpansion g = amplification_gamma(rep);
      CHECK(g.sum() == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("stage bound equals the certification parameter at the optimum") {
  struct Case { DownwindTableau t; int s; };
  const Case cases[] = {{forward_euler(), 1}, {ssprk22(), 2}, {ssprk33(), 3}};
  for (const Case& c : cases) {
    const double ct = rk_downwind_ssp_coefficient(c.t, 1e-9);
    const FeasibilityResult res = rk_feasible_at(c.t, ct);
    REQUIRE(res.feasible);
    const GammaExpansion g = amplification_gamma(*res.certificate);
    const double bound = verify_stage_bound(g);
    CHECK(bound == doctest::Approx(ct).epsilon(1e-8));
    CHECK(bound <= c.s + 1e-8);
  }
}

TEST_CASE("negative gamma coefficients are rejected") {
  GammaExpansion g;
  g.s = 1;
  g.r = 1.0;
  g.gamma = MatrixXd::Zero(2, 2);
  g.gamma(0, 0) = 1.5;
  g.gamma(1, 0) = -0.5;
  CHECK_THROWS_AS(verify_stage_bound(g), NegativeGammaError);
}
