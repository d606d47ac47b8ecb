#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "dwssp/experiments.hpp"
#include "dwssp/io.hpp"
#include "dwssp/ssp.hpp"

#include <cmath>
#include <sstream>

using namespace dwssp;

TEST_CASE("fmt17 round-trips doubles exactly") {
  for (double x : {1.0 / 3.0, 0.1, 1e-300, 6.5, -0.0, 3.141592653589793}) {
    CHECK(std::stod(io::fmt17(x)) == x);
  }
  CHECK(io::fmt17(1.0) == "1");
  CHECK(io::fmt17(6.5) == "6.5");
}

TEST_CASE("trace csv layout") {
  MonitorTrace trace;
  trace.append({0, 0.0, 2.0, 1.0, 0, 0.0});
  trace.append({1, 0.5, 1.5, 0.75, 3, 1e-11});
  std::stringstream ss;
  io::write_trace_csv(ss, trace);
  std::string line;
  std::getline(ss, line);
  CHECK(line == "step,t,tv,maxnorm,newton_iters,residual");
  std::getline(ss, line);
  CHECK(line == "0,0,2,1,0,0");
  std::getline(ss, line);
  CHECK(line.rfind("1,0.5,1.5,0.75,3,", 0) == 0);
}

TEST_CASE("trace times must increase") {
  MonitorTrace trace;
  trace.append({0, 0.0, 1.0, 1.0, 0, 0.0});
  CHECK_THROWS_AS(trace.append({1, 0.0, 1.0, 1.0, 0, 0.0}), std::logic_error);
}

TEST_CASE("csv output is byte-identical across writes") {
  const SquareWaveResult res = run_square_wave(0.9, 32);
  std::stringstream a, b;
  io::write_grid_csv(a, res.runs[0].solution);
  io::write_grid_csv(b, res.runs[0].solution);
  CHECK(a.str() == b.str());

  std::stringstream ta, tb;
  io::write_trace_csv(ta, res.runs[0].trace);
  io::write_trace_csv(tb, res.runs[0].trace);
  CHECK(ta.str() == tb.str());
}

TEST_CASE("repeated runs produce identical traces and solutions") {
  const SquareWaveResult r1 = run_square_wave(0.9, 32);
  const SquareWaveResult r2 = run_square_wave(0.9, 32);
  for (size_t i = 0; i < r1.runs.size(); ++i) {
    CHECK((r1.runs[i].solution.values - r2.runs[i].solution.values)
              .cwiseAbs()
              .maxCoeff() == 0.0);
    std::stringstream a, b;
    io::write_trace_csv(a, r1.runs[i].trace);
    io::write_trace_csv(b, r2.runs[i].trace);
    CHECK(a.str() == b.str());
  }
}

TEST_CASE("certification report json") {
  const FeasibilityResult res = rk_feasible_at(family_tableau(8.0), 8.0);
  REQUIRE(res.feasible);
  const std::string doc = io::certification_report_json(
      "dw-family:8", 8.0, true, &*res.certificate, 8.0, false, 1e-8);
  CHECK(doc.find("\"method\": \"dw-family:8\"") != std::string::npos);
  CHECK(doc.find("\"feasible\": true") != std::string::npos);
  CHECK(doc.find("\"Ctilde\": 8.0") != std::string::npos);
  CHECK(doc.find("\"certificate\"") != std::string::npos);

  const std::string unb = io::certification_report_json(
      "backward-euler", 0.0, true, nullptr, 0.0, true, 1e-8);
  CHECK(unb.find("\"Ctilde\": \"unbounded\"") != std::string::npos);
  CHECK(unb.find("\"certificate\": null") != std::string::npos);
}

TEST_CASE("experiment spec json names the problem and scheme") {
  ExperimentSpec spec;
  spec.problem = Problem::Burgers;
  spec.n = 512;
  spec.cfl = 6.5;
  spec.t_end = 0.16;
  spec.spatial = SpatialScheme::Weno5;
  spec.methods = {"backward-euler"};
  const std::string doc = spec_to_json(spec);
  CHECK(doc.find("\"problem\": \"burgers\"") != std::string::npos);
  CHECK(doc.find("\"spatial\": \"weno5\"") != std::string::npos);
  CHECK(doc.find("\"cfl\": 6.5") != std::string::npos);
}
