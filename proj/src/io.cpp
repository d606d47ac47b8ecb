#include "dwssp/io.hpp"

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>

namespace dwssp::io {

using nlohmann::json;

std::string fmt17(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

namespace {

json vec_to_json(const Eigen::VectorXd& v) {
  json a = json::array();
  for (long i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

json mat_to_json(const Eigen::MatrixXd& m) {
  json a = json::array();
  for (long i = 0; i < m.rows(); ++i)
    for (long j = 0; j < m.cols(); ++j) a.push_back(m(i, j));
  return a;
}

Eigen::VectorXd vec_from_json(const json& j, const char* field, long size) {
  if (!j.is_array() || static_cast<long>(j.size()) != size)
    throw std::invalid_argument(std::string("method json: field '") + field +
                                "' must be an array of length " +
                                std::to_string(size));
  Eigen::VectorXd v(size);
  for (long i = 0; i < size; ++i) {
    if (!j[i].is_number())
      throw std::invalid_argument(std::string("method json: field '") + field +
                                  "' has a non-numeric entry at index " +
                                  std::to_string(i));
    v(i) = j[i].get<double>();
  }
  return v;
}

Eigen::MatrixXd mat_from_json(const json& j, const char* field, long rows,
                              long cols) {
  const Eigen::VectorXd flat = vec_from_json(j, field, rows * cols);
  Eigen::MatrixXd m(rows, cols);
  for (long i = 0; i < rows; ++i)
    for (long c = 0; c < cols; ++c) m(i, c) = flat(i * cols + c);
  return m;
}

const json& require(const json& j, const char* field) {
  auto it = j.find(field);
  if (it == j.end())
    throw std::invalid_argument(std::string("method json: missing field '") +
                                field + "'");
  return *it;
}

}  // namespace

std::string tableau_to_json(const DownwindTableau& t) {
  json j;
  j["s"] = t.s;
  j["A"] = mat_to_json(t.A);
  j["Atilde"] = mat_to_json(t.Atilde);
  j["b"] = vec_to_json(t.b);
  j["btilde"] = vec_to_json(t.btilde);
  j["c"] = vec_to_json(t.c);
  return j.dump(2);
}

std::string lmm_to_json(const DownwindLmm& m) {
  json j;
  j["k"] = m.k;
  j["alpha"] = vec_to_json(m.alpha);
  j["beta"] = vec_to_json(m.beta);
  j["betatilde"] = vec_to_json(m.betatilde);
  return j.dump(2);
}

std::string rep_to_json(const ShuOsherRep& rep) {
  json j;
  j["s"] = rep.s;
  j["r"] = rep.r;
  j["v"] = vec_to_json(rep.v);
  j["P"] = mat_to_json(rep.P);
  j["Ptilde"] = mat_to_json(rep.Ptilde);
  return j.dump(2);
}

MethodVariant method_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("method json: parse error: ") +
                                e.what());
  }
  if (!j.is_object())
    throw std::invalid_argument("method json: top level must be an object");

  if (j.contains("s")) {
    const int s = require(j, "s").get<int>();
    if (s < 1) throw std::invalid_argument("method json: s must be positive");
    DownwindTableau t;
    t.s = s;
    t.A = mat_from_json(require(j, "A"), "A", s, s);
    t.Atilde = mat_from_json(require(j, "Atilde"), "Atilde", s, s);
    t.b = vec_from_json(require(j, "b"), "b", s);
    t.btilde = vec_from_json(require(j, "btilde"), "btilde", s);
    t.c = vec_from_json(require(j, "c"), "c", s);
    return t;
  }
  if (j.contains("k")) {
    const int k = require(j, "k").get<int>();
    if (k < 1) throw std::invalid_argument("method json: k must be positive");
    DownwindLmm m;
    m.k = k;
    m.alpha = vec_from_json(require(j, "alpha"), "alpha", k);
    m.beta = vec_from_json(require(j, "beta"), "beta", k + 1);
    m.betatilde = vec_from_json(require(j, "betatilde"), "betatilde", k + 1);
    return m;
  }
  throw std::invalid_argument(
      "method json: need either 's' (Runge-Kutta) or 'k' (multistep)");
}

MethodVariant load_method_file(const std::string& path) {
  std::ifstream in(path);
  if (!in)
    throw IoError("load_method_file: cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return method_from_json(ss.str());
}

std::string certification_report_json(const std::string& method,
                                      double r_queried, bool feasible,
                                      const ShuOsherRep* certificate,
                                      double ctilde, bool ctilde_unbounded,
                                      double tolerance) {
  json j;
  j["method"] = method;
  j["r_queried"] = r_queried;
  j["feasible"] = feasible;
  if (certificate) {
    json c;
    c["s"] = certificate->s;
    c["r"] = certificate->r;
    c["v"] = vec_to_json(certificate->v);
    c["P"] = mat_to_json(certificate->P);
    c["Ptilde"] = mat_to_json(certificate->Ptilde);
    j["certificate"] = c;
  } else {
    j["certificate"] = nullptr;
  }
  if (ctilde_unbounded)
    j["Ctilde"] = "unbounded";
  else
    j["Ctilde"] = ctilde;
  j["tolerance"] = tolerance;
  return j.dump(2);
}

void write_grid_csv(std::ostream& os, const GridFunction& u) {
  os << "x,u\n";
  for (int i = 0; i < u.grid.n; ++i)
    os << fmt17(u.grid.node(i)) << ',' << fmt17(u.values(i)) << '\n';
}

void write_grid_csv_file(const std::string& path, const GridFunction& u) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  write_grid_csv(out, u);
}

GridFunction read_grid_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line.rfind("x,u", 0) != 0)
    throw std::invalid_argument("grid csv: missing 'x,u' header");
  std::vector<double> vals;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos)
      throw std::invalid_argument("grid csv: malformed row '" + line + "'");
    vals.push_back(std::stod(line.substr(comma + 1)));
  }
  if (vals.size() < 2) throw std::invalid_argument("grid csv: too few rows");
  PeriodicGrid g(static_cast<int>(vals.size()));
  Eigen::VectorXd v(g.n);
  for (int i = 0; i < g.n; ++i) v(i) = vals[static_cast<size_t>(i)];
  return GridFunction(g, v);
}

void write_trace_csv(std::ostream& os, const MonitorTrace& trace) {
  os << "step,t,tv,maxnorm,newton_iters,residual\n";
  for (const MonitorRecord& r : trace.records) {
    os << r.step << ',' << fmt17(r.t) << ',' << fmt17(r.tv) << ','
       << fmt17(r.maxnorm) << ',' << r.newton_iters << ',' << fmt17(r.residual)
       << '\n';
  }
}

void write_trace_csv_file(const std::string& path, const MonitorTrace& trace) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  write_trace_csv(out, trace);
}

}  // namespace dwssp::io
