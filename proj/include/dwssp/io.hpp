#pragma once

#include "dwssp/grid.hpp"
#include "dwssp/methods.hpp"
#include "dwssp/solver.hpp"
#include "dwssp/ssp.hpp"

#include <iosfwd>
#include <string>
#include <variant>

namespace dwssp::io {

/// File-system level failure (open/write/rename), distinct from numerical
/// errors so callers can map it to its own exit code.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shortest decimal form with 17 significant digits; round-trips doubles
/// exactly and is locale independent.
std::string fmt17(double x);

// JSON method documents. Tableaus use fields {"s","A","Atilde","b","btilde",
// "c"} with matrices as flat row-major arrays; multistep methods use
// {"k","alpha","beta","betatilde"}.
std::string tableau_to_json(const DownwindTableau& t);
std::string lmm_to_json(const DownwindLmm& m);
std::string rep_to_json(const ShuOsherRep& rep);

using MethodVariant = std::variant<DownwindTableau, DownwindLmm>;

/// Parse a method document; the "s"/"k" field selects the kind.
/// Throws std::invalid_argument with a field diagnostic on malformed input.
MethodVariant method_from_json(const std::string& text);
MethodVariant load_method_file(const std::string& path);

/// Certification report {"method","r_queried","feasible","certificate",
/// "Ctilde","tolerance"}; certificate is null when infeasible and Ctilde may
/// be the string "unbounded".
std::string certification_report_json(const std::string& method,
                                      double r_queried, bool feasible,
                                      const ShuOsherRep* certificate,
                                      double ctilde, bool ctilde_unbounded,
                                      double tolerance);

// CSV with a header row, '.' decimals and 17 significant digits.
void write_grid_csv(std::ostream& os, const GridFunction& u);   // "x,u"
void write_grid_csv_file(const std::string& path, const GridFunction& u);
GridFunction read_grid_csv(std::istream& is);

void write_trace_csv(std::ostream& os, const MonitorTrace& trace);
void write_trace_csv_file(const std::string& path, const MonitorTrace& trace);

}  // namespace dwssp::io
