#pragma once

#include <string>
#include <vector>

#include "maxlab/types.hpp"

namespace maxlab {

// One benchmark problem: a mesh resolution, a wavenumber, and a solver
// configuration written as a compact spec string:
//
//   lu                      complex-system sparse LU (direct)
//   blr:EPS                 compressed block LU applied directly
//   gmres+none              unpreconditioned GMRES on the split system
//   gmres+spai:T,F[,M]      GMRES with the approximate-inverse preconditioner
//   gmres+ras:N,D           GMRES with restricted additive Schwarz (N subdomains,
//                           D layers of overlap) on the complex system
//   fgmres+hx:precond       FGMRES, block preconditioner with inner CG driven
//                           by the auxiliary-space operator
//   fgmres+hx:solver        same block, one auxiliary-space apply per half
//   fgmres+blr:EPS          FGMRES right-preconditioned by the compressed LU
//
// The leading "gmres+"/"fgmres+" may be dropped; "blr(1e-5)"-style parentheses
// are accepted as well.
struct BenchCase {
  std::string label;  // row label in emitted tables; defaults to the solver spec
  double k = 2 * M_PI;
  double ppw = 10.0;
  double scale = 1.0;
  int n = 0;  // cells per axis; 0 derives the finest-needed grid from k and ppw
  std::string solver = "lu";
  double rtol = 1e-8;
  int max_iter = 1000;
  int threads = 0;           // >0 overrides the global thread budget for this case
  bool expect_maxed = false;  // non-convergence is an anticipated outcome
  bool record_history = false;  // keep the per-iteration residual curve
};

struct BenchResult {
  BenchCase def;
  int n = 0;          // resolved cells per axis
  index_t dofs = 0;   // rows of the system actually solved
  bool split = false;
  bool direct = false;  // direct solves carry no iteration count
  bool converged = false;
  bool maxed = false;
  int iterations = 0;
  double setup_seconds = 0;
  double solve_seconds = 0;
  double true_residual = 0;
  std::string inner;        // inner CG totals per half, e.g. "112+112"
  std::string compression;  // factor compression ratio, e.g. "1.31"
  std::string error;        // nonempty if setup or solve failed outright
  std::vector<double> history;  // per-iteration monitored residuals, if recorded

  // A case is acceptable when it converged or was expected not to.
  bool ok() const { return error.empty() && (converged || (maxed && def.expect_maxed)); }
};

// Assembles the problem and runs the configured solver. Failures of any kind
// (bad solver spec, setup errors, singular factorizations) are recorded in
// the result's error field rather than thrown, so suites keep running.
BenchResult run_case(const BenchCase& c);

std::vector<std::string> suite_names();
std::vector<BenchCase> suite_cases(const std::string& name);

// Runs every case of a named suite, in declaration order.
std::vector<BenchResult> run_suite(const std::string& name);

// Renders results as "csv" or "markdown". Non-converged iteration cells are
// rendered ">MAX*" with the reached residual in parentheses; columns that are
// empty for every row (inner iterations, compression) are omitted.
std::string emit_table(const std::vector<BenchResult>& rows, const std::string& format);

// Parses [[case]] arrays from a TOML subset: comments, strings, numbers,
// booleans. Unknown keys are rejected.
std::vector<BenchCase> parse_cases_toml(const std::string& text);

}  // namespace maxlab
