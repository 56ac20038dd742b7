#include "maxlab/bench.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>
#include <utility>

#include "maxlab/assembly.hpp"
#include "maxlab/blr.hpp"
#include "maxlab/hx.hpp"
#include "maxlab/krylov.hpp"
#include "maxlab/mesh.hpp"
#include "maxlab/ras.hpp"
#include "maxlab/sparse_lu.hpp"
#include "maxlab/spai.hpp"
#include "maxlab/systems.hpp"

namespace maxlab {

namespace {

struct SolverSpec {
  enum class Family { lu, blr, gmres_none, gmres_spai, gmres_ras, fgmres_hx, fgmres_blr };
  Family family = Family::lu;
  double blr_eps = 1e-5;
  SpaiConfig spai;
  RasConfig ras;
  HxBlockPrecond::Mode hx_mode = HxBlockPrecond::Mode::precond;
};

std::vector<double> parse_params(const std::string& s, size_t at_least, size_t at_most, const std::string& who) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    size_t used = 0;
    double v;
    try {
      v = std::stod(tok, &used);
    } catch (const std::exception&) {
      throw DimensionError("solver spec: bad parameter '" + tok + "' for " + who);
    }
    if (used != tok.size()) throw DimensionError("solver spec: bad parameter '" + tok + "' for " + who);
    out.push_back(v);
  }
  if (out.size() < at_least || out.size() > at_most)
    throw DimensionError("solver spec: " + who + " expects between " + std::to_string(at_least) + " and " +
                         std::to_string(at_most) + " parameters, got " + std::to_string(out.size()));
  return out;
}

SolverSpec parse_solver(const std::string& raw) {
  std::string s;
  for (char c : raw) {
    if (c == '(') s += ':';
    else if (c == ')' || std::isspace(static_cast<unsigned char>(c))) continue;
    else s += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  std::string head = s, args;
  if (const auto colon = s.find(':'); colon != std::string::npos) {
    head = s.substr(0, colon);
    args = s.substr(colon + 1);
  }
  // The krylov wrapper prefix is implied by the preconditioner family.
  if (head.rfind("gmres+", 0) == 0) head = head.substr(6);
  else if (head.rfind("fgmres+", 0) == 0) head = head.substr(7);

  SolverSpec spec;
  if (head == "lu") {
    spec.family = SolverSpec::Family::lu;
    if (!args.empty()) throw DimensionError("solver spec: lu takes no parameters");
  } else if (head == "none" || head == "gmres") {
    spec.family = SolverSpec::Family::gmres_none;
    if (!args.empty()) throw DimensionError("solver spec: gmres+none takes no parameters");
  } else if (head == "blr") {
    // "blr:EPS" is the direct compressed solve; "fgmres+blr:EPS" wraps it.
    spec.family = raw.find("fgmres") != std::string::npos ? SolverSpec::Family::fgmres_blr
                                                          : SolverSpec::Family::blr;
    if (!args.empty()) spec.blr_eps = parse_params(args, 1, 1, "blr")[0];
  } else if (head == "spai") {
    spec.family = SolverSpec::Family::gmres_spai;
    if (!args.empty()) {
      const auto p = parse_params(args, 2, 3, "spai");
      spec.spai.thresh = p[0];
      spec.spai.filter = p[1];
      if (p.size() == 3) spec.spai.m = static_cast<int>(p[2]);
    }
  } else if (head == "ras") {
    spec.family = SolverSpec::Family::gmres_ras;
    if (!args.empty()) {
      const auto p = parse_params(args, 2, 2, "ras");
      spec.ras.n_subdomains = static_cast<int>(p[0]);
      spec.ras.overlap = static_cast<int>(p[1]);
    }
  } else if (head == "hx") {
    spec.family = SolverSpec::Family::fgmres_hx;
    if (args == "precond" || args.empty()) spec.hx_mode = HxBlockPrecond::Mode::precond;
    else if (args == "solver") spec.hx_mode = HxBlockPrecond::Mode::solver;
    else throw DimensionError("solver spec: hx mode must be 'precond' or 'solver'");
  } else {
    throw DimensionError("solver spec: unknown solver '" + raw + "'");
  }
  return spec;
}

// Left-preconditioned GMRES monitors the preconditioned residual, which can
// sit above the true one. Verify against the unpreconditioned system and
// re-run at a tightened tolerance until the true residual meets the target.
template <class T>
SolveReport gmres_to_true_residual(const CsrMatrix<T>& a, const std::vector<T>& b, std::vector<T>& x,
                                   const KrylovOptions& opt, const LinearOperator<T>& precond,
                                   double& true_res) {
  double rtol = opt.rtol;
  SolveReport rep;
  for (int round = 0; round < 4; ++round) {
    KrylovOptions tuned = opt;
    tuned.rtol = rtol;
    rep = gmres(make_operator(a), b, x, tuned, &precond);
    true_res = relative_residual(a, x, b);
    if (!rep.converged || true_res <= opt.rtol || rtol < 1e-15) break;
    rtol /= std::max(10.0, 3.0 * true_res / opt.rtol);
  }
  rep.converged = rep.converged && true_res <= opt.rtol;
  return rep;
}

std::string format_double(double v, const char* fmt) {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, v);
  return buf;
}

}  // namespace

BenchResult run_case(const BenchCase& c) {
  BenchResult res;
  res.def = c;
  if (c.label.empty()) res.def.label = c.solver;
  // A per-case thread override must not leak into the next case.
  struct BudgetGuard {
    int saved = thread_budget();
    ~BudgetGuard() { set_thread_budget(saved); }
  } budget_guard;
  try {
    const SolverSpec spec = parse_solver(c.solver);
    if (c.rtol <= 0 || c.max_iter < 1) throw DimensionError("bench case: rtol and max_iter must be positive");
    if (c.threads > 0) set_thread_budget(c.threads);
    res.n = c.n > 0 ? c.n : cells_for_wavelength(c.k, c.ppw, c.scale);

    Stopwatch setup;
    const Mesh mesh = build_mesh({.n = res.n, .scale = c.scale, .scatterer = true});
    AssemblyOptions aopt;
    aopt.k = c.k;
    const auto source = plane_wave_source(c.k, {0, 0, 1}, {1, 0, 0});
    const MaxwellOperators ops = assemble_operators(mesh, aopt, &source);

    const KrylovOptions kopt{.rtol = c.rtol, .max_iter = c.max_iter, .record_history = c.record_history};
    using Family = SolverSpec::Family;
    res.split = spec.family == Family::gmres_none || spec.family == Family::gmres_spai ||
                spec.family == Family::fgmres_hx;

    if (res.split) {
      const SplitSystem sys = build_split_system(ops);
      res.dofs = sys.A.rows;
      std::vector<double> x;
      SolveReport rep;
      if (spec.family == Family::gmres_none) {
        res.setup_seconds = setup.seconds();
        Stopwatch solve;
        rep = gmres(make_operator(sys.A), sys.b, x, kopt);
        res.solve_seconds = solve.seconds();
        res.true_residual = relative_residual(sys.A, x, sys.b);
      } else if (spec.family == Family::gmres_spai) {
        const SpaiPreconditioner spai = build_spai(sys.A, spec.spai);
        const LinearOperator<double> prec{
            sys.A.rows, [&spai](const std::vector<double>& r, std::vector<double>& y) {
              y.assign(r.size(), 0.0);
              spmv(spai.h, r.data(), y.data());
            }};
        res.setup_seconds = setup.seconds();
        Stopwatch solve;
        rep = gmres_to_true_residual(sys.A, sys.b, x, kopt, prec, res.true_residual);
        res.solve_seconds = solve.seconds();
      } else {
        const HxOperator hx(mesh, ops);
        const HxBlockPrecond block(hx, spec.hx_mode);
        const auto prec = block.as_operator();
        res.setup_seconds = setup.seconds();
        Stopwatch solve;
        rep = fgmres(make_operator(sys.A), sys.b, x, kopt, &prec);
        res.solve_seconds = solve.seconds();
        res.true_residual = relative_residual(sys.A, x, sys.b);
        if (spec.hx_mode == HxBlockPrecond::Mode::precond)
          res.inner = std::to_string(block.inner_iterations_first) + "+" +
                      std::to_string(block.inner_iterations_second);
      }
      res.converged = rep.converged && res.true_residual <= c.rtol;
      res.iterations = rep.iterations;
      res.history = std::move(rep.history);
    } else {
      const ComplexSystem sys = build_complex_system(ops);
      res.dofs = sys.A.rows;
      std::vector<complex_t> x;
      if (spec.family == Family::lu || spec.family == Family::blr) {
        res.direct = true;
        if (spec.family == Family::lu) {
          const LuSolver<complex_t> lu(sys.A);
          res.setup_seconds = setup.seconds();
          Stopwatch solve;
          x = lu.solve(sys.b);
          res.solve_seconds = solve.seconds();
        } else {
          const BlrFactor<complex_t> blr(sys.A, {.epsilon = spec.blr_eps, .block_size = 64});
          res.compression = format_double(blr.compression_ratio(), "%.2f");
          res.setup_seconds = setup.seconds();
          Stopwatch solve;
          x = blr.solve(sys.b);
          res.solve_seconds = solve.seconds();
        }
        res.true_residual = relative_residual(sys.A, x, sys.b);
        res.converged = res.true_residual <= c.rtol;
      } else if (spec.family == Family::gmres_ras) {
        const RasPreconditioner ras(sys.A, spec.ras);
        const auto prec = ras.as_operator();
        res.setup_seconds = setup.seconds();
        Stopwatch solve;
        auto rep = gmres_to_true_residual(sys.A, sys.b, x, kopt, prec, res.true_residual);
        res.solve_seconds = solve.seconds();
        res.converged = rep.converged;
        res.iterations = rep.iterations;
        res.history = std::move(rep.history);
      } else {  // fgmres+blr
        const BlrFactor<complex_t> blr(sys.A, {.epsilon = spec.blr_eps, .block_size = 64});
        res.compression = format_double(blr.compression_ratio(), "%.2f");
        const LinearOperator<complex_t> prec{
            sys.A.rows,
            [&blr](const std::vector<complex_t>& r, std::vector<complex_t>& y) { y = blr.solve(r); }};
        res.setup_seconds = setup.seconds();
        Stopwatch solve;
        auto rep = fgmres(make_operator(sys.A), sys.b, x, kopt, &prec);
        res.solve_seconds = solve.seconds();
        res.true_residual = relative_residual(sys.A, x, sys.b);
        res.converged = rep.converged && res.true_residual <= c.rtol;
        res.iterations = rep.iterations;
        res.history = std::move(rep.history);
      }
    }
    res.maxed = !res.direct && !res.converged && res.iterations >= c.max_iter;
  } catch (const std::exception& e) {
    res.error = e.what();
    res.converged = false;
  }
  return res;
}

std::vector<std::string> suite_names() {
  return {"spai-table", "ras-table", "hx-k1", "hx-k2pi", "blr-table", "hx-vs-blr"};
}

std::vector<BenchCase> suite_cases(const std::string& name) {
  std::vector<BenchCase> cases;
  const double k1 = 1.0, k2pi = 2 * M_PI;
  if (name == "spai-table") {
    // Threshold rows x filter columns at a fixed mesh, split system.
    for (const double thresh : {0.001, 0.01})
      for (const double filter : {0.01, 0.05}) {
        BenchCase c;
        c.k = k2pi;
        c.n = 8;
        c.solver = "gmres+spai:" + format_double(thresh, "%g") + "," + format_double(filter, "%g") + ",3";
        c.label = "thresh=" + format_double(thresh, "%g") + " filter=" + format_double(filter, "%g");
        c.expect_maxed = true;  // loose settings may legitimately stall
        cases.push_back(c);
      }
  } else if (name == "ras-table") {
    // Overlap rows x subdomain-count columns at a fixed mesh.
    for (const int overlap : {1, 2, 3})
      for (const int nsub : {2, 4, 8}) {
        BenchCase c;
        c.k = k2pi;
        c.n = 8;
        c.solver = "gmres+ras:" + std::to_string(nsub) + "," + std::to_string(overlap);
        c.label = "delta=" + std::to_string(overlap) + " N=" + std::to_string(nsub);
        cases.push_back(c);
      }
  } else if (name == "hx-k1" || name == "hx-k2pi") {
    const double k = name == "hx-k1" ? k1 : k2pi;
    const std::vector<int> grids = name == "hx-k1" ? std::vector<int>{4, 8, 12} : std::vector<int>{8, 12};
    for (const int n : grids)
      for (const std::string solver : {"lu", "gmres+none", "fgmres+hx:precond", "fgmres+hx:solver"}) {
        BenchCase c;
        c.k = k;
        c.n = n;
        c.solver = solver;
        c.label = "n=" + std::to_string(n) + " " + solver;
        // The unpreconditioned run converges only on the smallest k=1 mesh.
        c.expect_maxed = solver == "gmres+none" && !(name == "hx-k1" && n == 4);
        cases.push_back(c);
      }
  } else if (name == "blr-table") {
    for (const char* eps : {"1e-9", "1e-5", "1e-3", "5e-3"}) {
      BenchCase c;
      c.k = k2pi;
      c.n = 12;
      c.solver = std::string("fgmres+blr:") + eps;
      c.label = std::string("eps=") + eps;
      cases.push_back(c);
    }
    BenchCase fr;
    fr.k = k2pi;
    fr.n = 12;
    fr.solver = "blr:0";
    fr.label = "FR";
    cases.push_back(fr);
  } else if (name == "hx-vs-blr") {
    const std::vector<std::pair<std::string, std::string>> rows = {
        {"fgmres+blr:1e-3", "BLR(1e-3)"}, {"fgmres+blr:1e-5", "BLR(1e-5)"}, {"blr:0", "FR"},
        {"fgmres+hx:precond", "HX"},      {"fgmres+hx:solver", "HX as solver"},
    };
    for (const auto& [solver, label] : rows) {
      BenchCase c;
      c.k = k2pi;
      c.n = 12;
      c.solver = solver;
      c.label = label;
      cases.push_back(c);
    }
  } else {
    throw DimensionError("unknown suite '" + name + "'; available: spai-table, ras-table, hx-k1, hx-k2pi, blr-table, hx-vs-blr");
  }
  return cases;
}

std::vector<BenchResult> run_suite(const std::string& name) {
  std::vector<BenchResult> results;
  for (const auto& c : suite_cases(name)) results.push_back(run_case(c));
  return results;
}

namespace {

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string iterations_cell(const BenchResult& r) {
  if (!r.error.empty()) return "-";
  if (r.direct) return "-";
  if (r.maxed) return ">" + std::to_string(r.def.max_iter) + "* (" + format_double(r.true_residual, "%.1e") + ")";
  return std::to_string(r.iterations);
}

std::string status_cell(const BenchResult& r) {
  if (!r.error.empty()) return "error: " + r.error;
  if (r.converged) return "converged";
  if (r.maxed) return r.def.expect_maxed ? "maxed (expected)" : "maxed";
  return "stalled";
}

}  // namespace

std::string emit_table(const std::vector<BenchResult>& rows, const std::string& format) {
  if (rows.empty()) throw DimensionError("emit_table: no results");
  if (format != "csv" && format != "markdown") throw DimensionError("emit_table: format must be csv or markdown");

  const bool any_inner = std::any_of(rows.begin(), rows.end(), [](const auto& r) { return !r.inner.empty(); });
  const bool any_comp =
      std::any_of(rows.begin(), rows.end(), [](const auto& r) { return !r.compression.empty(); });

  std::vector<std::string> header = {"case", "k", "n", "dofs", "solver", "iterations"};
  if (any_inner) header.push_back("inner_cg");
  if (any_comp) header.push_back("compression");
  header.insert(header.end(), {"setup_s", "solve_s", "residual", "status"});

  std::vector<std::vector<std::string>> body;
  for (const auto& r : rows) {
    std::vector<std::string> cells = {r.def.label,
                                      format_double(r.def.k, "%g"),
                                      std::to_string(r.n),
                                      std::to_string(r.dofs),
                                      r.def.solver,
                                      iterations_cell(r)};
    if (any_inner) cells.push_back(r.inner.empty() ? "-" : r.inner);
    if (any_comp) cells.push_back(r.compression.empty() ? "-" : r.compression);
    cells.push_back(format_double(r.setup_seconds, "%.3f"));
    cells.push_back(format_double(r.solve_seconds, "%.3f"));
    cells.push_back(r.error.empty() ? format_double(r.true_residual, "%.2e") : "-");
    cells.push_back(status_cell(r));
    body.push_back(std::move(cells));
  }

  std::string out;
  if (format == "csv") {
    for (size_t i = 0; i < header.size(); ++i) out += (i ? "," : "") + csv_escape(header[i]);
    out += "\n";
    for (const auto& cells : body) {
      for (size_t i = 0; i < cells.size(); ++i) out += (i ? "," : "") + csv_escape(cells[i]);
      out += "\n";
    }
  } else {
    auto row = [&out](const std::vector<std::string>& cells) {
      out += "|";
      for (const auto& c : cells) out += " " + c + " |";
      out += "\n";
    };
    row(header);
    out += "|";
    for (size_t i = 0; i < header.size(); ++i) out += "---|";
    out += "\n";
    for (const auto& cells : body) row(cells);
  }
  return out;
}

namespace {

void apply_toml_key(BenchCase& c, const std::string& key, const std::string& value, int line_no) {
  const auto bad = [&](const std::string& why) {
    throw IoError("config line " + std::to_string(line_no) + ": " + why);
  };
  const auto as_number = [&]() {
    size_t used = 0;
    double v = 0;
    try {
      v = std::stod(value, &used);
    } catch (const std::exception&) {
      bad("expected a number for '" + key + "', got " + value);
    }
    if (used != value.size()) bad("expected a number for '" + key + "', got " + value);
    return v;
  };
  const auto as_string = [&]() {
    if (value.size() < 2 || value.front() != '"' || value.back() != '"')
      bad("expected a quoted string for '" + key + "'");
    return value.substr(1, value.size() - 2);
  };
  const auto as_bool = [&]() {
    if (value == "true") return true;
    if (value == "false") return false;
    bad("expected true or false for '" + key + "'");
    return false;
  };

  if (key == "label") c.label = as_string();
  else if (key == "solver") c.solver = as_string();
  else if (key == "k") c.k = as_number();
  else if (key == "ppw") c.ppw = as_number();
  else if (key == "scale") c.scale = as_number();
  else if (key == "n") c.n = static_cast<int>(as_number());
  else if (key == "rtol") c.rtol = as_number();
  else if (key == "max_iter") c.max_iter = static_cast<int>(as_number());
  else if (key == "threads") c.threads = static_cast<int>(as_number());
  else if (key == "expect_maxed") c.expect_maxed = as_bool();
  else bad("unknown key '" + key + "'");
}

std::string strip(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

}  // namespace

std::vector<BenchCase> parse_cases_toml(const std::string& text) {
  std::vector<BenchCase> cases;
  bool in_case = false;
  std::istringstream ss(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(ss, raw)) {
    ++line_no;
    // Strip comments outside of quotes, then whitespace.
    std::string line;
    bool quoted = false;
    for (char ch : raw) {
      if (ch == '"') quoted = !quoted;
      if (ch == '#' && !quoted) break;
      line += ch;
    }
    line = strip(line);
    if (line.empty()) continue;
    if (line == "[[case]]") {
      cases.emplace_back();
      in_case = true;
      continue;
    }
    if (line.front() == '[') throw IoError("config line " + std::to_string(line_no) + ": only [[case]] tables are supported");
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw IoError("config line " + std::to_string(line_no) + ": expected key = value");
    if (!in_case) throw IoError("config line " + std::to_string(line_no) + ": key outside of a [[case]] table");
    apply_toml_key(cases.back(), strip(line.substr(0, eq)), strip(line.substr(eq + 1)), line_no);
  }
  return cases;
}

}  // namespace maxlab
