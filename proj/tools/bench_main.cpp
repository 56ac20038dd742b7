// Command-line front end: runs benchmark suites and single cases, exports
// the assembled operators, and dumps diagnostics (residual histories,
// partition maps, factor statistics).
#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "maxlab/assembly.hpp"
#include "maxlab/bench.hpp"
#include "maxlab/blr.hpp"
#include "maxlab/krylov.hpp"
#include "maxlab/matrix_market.hpp"
#include "maxlab/mesh.hpp"
#include "maxlab/ras.hpp"
#include "maxlab/sparse_lu.hpp"
#include "maxlab/systems.hpp"

namespace {

using namespace maxlab;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << text;
}

// Pick csv unless asked otherwise or the output file says .md.
std::string pick_format(const std::string& format_flag, const std::string& out_path) {
  if (!format_flag.empty()) return format_flag;
  if (out_path.size() > 3 && out_path.substr(out_path.size() - 3) == ".md") return "markdown";
  return "csv";
}

MaxwellOperators assemble_for(int n, double k, double scale) {
  const Mesh mesh = build_mesh({.n = n, .scale = scale, .scatterer = true});
  AssemblyOptions opt;
  opt.k = k;
  const auto source = plane_wave_source(k, {0, 0, 1}, {1, 0, 0});
  return assemble_operators(mesh, opt, &source);
}

int emit_and_report(const std::vector<BenchResult>& results, const std::string& format_flag,
                    const std::string& out_path) {
  const std::string table = emit_table(results, pick_format(format_flag, out_path));
  if (out_path.empty()) {
    std::cout << table;
  } else {
    write_file(out_path, table);
    std::cout << "wrote " << out_path << "\n";
  }
  int bad = 0;
  for (const auto& r : results)
    if (!r.ok()) ++bad;
  if (bad) std::cerr << bad << " case(s) failed or stalled unexpectedly\n";
  return bad ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Time-harmonic Maxwell solver benchmarks"};
  app.require_subcommand(1);

  // ---- bench run ---------------------------------------------------------
  std::string run_suite_name, run_config, run_out, run_format;
  int run_threads = 0;
  double run_rtol = 0;
  int run_max_iter = 0;
  auto* run = app.add_subcommand("run", "Run a named suite or a TOML config of cases");
  run->add_option("--suite", run_suite_name, "Suite: spai-table, ras-table, hx-k1, hx-k2pi, blr-table, hx-vs-blr");
  run->add_option("--config", run_config, "TOML file with [[case]] tables");
  run->add_option("--out", run_out, "Write the table to this file instead of stdout");
  run->add_option("--format", run_format, "Table format: csv or markdown")
      ->check(CLI::IsMember({"csv", "markdown"}));
  run->add_option("--threads", run_threads, "Thread budget for this run");
  run->add_option("--rtol", run_rtol, "Override the relative residual target");
  run->add_option("--max-iter", run_max_iter, "Override the iteration cap");

  // ---- bench solve -------------------------------------------------------
  BenchCase one;
  std::string solve_out, solve_format, solve_history;
  auto* solve = app.add_subcommand("solve", "Assemble and solve a single configuration");
  solve->add_option("--k", one.k, "Wavenumber");
  solve->add_option("--ppw", one.ppw, "Points per wavelength");
  solve->add_option("--scale", one.scale, "Cube edge length");
  solve->add_option("--n", one.n, "Cells per axis (overrides --ppw)");
  solve->add_option("--solver", one.solver, "Solver spec, e.g. lu, hx:precond, spai:0.001,0.01,3");
  solve->add_option("--rtol", one.rtol, "Relative residual target");
  solve->add_option("--max-iter", one.max_iter, "Iteration cap");
  solve->add_option("--threads", one.threads, "Thread budget");
  solve->add_option("--out", solve_out, "Write the one-row table to this file");
  solve->add_option("--format", solve_format, "Table format: csv or markdown")
      ->check(CLI::IsMember({"csv", "markdown"}));
  solve->add_option("--history", solve_history, "Write iteration,residual history CSV here");

  // ---- bench export-matrices ---------------------------------------------
  int exp_n = 4;
  double exp_k = 2 * M_PI, exp_scale = 1.0;
  std::string exp_dir = ".";
  auto* exp = app.add_subcommand("export-matrices", "Write C, M, B, G, Pcurl and the right-hand side as Matrix Market files");
  exp->add_option("--n", exp_n, "Cells per axis");
  exp->add_option("--k", exp_k, "Wavenumber");
  exp->add_option("--scale", exp_scale, "Cube edge length");
  exp->add_option("--dir", exp_dir, "Output directory");

  // ---- bench export-mesh ---------------------------------------------------
  int mesh_n = 4;
  double mesh_scale = 1.0;
  std::string mesh_out = "mesh.txt";
  auto* expm = app.add_subcommand("export-mesh", "Write the mesh as plain-text entity lists");
  expm->add_option("--n", mesh_n, "Cells per axis");
  expm->add_option("--scale", mesh_scale, "Cube edge length");
  expm->add_option("--out", mesh_out, "Output path");

  // ---- bench partition -----------------------------------------------------
  int part_n = 8, part_sub = 4, part_overlap = 2;
  double part_k = 2 * M_PI;
  std::string part_out = "partition.csv";
  auto* part = app.add_subcommand("partition", "Dump the Schwarz partition as dof,subdomain CSV");
  part->add_option("--n", part_n, "Cells per axis");
  part->add_option("--k", part_k, "Wavenumber");
  part->add_option("--subdomains", part_sub, "Number of subdomains");
  part->add_option("--overlap", part_overlap, "Layers of overlap");
  part->add_option("--out", part_out, "Output path");

  // ---- bench blr-stats -----------------------------------------------------
  int stats_n = 8;
  double stats_k = 2 * M_PI, stats_eps = 1e-5;
  std::string stats_out = "blr-stats.csv";
  auto* stats = app.add_subcommand("blr-stats", "Dump per-block factor statistics as CSV");
  stats->add_option("--n", stats_n, "Cells per axis");
  stats->add_option("--k", stats_k, "Wavenumber");
  stats->add_option("--eps", stats_eps, "Compression threshold");
  stats->add_option("--out", stats_out, "Output path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      if (run_suite_name.empty() == run_config.empty()) {
        std::cerr << "run: pass exactly one of --suite or --config\n";
        return 2;
      }
      std::vector<BenchCase> cases =
          run_config.empty() ? suite_cases(run_suite_name) : parse_cases_toml(read_file(run_config));
      for (auto& c : cases) {
        if (run_threads > 0) c.threads = run_threads;
        if (run_rtol > 0) c.rtol = run_rtol;
        if (run_max_iter > 0) c.max_iter = run_max_iter;
      }
      std::vector<BenchResult> results;
      results.reserve(cases.size());
      for (const auto& c : cases) {
        results.push_back(run_case(c));
        const auto& r = results.back();
        std::cerr << r.def.label << ": " << (r.error.empty() ? (r.converged ? "converged" : "not converged") : r.error)
                  << "\n";
      }
      return emit_and_report(results, run_format, run_out);
    }

    if (*solve) {
      one.record_history = !solve_history.empty();
      const BenchResult result = run_case(one);
      if (!solve_history.empty()) {
        if (result.direct) {
          std::cerr << "--history applies to iterative solvers only\n";
        } else {
          std::ostringstream hist;
          hist << "iteration,residual\n";
          for (size_t i = 0; i < result.history.size(); ++i) hist << i << "," << result.history[i] << "\n";
          write_file(solve_history, hist.str());
          std::cout << "wrote " << solve_history << "\n";
        }
      }
      return emit_and_report({result}, solve_format, solve_out);
    }

    if (*exp) {
      const Mesh mesh = build_mesh({.n = exp_n, .scale = exp_scale, .scatterer = true});
      AssemblyOptions aopt;
      aopt.k = exp_k;
      const auto source = plane_wave_source(exp_k, {0, 0, 1}, {1, 0, 0});
      const MaxwellOperators ops = assemble_operators(mesh, aopt, &source);
      std::filesystem::create_directories(exp_dir);
      const auto dir = std::filesystem::path(exp_dir);
      write_matrix_market((dir / "C.mtx").string(), ops.C);
      write_matrix_market((dir / "M.mtx").string(), ops.M);
      write_matrix_market((dir / "B.mtx").string(), ops.B);
      write_matrix_market((dir / "G.mtx").string(), ops.G);
      write_matrix_market((dir / "Pcurl.mtx").string(), nodal_to_edge_interpolation(mesh, ops));
      write_matrix_market_vector((dir / "s_re.mtx").string(), ops.s_re);
      write_matrix_market_vector((dir / "s_im.mtx").string(), ops.s_im);
      std::cout << "wrote C, M, B, G, Pcurl, s_re, s_im to " << exp_dir << "\n";
      return 0;
    }

    if (*expm) {
      write_mesh_text(mesh_out, build_mesh({.n = mesh_n, .scale = mesh_scale, .scatterer = true}));
      std::cout << "wrote " << mesh_out << "\n";
      return 0;
    }

    if (*part) {
      const MaxwellOperators ops = assemble_for(part_n, part_k, 1.0);
      const ComplexSystem sys = build_complex_system(ops);
      const RasPreconditioner ras(sys.A, {.n_subdomains = part_sub, .overlap = part_overlap});
      std::ostringstream csv;
      csv << "dof,subdomain\n";
      const auto& owner = ras.partition().owner;
      for (size_t i = 0; i < owner.size(); ++i) csv << i << "," << owner[i] << "\n";
      write_file(part_out, csv.str());
      std::cout << "wrote " << part_out << "\n";
      return 0;
    }

    if (*stats) {
      const MaxwellOperators ops = assemble_for(stats_n, stats_k, 1.0);
      const ComplexSystem sys = build_complex_system(ops);
      const BlrFactor<complex_t> factor(sys.A, {.epsilon = stats_eps, .block_size = 64});
      std::ostringstream csv;
      csv << "block_row,block_col,kind,rows,cols,rank,entries\n";
      for (const auto& st : factor.block_stats())
        csv << st.bi << "," << st.bj << "," << (st.low_rank ? "lowrank" : "dense") << "," << st.rows << ","
            << st.cols << "," << st.rank << "," << st.entries << "\n";
      csv << "# stored_entries," << factor.stored_entries_blr() << ",full_rank," << factor.stored_entries_fr()
          << ",compression," << factor.compression_ratio() << "\n";
      write_file(stats_out, csv.str());
      std::cout << "wrote " << stats_out << " (compression " << factor.compression_ratio() << ")\n";
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
