// Acceptance gate: runs every shipping criterion at its stated tolerance and
// prints one PASS/FAIL line per criterion. Exit code is the number of
// failures, so `ctest` goes red if any criterion regresses.
//
// Expensive solver sweeps are shared: the k=2pi auxiliary-space sweep feeds
// the robustness, mode-ordering, k-degradation, and failure criteria; the
// compressed-LU ladder and the Schwarz sweeps likewise feed the final
// preconditioned-vs-plain comparison.

#include <algorithm>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "maxlab/assembly.hpp"
#include "maxlab/bench.hpp"
#include "maxlab/csr.hpp"
#include "maxlab/hx.hpp"
#include "maxlab/krylov.hpp"
#include "maxlab/mesh.hpp"
#include "maxlab/spai.hpp"
#include "maxlab/sparse_lu.hpp"
#include "maxlab/systems.hpp"
#include "maxlab/types.hpp"

#include "support/fields.hpp"

using namespace maxlab;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, ...) {
  va_list ap;
  va_start(ap, f);
  char buf[512];
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

// Results shared between criteria so expensive sweeps run once.
struct Shared {
  std::vector<BenchResult> hx_precond;   // n = 8, 12, 16 at k = 2pi
  std::vector<BenchResult> hx_solver;    // same grid, solver mode
  std::optional<BenchResult> k4pi;       // k = 4pi at ppw 10
  std::vector<BenchResult> blr_ladder;   // eps ladder at n = 12
  std::vector<BenchResult> ras_rows;     // the five trend cases at n = 8
};

BenchCase make_case(int n, double k, const std::string& solver) {
  BenchCase c;
  c.n = n;
  c.k = k;
  c.solver = solver;
  c.label = solver;
  return c;
}

// Weak monotonicity with at most one inversion of at most 10% of the
// preceding value ("increasing": each next >= previous).
bool weakly_monotone(const std::vector<int>& v, bool increasing, std::string& note) {
  int inversions = 0;
  for (size_t i = 1; i < v.size(); ++i) {
    const double prev = v[i - 1], cur = v[i];
    const double slack = increasing ? prev - cur : cur - prev;  // > 0 means inverted
    if (slack <= 0) continue;
    ++inversions;
    if (slack > 0.10 * prev) {
      note = fmt("inversion %g -> %g exceeds 10%%", prev, cur);
      return false;
    }
  }
  if (inversions > 1) {
    note = fmt("%d inversions (at most one allowed)", inversions);
    return false;
  }
  return true;
}

std::string join_iters(const std::vector<BenchResult>& rows) {
  std::string s;
  for (const auto& r : rows) {
    if (!s.empty()) s += "/";
    s += r.converged ? std::to_string(r.iterations) : (">" + std::to_string(r.iterations));
  }
  return s;
}

double l2(const std::vector<complex_t>& v) {
  double s = 0;
  for (const auto& z : v) s += std::norm(z);
  return std::sqrt(s);
}

// --- criterion 1: discrete identities ---------------------------------------

Outcome criterion_identities() {
  double worst_cg = 0, worst_gmg = 0;
  const double k = 2 * M_PI;
  for (const int n : {4, 8, 12}) {
    const Mesh m = build_mesh({n, 1.0, true});
    const auto ops = assemble_operators(m, {k, 1.0, 1.0, 1.0}, nullptr);
    const auto cg = matmul(ops.C, ops.G);
    worst_cg = std::max(worst_cg,
                        cg.frobenius_norm() / (ops.C.frobenius_norm() * ops.G.frobenius_norm()));
    const auto gmg = matmul(transpose(ops.G), matmul(ops.M, ops.G));
    const auto diff = add(1.0, gmg, -k * k, ops.lap_scalar);
    worst_gmg =
        std::max(worst_gmg, diff.frobenius_norm() / (k * k * ops.lap_scalar.frobenius_norm()));
  }
  Outcome o;
  o.pass = worst_cg <= 1e-12 && worst_gmg <= 1e-12;
  o.detail = fmt("n=4,8,12: |C G| rel %.1e, |G^T M G - k^2 L| rel %.1e (tol 1e-12)", worst_cg,
                 worst_gmg);
  return o;
}

// --- criterion 2: split/complex equivalence ----------------------------------

Outcome criterion_split_equivalence() {
  const double k = 2 * M_PI;
  const Mesh m = build_mesh({8, 1.0, true});
  const auto src = plane_wave_source(k, {0, 0, 1}, {1, 0, 0});
  const auto ops = assemble_operators(m, {k, 1.0, 1.0, 1.0}, &src);
  const auto csys = build_complex_system(ops);
  const auto ssys = build_split_system(ops);
  const auto xc = sparse_lu(csys.A).solve(csys.b);
  const auto xs = sparse_lu(ssys.A).solve(ssys.b);
  const auto xsc = split_to_complex(xs);
  std::vector<complex_t> diff(xc.size());
  for (size_t i = 0; i < xc.size(); ++i) diff[i] = xsc[i] - xc[i];
  const double rel = l2(diff) / l2(xc);
  Outcome o;
  o.pass = rel <= 1e-6;
  o.detail = fmt("n=8 k=2pi via LU: |(E_R+iE_I) - E_complex|/|E_complex| = %.2e (tol 1e-6)", rel);
  return o;
}

// --- criterion 3: exactness degenerations ------------------------------------

Outcome criterion_degenerations() {
  const double k = 2 * M_PI;
  const auto ras = run_case(make_case(4, k, "gmres+ras:1,1"));
  const auto blr = run_case(make_case(4, k, "fgmres+blr:0"));

  // An approximate inverse of a diagonal matrix is its exact inverse, so the
  // preconditioned iteration finishes in one step.
  const index_t n = 64;
  CsrBuilder<double> bld(n, n);
  for (index_t i = 0; i < n; ++i) bld.add(i, i, 1.0 + 0.3 * (i % 7));
  const auto d = bld.build();
  const auto sp = build_spai(d, SpaiConfig{});
  std::vector<double> rhs(static_cast<size_t>(n));
  for (index_t i = 0; i < n; ++i) rhs[static_cast<size_t>(i)] = std::sin(i + 1.0);
  KrylovOptions ko;
  ko.rtol = 1e-12;
  std::vector<double> x(rhs.size(), 0.0);
  const auto aop = make_operator(d);
  const auto hop = make_operator(sp.h);
  const auto rep = gmres(aop, rhs, x, ko, &hop);

  Outcome o;
  const bool ras_ok = ras.error.empty() && ras.converged && ras.iterations <= 2;
  const bool blr_ok = blr.error.empty() && blr.converged && blr.iterations == 1;
  const bool spai_ok = rep.converged && rep.iterations == 1;
  o.pass = ras_ok && blr_ok && spai_ok;
  o.detail = fmt("single-domain RAS %d iters (<=2), eps=0 BLR %d iter (==1), diagonal SPAI %d iter (==1)",
                 ras.iterations, blr.iterations, rep.iterations);
  return o;
}

// --- criterion 4: BLR accuracy/compression ladder ----------------------------

Outcome criterion_blr_ladder(Shared& sh) {
  const double k = 2 * M_PI;
  std::vector<double> comp;
  for (const char* eps : {"1e-9", "1e-5", "1e-3", "5e-3"}) {
    auto r = run_case(make_case(12, k, std::string("fgmres+blr:") + eps));
    if (!r.error.empty() || !r.converged)
      return {false, fmt("eps=%s did not converge (%s)", eps, r.error.c_str())};
    comp.push_back(std::stod(r.compression));
    sh.blr_ladder.push_back(std::move(r));
  }
  bool iters_mono = true, comp_mono = true;
  for (size_t i = 1; i < sh.blr_ladder.size(); ++i) {
    iters_mono &= sh.blr_ladder[i].iterations >= sh.blr_ladder[i - 1].iterations;
    comp_mono &= comp[i] >= comp[i - 1] - 1e-12;
  }
  Outcome o;
  o.pass = iters_mono && comp_mono && sh.blr_ladder.front().iterations <= 5;
  o.detail = fmt("n=12 eps=1e-9..5e-3: iters %s (first<=5), compression %.2f/%.2f/%.2f/%.2f",
                 join_iters(sh.blr_ladder).c_str(), comp[0], comp[1], comp[2], comp[3]);
  return o;
}

// --- criterion 5: HX mesh robustness ------------------------------------------

Outcome criterion_hx_robust(Shared& sh) {
  const double k = 2 * M_PI;
  for (const int n : {8, 12, 16}) {
    auto r = run_case(make_case(n, k, "fgmres+hx:precond"));
    if (!r.error.empty() || !r.converged)
      return {false, fmt("n=%d did not converge to 1e-8 (%s)", n, r.error.c_str())};
    sh.hx_precond.push_back(std::move(r));
  }
  std::vector<int> its;
  for (const auto& r : sh.hx_precond) its.push_back(r.iterations);
  std::vector<int> sorted = its;
  std::sort(sorted.begin(), sorted.end());
  const double med = sorted[1];
  bool within = true;
  for (const int it : its) within &= std::abs(it - med) <= 0.25 * med;
  Outcome o;
  o.pass = within;
  o.detail = fmt("k=2pi n=8,12,16: outer iters %s, median %g, all within +/-25%%",
                 join_iters(sh.hx_precond).c_str(), med);
  return o;
}

// --- criterion 6: HX mode ordering --------------------------------------------

Outcome criterion_hx_modes(Shared& sh) {
  if (sh.hx_precond.size() != 3) return {false, "prerequisite precond sweep missing"};
  const double k = 2 * M_PI;
  for (const int n : {8, 12, 16}) {
    auto c = make_case(n, k, "fgmres+hx:solver");
    c.max_iter = 2000;  // headroom: the weaker mode may need far more outer steps
    auto r = run_case(c);
    if (!r.error.empty() || !r.converged)
      return {false, fmt("solver mode n=%d did not converge (%s)", n, r.error.c_str())};
    sh.hx_solver.push_back(std::move(r));
  }
  bool ordered = true;
  for (size_t i = 0; i < 3; ++i)
    ordered &= sh.hx_solver[i].iterations >= sh.hx_precond[i].iterations;
  Outcome o;
  o.pass = ordered;
  o.detail = fmt("solver vs precond outer iters: %s >= %s pointwise",
                 join_iters(sh.hx_solver).c_str(), join_iters(sh.hx_precond).c_str());
  return o;
}

// --- criterion 7: k-degradation ------------------------------------------------

Outcome criterion_k_degradation(Shared& sh) {
  if (sh.hx_precond.size() != 3) return {false, "prerequisite precond sweep missing"};
  BenchCase c;  // n derived from ppw: k=4pi at ppw 10 resolves to n=20
  c.k = 4 * M_PI;
  c.ppw = 10;
  c.solver = "fgmres+hx:precond";
  auto r = run_case(c);
  if (!r.error.empty() || !r.converged)
    return {false, fmt("k=4pi run failed (%s)", r.error.c_str())};
  const BenchResult& base = sh.hx_precond[1];  // n=12 is the ppw-10 grid for k=2pi
  Outcome o;
  o.pass = r.iterations > base.iterations;
  o.detail = fmt("ppw 10: k=4pi (n=%d) %d iters > k=2pi (n=%d) %d iters", r.n, r.iterations,
                 base.n, base.iterations);
  sh.k4pi = std::move(r);
  return o;
}

// --- criterion 8: RAS trends ----------------------------------------------------

Outcome criterion_ras_trends(Shared& sh) {
  const double k = 2 * M_PI;
  // N sweep at overlap 2, then overlap sweep at N=4 (the 4,2 run is shared).
  for (const char* spec : {"gmres+ras:2,2", "gmres+ras:4,2", "gmres+ras:8,2", "gmres+ras:4,1",
                           "gmres+ras:4,3"}) {
    auto r = run_case(make_case(8, k, spec));
    if (!r.error.empty() || !r.converged)
      return {false, fmt("%s did not converge (%s)", spec, r.error.c_str())};
    sh.ras_rows.push_back(std::move(r));
  }
  const std::vector<int> nsweep = {sh.ras_rows[0].iterations, sh.ras_rows[1].iterations,
                                   sh.ras_rows[2].iterations};
  const std::vector<int> dsweep = {sh.ras_rows[3].iterations, sh.ras_rows[1].iterations,
                                   sh.ras_rows[4].iterations};
  std::string note;
  const bool n_ok = weakly_monotone(nsweep, /*increasing=*/true, note);
  const bool d_ok = n_ok ? weakly_monotone(dsweep, /*increasing=*/false, note) : false;
  Outcome o;
  o.pass = n_ok && d_ok;
  o.detail = fmt("n=8: iters rise over N=2,4,8 (%d/%d/%d), fall over overlap=1,2,3 (%d/%d/%d)%s%s",
                 nsweep[0], nsweep[1], nsweep[2], dsweep[0], dsweep[1], dsweep[2],
                 note.empty() ? "" : " — ", note.c_str());
  return o;
}

// --- criterion 9: SPAI parameter trend -------------------------------------------

Outcome criterion_spai_trend() {
  const double k = 2 * M_PI;
  auto tight_case = make_case(8, k, "gmres+spai:0.001,0.01,3");
  auto loose_case = make_case(8, k, "gmres+spai:0.01,0.05,3");
  tight_case.expect_maxed = loose_case.expect_maxed = true;  // desk scale: both may stall
  const auto tight = run_case(tight_case);
  const auto loose = run_case(loose_case);
  if (!tight.error.empty() || !loose.error.empty())
    return {false, "setup failed: " + tight.error + loose.error};
  Outcome o;
  if (!loose.converged) {
    o.pass = true;
    o.detail = fmt("loose (0.01,0.05) stalled at res %.1e within %d; tight (0.001,0.01) %s (res %.1e)",
                   loose.true_residual, loose.def.max_iter,
                   tight.converged ? fmt("converged in %d", tight.iterations).c_str() : "also stalled",
                   tight.true_residual);
  } else if (tight.converged && loose.iterations >= tight.iterations) {
    o.pass = true;
    o.detail = fmt("loose %d iters >= tight %d iters", loose.iterations, tight.iterations);
  } else {
    o.pass = false;
    o.detail = fmt("trend violated: loose %s%d, tight %s%d", loose.converged ? "" : ">",
                   loose.iterations, tight.converged ? "" : ">", tight.iterations);
  }
  return o;
}

// --- criterion 10: unpreconditioned failure vs preconditioned success -------------

Outcome criterion_plain_fails(const Shared& sh) {
  auto c = make_case(8, 2 * M_PI, "gmres+none");
  c.expect_maxed = true;
  const auto plain = run_case(c);
  if (!plain.error.empty()) return {false, "plain run failed: " + plain.error};

  size_t preconditioned = 0;
  bool all_ok = true;
  for (const std::vector<BenchResult>* rows : {&sh.blr_ladder, &sh.hx_precond, &sh.hx_solver,
                                               &sh.ras_rows}) {
    for (const auto& r : *rows) {
      ++preconditioned;
      all_ok &= r.converged;
    }
  }
  if (sh.k4pi) {
    ++preconditioned;
    all_ok &= sh.k4pi->converged;
  }
  if (preconditioned < 15) return {false, "prerequisite sweeps missing"};

  Outcome o;
  o.pass = !plain.converged && plain.iterations >= plain.def.max_iter && all_ok;
  o.detail = fmt("plain GMRES n=8 k=2pi stuck at res %.1e after %d; all %zu preconditioned runs converged",
                 plain.true_residual, plain.iterations, preconditioned);
  return o;
}

// --- criterion 11: patch test and manufactured convergence -------------------------

Outcome criterion_manufactured() {
  // Patch: on the scatterer-free cube the interpolant of a constant field
  // satisfies the discrete equations to round-off.
  const double kp = 2 * M_PI;
  const Mesh m4 = build_mesh({4, 1.0, false});
  const Vec3 e0{1.0, -0.5, 0.25};
  const auto src0 = testfields::constant_field_source(kp, e0);
  const auto ops0 = assemble_operators(m4, {kp, 1.0, 1.0, 1.0}, &src0);
  const auto sys0 = build_complex_system(ops0);
  const auto xref_r = interpolate_to_edges(m4, ops0, [&](const Vec3&) { return e0; });
  const std::vector<complex_t> xref(xref_r.begin(), xref_r.end());
  const double patch = relative_residual(sys0.A, xref, sys0.b);

  // Convergence of the curl-seminorm error under h-refinement at k=1.
  double err[2] = {0, 0};
  int slot = 0;
  for (const int n : {8, 16}) {
    const Mesh m = build_mesh({n, 1.0, false});
    const auto src = testfields::manufactured_source(1.0);
    const auto ops = assemble_operators(m, {1.0, 1.0, 1.0, 1.0}, &src);
    const auto ssys = build_split_system(ops);
    HxOperator hx(m, ops);
    HxBlockPrecond pre(hx, HxBlockPrecond::Mode::precond);
    KrylovOptions ko;
    ko.rtol = 1e-10;
    ko.max_iter = 400;
    std::vector<double> x(ssys.b.size(), 0.0);
    const auto aop = make_operator(ssys.A);
    const auto pop = pre.as_operator();
    const auto rep = fgmres(aop, ssys.b, x, ko, &pop);
    if (!rep.converged) return {false, fmt("manufactured solve n=%d stalled", n)};
    const auto z = split_to_complex(x);
    std::vector<double> xr(z.size()), xi(z.size());
    for (size_t i = 0; i < z.size(); ++i) {
      xr[i] = z[i].real();
      xi[i] = z[i].imag();
    }
    err[slot++] = curl_seminorm_error(
        m, ops, xr, xi, [](const Vec3& p) { return testfields::manufactured_curl(p); }, nullptr);
  }
  const double ratio = err[0] / err[1];
  Outcome o;
  o.pass = patch <= 1e-8 && ratio >= 1.7 && ratio <= 2.3;
  o.detail = fmt("patch residual %.1e (tol 1e-8); curl-error ratio n=8->16 %.2f in [1.7, 2.3]",
                 patch, ratio);
  return o;
}

// --- criterion 12: determinism -------------------------------------------------------

Outcome criterion_determinism() {
  const auto first = run_suite("ras-table");
  const auto second = run_suite("ras-table");
  if (first.size() != second.size()) return {false, "suite size changed between runs"};
  for (size_t i = 0; i < first.size(); ++i) {
    const auto& a = first[i];
    const auto& b = second[i];
    if (a.iterations != b.iterations || a.converged != b.converged ||
        a.true_residual != b.true_residual || a.inner != b.inner)
      return {false, fmt("case %s diverged between runs (%d vs %d iters)", a.def.label.c_str(),
                         a.iterations, b.iterations)};
  }
  return {true, fmt("ras-table rerun: all %zu iteration counts and residuals bit-identical",
                    first.size())};
}

}  // namespace

int main() {
  set_thread_budget(1);  // fixed threads: bit-for-bit reproducible sweeps
  std::printf("acceptance gate: 12 criteria, thread budget %d\n", thread_budget());
  std::fflush(stdout);

  Shared sh;
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"discrete identities", [&] { return criterion_identities(); }},
      {"split/complex equivalence", [&] { return criterion_split_equivalence(); }},
      {"exactness degenerations", [&] { return criterion_degenerations(); }},
      {"BLR accuracy/compression ladder", [&] { return criterion_blr_ladder(sh); }},
      {"HX mesh robustness", [&] { return criterion_hx_robust(sh); }},
      {"HX mode ordering", [&] { return criterion_hx_modes(sh); }},
      {"HX k-degradation", [&] { return criterion_k_degradation(sh); }},
      {"RAS subdomain/overlap trends", [&] { return criterion_ras_trends(sh); }},
      {"SPAI parameter trend", [&] { return criterion_spai_trend(); }},
      {"unpreconditioned failure", [&] { return criterion_plain_fails(sh); }},
      {"patch + manufactured convergence", [&] { return criterion_manufactured(); }},
      {"determinism", [&] { return criterion_determinism(); }},
  };

  int failed = 0;
  for (size_t i = 0; i < criteria.size(); ++i) {
    Stopwatch sw;
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    if (!o.pass) ++failed;
    std::printf("[%2zu] %s  %-33s %s  [%.1fs]\n", i + 1, o.pass ? "PASS" : "FAIL",
                criteria[i].first, o.detail.c_str(), sw.seconds());
    std::fflush(stdout);
  }
  std::printf("== %d/12 criteria passed ==\n", 12 - failed);
  return failed;
}
