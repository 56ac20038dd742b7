#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "maxlab/assembly.hpp"
#include "maxlab/hx.hpp"
#include "maxlab/krylov.hpp"
#include "maxlab/mesh.hpp"
#include "maxlab/sparse_cholesky.hpp"
#include "maxlab/systems.hpp"

using namespace maxlab;

namespace {

struct Problem {
  Mesh mesh;
  MaxwellOperators ops;
};

Problem make_problem(int n, double k, bool scatterer) {
  Problem p{build_mesh({.n = n, .scale = 1.0, .scatterer = scatterer}), {}};
  AssemblyOptions opt;
  opt.k = k;
  auto source = plane_wave_source(k, {0, 0, 1}, {1, 0, 0});
  p.ops = assemble_operators(p.mesh, opt, &source);
  return p;
}

std::vector<double> random_vec(index_t n, unsigned seed) {
  std::mt19937 gen(seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  std::vector<double> v(static_cast<size_t>(n));
  for (auto& x : v) x = unif(gen);
  return v;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

TEST_CASE("setup succeeds and zero maps to zero") {
  auto p = make_problem(4, 1.0, true);
  HxOperator hx(p.mesh, p.ops);
  CHECK_FALSE(hx.grounded());
  std::vector<double> zero(static_cast<size_t>(hx.size()), 0.0);
  auto out = hx.apply(zero);
  for (double v : out) CHECK(v == 0.0);
  std::vector<double> wrong(static_cast<size_t>(hx.size()) + 1, 0.0);
  CHECK_THROWS_AS(hx.apply(wrong), DimensionError);
}

TEST_CASE("the operator is symmetric") {
  auto p = make_problem(4, 1.0, true);
  HxOperator hx(p.mesh, p.ops);
  auto r = random_vec(hx.size(), 3);
  auto s = random_vec(hx.size(), 5);
  const auto hr = hx.apply(r);
  const auto hs = hx.apply(s);
  const double lhs = dot(hr, s), rhs = dot(r, hs);
  CHECK(std::abs(lhs - rhs) <= 1e-10 * std::max(std::abs(lhs), 1.0));
}

TEST_CASE("the operator stays symmetric with two smoother sweeps") {
  auto p = make_problem(4, 1.0, true);
  HxOperator hx(p.mesh, p.ops);
  hx.smoother_sweeps = 2;
  auto r = random_vec(hx.size(), 7);
  auto s = random_vec(hx.size(), 11);
  const double lhs = dot(hx.apply(r), s), rhs = dot(r, hx.apply(s));
  CHECK(std::abs(lhs - rhs) <= 1e-10 * std::max(std::abs(lhs), 1.0));
}

TEST_CASE("the application is linear") {
  auto p = make_problem(4, 2.0, true);
  HxOperator hx(p.mesh, p.ops);
  auto r = random_vec(hx.size(), 13);
  const double alpha = -2.75;
  auto scaled = r;
  for (auto& v : scaled) v *= alpha;
  const auto h1 = hx.apply(r);
  const auto h2 = hx.apply(scaled);
  double err = 0, ref = 0;
  for (size_t i = 0; i < h1.size(); ++i) {
    err += (h2[i] - alpha * h1[i]) * (h2[i] - alpha * h1[i]);
    ref += (alpha * h1[i]) * (alpha * h1[i]);
  }
  CHECK(std::sqrt(err) <= 1e-13 * std::sqrt(ref));
}

TEST_CASE("the gradient term is exactly the scaled discrete-gradient solve") {
  const double k = 2.0;
  auto p = make_problem(4, k, true);
  HxOperator hx(p.mesh, p.ops);
  hx.use_smoother = false;
  hx.use_curl_term = false;
  auto r = random_vec(hx.size(), 17);
  const auto term = hx.apply(r);

  // Independent evaluation: k^{-2} G Lap^{-1} G^T r with a fresh
  // factorization of the assembled scalar Laplacian.
  auto gt = transpose(p.ops.G);
  std::vector<double> pot(static_cast<size_t>(p.ops.n_free_vertices));
  spmv(gt, r.data(), pot.data());
  SkylineCholesky lap(p.ops.lap_scalar);
  pot = lap.solve(std::move(pot));
  std::vector<double> expected(static_cast<size_t>(hx.size()));
  spmv(p.ops.G, pot.data(), expected.data());
  for (auto& v : expected) v /= k * k;

  double err = 0, ref = 0;
  for (size_t i = 0; i < expected.size(); ++i) {
    err += (term[i] - expected[i]) * (term[i] - expected[i]);
    ref += expected[i] * expected[i];
  }
  CHECK(std::sqrt(err / ref) <= 1e-13);
}

TEST_CASE("the smoother term equals the dense symmetric Gauss-Seidel formula") {
  auto p = make_problem(4, 1.0, true);
  HxOperator hx(p.mesh, p.ops);
  hx.use_curl_term = false;
  hx.use_gradient_term = false;
  const auto& a = hx.block();
  const index_t n = a.rows;
  auto r = random_vec(n, 19);
  const auto got = hx.apply(r);

  // Dense reference: x = (D+U)^{-1} D (D+L)^{-1} r built entry by entry.
  std::vector<std::vector<double>> dense(static_cast<size_t>(n), std::vector<double>(static_cast<size_t>(n), 0.0));
  for (index_t i = 0; i < n; ++i)
    for (index_t e = a.row_ptr[static_cast<size_t>(i)]; e < a.row_ptr[static_cast<size_t>(i) + 1]; ++e)
      dense[static_cast<size_t>(i)][static_cast<size_t>(a.col_idx[static_cast<size_t>(e)])] = a.values[static_cast<size_t>(e)];
  std::vector<double> y(static_cast<size_t>(n));
  for (index_t i = 0; i < n; ++i) {
    double s = r[static_cast<size_t>(i)];
    for (index_t j = 0; j < i; ++j) s -= dense[static_cast<size_t>(i)][static_cast<size_t>(j)] * y[static_cast<size_t>(j)];
    y[static_cast<size_t>(i)] = s / dense[static_cast<size_t>(i)][static_cast<size_t>(i)];
  }
  std::vector<double> x(static_cast<size_t>(n));
  for (index_t i = n - 1; i >= 0; --i) {
    double s = dense[static_cast<size_t>(i)][static_cast<size_t>(i)] * y[static_cast<size_t>(i)];
    for (index_t j = i + 1; j < n; ++j) s -= dense[static_cast<size_t>(i)][static_cast<size_t>(j)] * x[static_cast<size_t>(j)];
    x[static_cast<size_t>(i)] = s / dense[static_cast<size_t>(i)][static_cast<size_t>(i)];
  }
  for (index_t i = 0; i < n; ++i) CHECK(got[static_cast<size_t>(i)] == doctest::Approx(x[static_cast<size_t>(i)]).epsilon(1e-11));
}

TEST_CASE("a scatterer-free mesh grounds the scalar Laplacian and still works") {
  auto p = make_problem(4, 1.0, false);
  HxOperator hx(p.mesh, p.ops);
  CHECK(hx.grounded());
  auto r = random_vec(hx.size(), 23);
  const auto out = hx.apply(r);
  for (double v : out) CHECK(std::isfinite(v));
  auto s = random_vec(hx.size(), 29);
  const double lhs = dot(hx.apply(r), s), rhs = dot(r, hx.apply(s));
  CHECK(std::abs(lhs - rhs) <= 1e-10 * std::max(std::abs(lhs), 1.0));
}

TEST_CASE("hx-preconditioned pcg meets the inner budget on the positive block") {
  auto p = make_problem(4, 1.0, true);
  HxOperator hx(p.mesh, p.ops);
  auto block_op = make_operator(hx.block());
  LinearOperator<double> hx_op{hx.size(),
                               [&hx](const std::vector<double>& v, std::vector<double>& y) { y = hx.apply(v); }};
  auto b = random_vec(hx.size(), 31);
  std::vector<double> x;
  KrylovOptions inner;
  inner.rtol = 1e-2;
  inner.max_iter = 20;
  auto rep = pcg(block_op, b, x, inner, &hx_op);
  CHECK(rep.converged);
  CHECK(rep.iterations <= 20);
}

TEST_CASE("solver mode is two independent half applications") {
  auto p = make_problem(4, 1.0, true);
  HxOperator hx(p.mesh, p.ops);
  HxBlockPrecond precond(hx, HxBlockPrecond::Mode::solver);
  const index_t n = hx.size();
  auto r = random_vec(2 * n, 37);
  const auto out = precond.apply(r);

  std::vector<double> r1(r.begin(), r.begin() + n), r2(r.begin() + n, r.end());
  const auto h1 = hx.apply(r1);
  const auto h2 = hx.apply(r2);
  for (index_t i = 0; i < n; ++i) {
    CHECK(out[static_cast<size_t>(i)] == h1[static_cast<size_t>(i)]);
    CHECK(out[static_cast<size_t>(n + i)] == h2[static_cast<size_t>(i)]);
  }
  CHECK(precond.inner_iterations_first == 0);
  CHECK(precond.inner_iterations_second == 0);

  std::vector<double> zero(static_cast<size_t>(2 * n), 0.0);
  for (double v : precond.apply(zero)) CHECK(v == 0.0);
}

TEST_CASE("precond mode runs inner pcg and counts its iterations") {
  auto p = make_problem(4, 1.0, true);
  HxOperator hx(p.mesh, p.ops);
  HxBlockPrecond precond(hx, HxBlockPrecond::Mode::precond);
  auto r = random_vec(2 * hx.size(), 41);
  (void)precond.apply(r);
  CHECK(precond.inner_iterations_first > 0);
  CHECK(precond.inner_iterations_second > 0);
  CHECK(precond.inner_iterations_first <= precond.inner.max_iter);
  CHECK(precond.inner_iterations_second <= precond.inner.max_iter);
}

TEST_CASE("outer fgmres converges in both modes, solver mode no faster") {
  auto p = make_problem(4, 1.0, true);
  auto sys = build_split_system(p.ops);
  HxOperator hx(p.mesh, p.ops);
  auto op = make_operator(sys.A);
  KrylovOptions kopt;
  kopt.rtol = 1e-8;
  kopt.max_iter = 1000;

  HxBlockPrecond as_precond(hx, HxBlockPrecond::Mode::precond);
  auto prec_op = as_precond.as_operator();
  std::vector<double> x1;
  auto rep_precond = fgmres(op, sys.b, x1, kopt, &prec_op);
  CHECK(rep_precond.converged);
  CHECK(relative_residual(sys.A, x1, sys.b) <= 1e-6);

  HxBlockPrecond as_solver(hx, HxBlockPrecond::Mode::solver);
  auto solver_op = as_solver.as_operator();
  std::vector<double> x2;
  auto rep_solver = fgmres(op, sys.b, x2, kopt, &solver_op);
  CHECK(rep_solver.converged);
  CHECK(relative_residual(sys.A, x2, sys.b) <= 1e-6);

  CHECK(rep_solver.iterations >= rep_precond.iterations);
}

TEST_CASE("an indefinite auxiliary matrix is reported by name") {
  auto p = make_problem(4, 1.0, true);
  // Wreck one diagonal entry of the nodal mass matrix: the vector auxiliary
  // matrix (lap + k^2 mass) turns indefinite and must be named in the error.
  for (index_t e = p.ops.mass_scalar.row_ptr[0]; e < p.ops.mass_scalar.row_ptr[1]; ++e)
    if (p.ops.mass_scalar.col_idx[static_cast<size_t>(e)] == 0)
      p.ops.mass_scalar.values[static_cast<size_t>(e)] *= -1e6;
  try {
    HxOperator hx(p.mesh, p.ops);
    FAIL("expected NotSpdError");
  } catch (const NotSpdError& e) {
    CHECK(std::string(e.what()).find("vector auxiliary matrix") != std::string::npos);
  }
}

TEST_CASE("hx application is deterministic") {
  auto p = make_problem(4, 2.0, true);
  HxOperator h1(p.mesh, p.ops);
  HxOperator h2(p.mesh, p.ops);
  auto r = random_vec(h1.size(), 43);
  const auto a1 = h1.apply(r);
  const auto a2 = h2.apply(r);
  for (size_t i = 0; i < a1.size(); ++i) CHECK(a1[i] == a2[i]);
}
