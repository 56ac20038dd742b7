#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "maxlab/assembly.hpp"
#include "maxlab/csr.hpp"
#include "maxlab/krylov.hpp"
#include "maxlab/mesh.hpp"
#include "maxlab/sparse_lu.hpp"

using namespace maxlab;

namespace {

// Dense-backed random test matrices, stored as CSR so the solvers see the
// same code path the real systems use.
template <class T>
CsrMatrix<T> random_diag_dominant(index_t n, unsigned seed) {
  std::mt19937 gen(seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  CsrBuilder<T> builder(n, n);
  for (index_t i = 0; i < n; ++i) {
    double offsum = 0;
    for (index_t j = 0; j < n; ++j) {
      if (i == j) continue;
      if ((i + 2 * j) % 5 != 0) continue;  // fixed sparse pattern
      T val;
      if constexpr (scalar_traits<T>::is_complex) {
        val = T(unif(gen), unif(gen));
      } else {
        val = unif(gen);
      }
      offsum += std::abs(val);
      builder.add(i, j, val);
    }
    builder.add(i, i, T(offsum + 1.5));
  }
  return builder.build();
}

template <class T>
std::vector<T> random_vector(index_t n, unsigned seed) {
  std::mt19937 gen(seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  std::vector<T> v(static_cast<size_t>(n));
  for (auto& x : v) {
    if constexpr (scalar_traits<T>::is_complex) {
      x = T(unif(gen), unif(gen));
    } else {
      x = unif(gen);
    }
  }
  return v;
}

template <class T>
double true_rel_residual(const CsrMatrix<T>& a, const std::vector<T>& b, const std::vector<T>& x) {
  std::vector<T> ax(b.size());
  spmv(a, x.data(), ax.data());
  return vec_norm2(vec_sub(b, ax)) / vec_norm2(b);
}

}  // namespace

TEST_CASE("gmres solves the identity in one iteration") {
  const index_t n = 17;
  auto a = CsrMatrix<double>::identity(n);
  auto b = random_vector<double>(n, 11);
  std::vector<double> x;
  auto rep = gmres(make_operator(a), b, x, {});
  CHECK(rep.converged);
  CHECK(rep.iterations == 1);
  for (index_t i = 0; i < n; ++i) CHECK(x[static_cast<size_t>(i)] == doctest::Approx(b[static_cast<size_t>(i)]).epsilon(1e-14));
}

TEST_CASE("gmres terminates after as many iterations as distinct eigenvalues") {
  // Diagonal matrix with five distinct values: the minimal polynomial has
  // degree five, so full GMRES must finish in at most five steps.
  const index_t n = 60;
  CsrBuilder<double> builder(n, n);
  const double vals[5] = {1.0, 2.0, 3.5, 7.0, 11.0};
  for (index_t i = 0; i < n; ++i) builder.add(i, i, vals[i % 5]);
  auto a = builder.build();
  auto b = random_vector<double>(n, 23);
  std::vector<double> x;
  KrylovOptions opt;
  opt.rtol = 1e-12;
  auto rep = gmres(make_operator(a), b, x, opt);
  CHECK(rep.converged);
  CHECK(rep.iterations <= 5);
  CHECK(true_rel_residual(a, b, x) <= 1e-11);
}

TEST_CASE("gmres matches a direct solve on a random nonsymmetric system") {
  const index_t n = 120;
  auto a = random_diag_dominant<double>(n, 31);
  auto b = random_vector<double>(n, 37);
  std::vector<double> x;
  auto rep = gmres(make_operator(a), b, x, {});
  CHECK(rep.converged);
  CHECK(true_rel_residual(a, b, x) <= 1e-7);

  auto lu = sparse_lu(a);
  auto xd = b;
  lu.solve(xd.data());
  double diff = 0, ref = 0;
  for (index_t i = 0; i < n; ++i) {
    diff += (x[static_cast<size_t>(i)] - xd[static_cast<size_t>(i)]) * (x[static_cast<size_t>(i)] - xd[static_cast<size_t>(i)]);
    ref += xd[static_cast<size_t>(i)] * xd[static_cast<size_t>(i)];
  }
  CHECK(std::sqrt(diff / ref) <= 1e-6);
}

TEST_CASE("gmres handles complex-valued systems") {
  const index_t n = 90;
  auto a = random_diag_dominant<complex_t>(n, 41);
  auto b = random_vector<complex_t>(n, 43);
  std::vector<complex_t> x;
  auto rep = gmres(make_operator(a), b, x, {});
  CHECK(rep.converged);
  CHECK(true_rel_residual(a, b, x) <= 1e-7);
}

TEST_CASE("gmres with an exact inverse as left preconditioner needs one iteration") {
  const index_t n = 70;
  auto a = random_diag_dominant<double>(n, 53);
  auto b = random_vector<double>(n, 59);
  auto lu = sparse_lu(a);
  LinearOperator<double> inv{n, [&lu](const std::vector<double>& v, std::vector<double>& y) {
                               y = v;
                               lu.solve(y.data());
                             }};
  std::vector<double> x;
  auto rep = gmres(make_operator(a), b, x, {}, &inv);
  CHECK(rep.converged);
  CHECK(rep.iterations == 1);
  CHECK(true_rel_residual(a, b, x) <= 1e-12);
}

TEST_CASE("left-preconditioned gmres monitors the preconditioned residual") {
  const index_t n = 80;
  auto a = random_diag_dominant<double>(n, 61);
  auto b = random_vector<double>(n, 67);
  // A wildly scaled diagonal preconditioner separates the two residuals.
  std::vector<double> d(static_cast<size_t>(n));
  for (index_t i = 0; i < n; ++i) d[static_cast<size_t>(i)] = (i % 2 == 0) ? 100.0 : 0.01;
  LinearOperator<double> prec{n, [&d](const std::vector<double>& v, std::vector<double>& y) {
                                y.resize(v.size());
                                for (size_t i = 0; i < v.size(); ++i) y[i] = d[i] * v[i];
                              }};
  std::vector<double> x;
  KrylovOptions opt;
  opt.rtol = 1e-4;
  auto rep = gmres(make_operator(a), b, x, opt, &prec);
  CHECK(rep.converged);

  std::vector<double> ax(b.size());
  spmv(a, x.data(), ax.data());
  auto r = vec_sub(b, ax);
  std::vector<double> pr(r.size()), pb(b.size());
  prec.apply(r, pr);
  prec.apply(b, pb);
  const double monitored = vec_norm2(pr) / vec_norm2(pb);
  CHECK(std::abs(monitored - rep.relative_residual) <= 1e-10);
  CHECK(monitored <= opt.rtol);
}

TEST_CASE("fgmres monitors the true residual under right preconditioning") {
  const index_t n = 80;
  auto a = random_diag_dominant<double>(n, 71);
  auto b = random_vector<double>(n, 73);
  std::vector<double> d(static_cast<size_t>(n));
  for (index_t i = 0; i < n; ++i) d[static_cast<size_t>(i)] = (i % 3 == 0) ? 50.0 : 0.1;
  LinearOperator<double> prec{n, [&d](const std::vector<double>& v, std::vector<double>& y) {
                                y.resize(v.size());
                                for (size_t i = 0; i < v.size(); ++i) y[i] = d[i] * v[i];
                              }};
  std::vector<double> x;
  KrylovOptions opt;
  opt.rtol = 1e-6;
  auto rep = fgmres(make_operator(a), b, x, opt, &prec);
  CHECK(rep.converged);
  const double truth = true_rel_residual(a, b, x);
  CHECK(std::abs(truth - rep.relative_residual) <= 1e-9);
  CHECK(truth <= opt.rtol * 1.001);
}

TEST_CASE("fgmres with an exact inverse as right preconditioner needs one iteration") {
  const index_t n = 64;
  auto a = random_diag_dominant<complex_t>(n, 79);
  auto b = random_vector<complex_t>(n, 83);
  auto lu = sparse_lu(a);
  LinearOperator<complex_t> inv{n, [&lu](const std::vector<complex_t>& v, std::vector<complex_t>& y) {
                                  y = v;
                                  lu.solve(y.data());
                                }};
  std::vector<complex_t> x;
  auto rep = fgmres(make_operator(a), b, x, {}, &inv);
  CHECK(rep.converged);
  CHECK(rep.iterations == 1);
  CHECK(true_rel_residual(a, b, x) <= 1e-12);
}

TEST_CASE("fgmres tolerates a preconditioner that changes every application") {
  const index_t n = 100;
  auto a = random_diag_dominant<double>(n, 89);
  auto b = random_vector<double>(n, 97);
  auto diag = a.diagonal();
  // Alternate between one and three Jacobi sweeps: a genuinely nonstationary
  // preconditioner that plain GMRES theory does not cover.
  int calls = 0;
  LinearOperator<double> prec{n, [&](const std::vector<double>& v, std::vector<double>& y) {
                                const int sweeps = (calls++ % 2 == 0) ? 1 : 3;
                                y.assign(v.size(), 0.0);
                                std::vector<double> tmp(v.size());
                                for (int s = 0; s < sweeps; ++s) {
                                  spmv(a, y.data(), tmp.data());
                                  for (size_t i = 0; i < v.size(); ++i) y[i] += (v[i] - tmp[i]) / diag[i];
                                }
                              }};
  std::vector<double> x;
  auto rep = fgmres(make_operator(a), b, x, {}, &prec);
  CHECK(rep.converged);
  CHECK(true_rel_residual(a, b, x) <= 1e-7);
}

TEST_CASE("full gmres residual history never increases") {
  const index_t n = 150;
  auto a = random_diag_dominant<double>(n, 101);
  auto b = random_vector<double>(n, 103);
  std::vector<double> x;
  auto rep = gmres(make_operator(a), b, x, {});
  CHECK(rep.converged);
  REQUIRE(rep.history.size() == static_cast<size_t>(rep.iterations) + 1);
  for (size_t i = 1; i < rep.history.size(); ++i) CHECK(rep.history[i] <= rep.history[i - 1] * (1 + 1e-12));
}

TEST_CASE("unpreconditioned gmres and fgmres walk the same Arnoldi path") {
  const index_t n = 75;
  auto a = random_diag_dominant<double>(n, 107);
  auto b = random_vector<double>(n, 109);
  std::vector<double> xg, xf;
  auto rg = gmres(make_operator(a), b, xg, {});
  auto rf = fgmres(make_operator(a), b, xf, {});
  REQUIRE(rg.history.size() == rf.history.size());
  for (size_t i = 0; i < rg.history.size(); ++i) CHECK(rg.history[i] == doctest::Approx(rf.history[i]).epsilon(1e-12));
  for (index_t i = 0; i < n; ++i) CHECK(xg[static_cast<size_t>(i)] == doctest::Approx(xf[static_cast<size_t>(i)]).epsilon(1e-10));
}

TEST_CASE("zero right-hand side short-circuits") {
  const index_t n = 30;
  auto a = random_diag_dominant<double>(n, 113);
  std::vector<double> b(static_cast<size_t>(n), 0.0), x;
  auto rep = gmres(make_operator(a), b, x, {});
  CHECK(rep.converged);
  CHECK(rep.iterations == 0);
  for (double v : x) CHECK(v == 0.0);

  auto repf = fgmres(make_operator(a), b, x, {});
  CHECK(repf.converged);
  CHECK(repf.iterations == 0);

  auto repc = pcg(make_operator(a), b, x, {});
  CHECK(repc.converged);
  CHECK(repc.iterations == 0);
}

TEST_CASE("iteration limit is reported honestly") {
  const index_t n = 200;
  auto a = random_diag_dominant<double>(n, 127);
  auto b = random_vector<double>(n, 131);
  std::vector<double> x;
  KrylovOptions opt;
  opt.rtol = 1e-14;
  opt.max_iter = 3;
  auto rep = gmres(make_operator(a), b, x, opt);
  CHECK_FALSE(rep.converged);
  CHECK(rep.iterations == 3);
  CHECK(rep.stop_reason == "iteration limit reached");
  CHECK(rep.history.size() == 4);
  // The partial solution must still be the least-squares iterate, not garbage.
  CHECK(true_rel_residual(a, b, x) == doctest::Approx(rep.relative_residual).epsilon(1e-8));
}

TEST_CASE("happy breakdown stops early with an exact solution") {
  // Two distinct eigenvalues: the Krylov space is exhausted after two steps,
  // and the basis vector norm collapses below the breakdown threshold.
  const index_t n = 40;
  CsrBuilder<double> builder(n, n);
  for (index_t i = 0; i < n; ++i) builder.add(i, i, i % 2 == 0 ? 2.0 : 3.0);
  auto a = builder.build();
  auto b = random_vector<double>(n, 137);
  std::vector<double> x;
  KrylovOptions opt;
  opt.rtol = 0.0;  // unreachable: only the invariant-subspace exit applies
  auto rep = gmres(make_operator(a), b, x, opt);
  CHECK(rep.converged);
  CHECK(rep.iterations == 2);
  CHECK(rep.stop_reason == "invariant subspace reached");
  CHECK(true_rel_residual(a, b, x) <= 1e-13);
}

TEST_CASE("pcg solves SPD systems and agrees with a direct factorization") {
  const index_t n = 110;
  // B' B + n I assembled densely, then stored sparse.
  std::mt19937 gen(139);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  std::vector<std::vector<double>> dense(static_cast<size_t>(n), std::vector<double>(static_cast<size_t>(n), 0.0));
  std::vector<std::vector<double>> bmat(static_cast<size_t>(n), std::vector<double>(static_cast<size_t>(n)));
  for (auto& row : bmat)
    for (auto& vv : row) vv = unif(gen);
  for (index_t i = 0; i < n; ++i)
    for (index_t j = 0; j < n; ++j) {
      double s = i == j ? static_cast<double>(n) : 0.0;
      for (index_t kk = 0; kk < n; ++kk) s += bmat[static_cast<size_t>(kk)][static_cast<size_t>(i)] * bmat[static_cast<size_t>(kk)][static_cast<size_t>(j)];
      dense[static_cast<size_t>(i)][static_cast<size_t>(j)] = s;
    }
  CsrBuilder<double> builder(n, n);
  for (index_t i = 0; i < n; ++i)
    for (index_t j = 0; j < n; ++j) builder.add(i, j, dense[static_cast<size_t>(i)][static_cast<size_t>(j)]);
  auto a = builder.build();
  auto b = random_vector<double>(n, 149);

  std::vector<double> x;
  auto rep = pcg(make_operator(a), b, x, {});
  CHECK(rep.converged);
  CHECK(true_rel_residual(a, b, x) <= 1e-7);

  auto lu = sparse_lu(a);
  auto xd = b;
  lu.solve(xd.data());
  double diff = 0, ref = 0;
  for (index_t i = 0; i < n; ++i) {
    diff += (x[static_cast<size_t>(i)] - xd[static_cast<size_t>(i)]) * (x[static_cast<size_t>(i)] - xd[static_cast<size_t>(i)]);
    ref += xd[static_cast<size_t>(i)] * xd[static_cast<size_t>(i)];
  }
  CHECK(std::sqrt(diff / ref) <= 1e-6);
}

TEST_CASE("pcg on the assembled scalar stiffness matrix, with and without Jacobi") {
  // A realistic SPD system: nodal Laplacian plus mass from the n = 4 cavity
  // mesh (the matrix the auxiliary-space solves factorize).
  auto mesh = build_mesh({.n = 4, .scale = 1.0, .scatterer = true});
  AssemblyOptions aopt;
  aopt.k = 1.0;
  auto ops = assemble_operators(mesh, aopt);
  auto a = add(1.0, ops.lap_scalar, 1.0, ops.mass_scalar);
  auto b = random_vector<double>(a.rows, 151);

  std::vector<double> x_plain, x_jac;
  auto rep_plain = pcg(make_operator(a), b, x_plain, {});
  CHECK(rep_plain.converged);

  auto diag = a.diagonal();
  LinearOperator<double> jacobi{a.rows, [&diag](const std::vector<double>& v, std::vector<double>& y) {
                                  y.resize(v.size());
                                  for (size_t i = 0; i < v.size(); ++i) y[i] = v[i] / diag[i];
                                }};
  auto rep_jac = pcg(make_operator(a), b, x_jac, {}, &jacobi);
  CHECK(rep_jac.converged);
  CHECK(true_rel_residual(a, b, x_plain) <= 1e-6);
  CHECK(true_rel_residual(a, b, x_jac) <= 1e-6);
  double diff = 0, ref = 0;
  for (size_t i = 0; i < x_plain.size(); ++i) {
    diff += (x_plain[i] - x_jac[i]) * (x_plain[i] - x_jac[i]);
    ref += x_plain[i] * x_plain[i];
  }
  CHECK(std::sqrt(diff / ref) <= 1e-5);
}

TEST_CASE("pcg rejects indefinite operators") {
  CsrBuilder<double> builder(2, 2);
  builder.add(0, 0, 1.0);
  builder.add(1, 1, -1.0);
  auto a = builder.build();
  std::vector<double> b{1.0, 1.0}, x;
  CHECK_THROWS_AS(pcg(make_operator(a), b, x, {}), IndefiniteOperatorError);
}

TEST_CASE("pcg returns the best iterate it has seen") {
  // A stiff 1D Poisson chain: condition grows like n^2, so seven iterations
  // leave the monitor oscillating well above the tolerance.
  const index_t n = 90;
  CsrBuilder<double> builder(n, n);
  for (index_t i = 0; i < n; ++i) {
    builder.add(i, i, 2.0);
    if (i > 0) builder.add(i, i - 1, -1.0);
    if (i + 1 < n) builder.add(i, i + 1, -1.0);
  }
  auto spd = builder.build();
  auto b = random_vector<double>(n, 163);
  std::vector<double> x;
  KrylovOptions opt;
  opt.rtol = 1e-10;
  opt.max_iter = 7;  // stop early so the best-iterate logic matters
  auto rep = pcg(make_operator(spd), b, x, opt);
  double best = 1.0;
  for (double hval : rep.history) best = std::min(best, hval);
  CHECK(rep.relative_residual == doctest::Approx(best).epsilon(1e-14));
}

TEST_CASE("solver runs are deterministic") {
  const index_t n = 100;
  auto a = random_diag_dominant<double>(n, 167);
  auto b = random_vector<double>(n, 173);
  std::vector<double> x1, x2;
  auto r1 = gmres(make_operator(a), b, x1, {});
  auto r2 = gmres(make_operator(a), b, x2, {});
  REQUIRE(r1.history.size() == r2.history.size());
  for (size_t i = 0; i < r1.history.size(); ++i) CHECK(r1.history[i] == r2.history[i]);
  for (index_t i = 0; i < n; ++i) CHECK(x1[static_cast<size_t>(i)] == x2[static_cast<size_t>(i)]);
}

TEST_CASE("mismatched right-hand side length is rejected") {
  auto a = CsrMatrix<double>::identity(5);
  std::vector<double> b(4, 1.0), x;
  CHECK_THROWS_AS(gmres(make_operator(a), b, x, {}), DimensionError);
  CHECK_THROWS_AS(fgmres(make_operator(a), b, x, {}), DimensionError);
  CHECK_THROWS_AS(pcg(make_operator(a), b, x, {}), DimensionError);
}
