#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "maxlab/csr.hpp"
#include "maxlab/types.hpp"

namespace maxlab {

template <class T>
struct LinearOperator {
  index_t n = 0;
  std::function<void(const std::vector<T>&, std::vector<T>&)> apply;

  std::vector<T> operator()(const std::vector<T>& x) const {
    std::vector<T> y(static_cast<size_t>(n));
    apply(x, y);
    return y;
  }
};

template <class T>
LinearOperator<T> make_operator(const CsrMatrix<T>& a) {
  if (a.rows != a.cols) throw DimensionError("make_operator: square matrix required");
  return {a.rows, [&a](const std::vector<T>& x, std::vector<T>& y) { spmv(a, x.data(), y.data()); }};
}

struct KrylovOptions {
  double rtol = 1e-8;
  int max_iter = 1000;
  bool record_history = true;
};

struct SolveReport {
  bool converged = false;
  int iterations = 0;
  double relative_residual = 0;  // the monitored quantity at exit
  std::string stop_reason;
  std::vector<double> history;  // monitored relative residual, history[0] = 1
};

namespace detail {

inline double conj_only(double x) { return x; }
inline complex_t conj_only(const complex_t& x) { return std::conj(x); }

template <class T>
T dot_c(const std::vector<T>& a, const std::vector<T>& b) {
  T s(0);
  for (size_t i = 0; i < a.size(); ++i) s += conj_only(a[i]) * b[i];
  return s;
}

// Rotation eliminating h2 against h1: c real, |c|^2 + |s|^2 = 1.
template <class T>
void make_givens(const T& h1, const T& h2, double& c, T& s) {
  const double a1 = std::abs(h1), a2 = std::abs(h2);
  const double r = std::hypot(a1, a2);
  if (r == 0) {
    c = 1;
    s = T(0);
    return;
  }
  if (a1 == 0) {
    c = 0;
    s = T(1);
    return;
  }
  c = a1 / r;
  s = (h1 / T(a1)) * conj_only(h2) / T(r);
}

}  // namespace detail

// Left-preconditioned GMRES with modified Gram-Schmidt and one conditional
// reorthogonalization pass. No restarting: the basis grows until convergence
// or max_iter. The monitored residual is the preconditioned one; with no
// preconditioner it is the true residual. Starts from x = 0.
template <class T>
SolveReport gmres(const LinearOperator<T>& a, const std::vector<T>& b, std::vector<T>& x, const KrylovOptions& opt,
                  const LinearOperator<T>* left_precond = nullptr) {
  const index_t n = a.n;
  if (static_cast<index_t>(b.size()) != n) throw DimensionError("gmres: rhs length mismatch");
  SolveReport rep;
  x.assign(static_cast<size_t>(n), T(0));

  auto precond = [&](const std::vector<T>& v) { return left_precond ? (*left_precond)(v) : v; };

  std::vector<T> r0 = precond(b);
  const double beta = vec_norm2(r0);
  if (opt.record_history) rep.history.push_back(1.0);
  if (beta == 0) {
    rep.converged = true;
    rep.stop_reason = "zero right-hand side";
    return rep;
  }

  std::vector<std::vector<T>> v;  // orthonormal basis
  std::vector<std::vector<T>> h;  // Hessenberg columns (j + 2 entries each)
  std::vector<double> cs;
  std::vector<T> sn;
  std::vector<T> g{T(beta)};  // rotated rhs of the least-squares problem

  v.push_back(std::move(r0));
  for (T& t : v[0]) t /= T(beta);

  int j = 0;
  for (; j < opt.max_iter; ++j) {
    std::vector<T> w = precond(a(v[static_cast<size_t>(j)]));

    // Modified Gram-Schmidt, one extra pass when cancellation ate the vector.
    std::vector<T> hj(static_cast<size_t>(j) + 2, T(0));
    const double before = vec_norm2(w);
    for (int i = 0; i <= j; ++i) {
      const T hij = detail::dot_c(v[static_cast<size_t>(i)], w);
      hj[static_cast<size_t>(i)] = hij;
      for (index_t p = 0; p < n; ++p) w[static_cast<size_t>(p)] -= hij * v[static_cast<size_t>(i)][static_cast<size_t>(p)];
    }
    if (vec_norm2(w) < 1e-8 * before) {
      for (int i = 0; i <= j; ++i) {
        const T corr = detail::dot_c(v[static_cast<size_t>(i)], w);
        hj[static_cast<size_t>(i)] += corr;
        for (index_t p = 0; p < n; ++p) w[static_cast<size_t>(p)] -= corr * v[static_cast<size_t>(i)][static_cast<size_t>(p)];
      }
    }
    const double hlast = vec_norm2(w);
    hj[static_cast<size_t>(j) + 1] = T(hlast);

    // Apply the accumulated rotations, then a new one to zero the subdiagonal.
    for (int i = 0; i < j; ++i) {
      const T t1 = hj[static_cast<size_t>(i)], t2 = hj[static_cast<size_t>(i) + 1];
      hj[static_cast<size_t>(i)] = cs[static_cast<size_t>(i)] * t1 + sn[static_cast<size_t>(i)] * t2;
      hj[static_cast<size_t>(i) + 1] = -detail::conj_only(sn[static_cast<size_t>(i)]) * t1 + cs[static_cast<size_t>(i)] * t2;
    }
    double c;
    T s;
    detail::make_givens(hj[static_cast<size_t>(j)], hj[static_cast<size_t>(j) + 1], c, s);
    cs.push_back(c);
    sn.push_back(s);
    hj[static_cast<size_t>(j)] = c * hj[static_cast<size_t>(j)] + s * hj[static_cast<size_t>(j) + 1];
    hj[static_cast<size_t>(j) + 1] = T(0);
    g.push_back(-detail::conj_only(s) * g[static_cast<size_t>(j)]);
    g[static_cast<size_t>(j)] = c * g[static_cast<size_t>(j)];
    h.push_back(std::move(hj));

    const double res = std::abs(g[static_cast<size_t>(j) + 1]) / beta;
    if (opt.record_history) rep.history.push_back(res);
    rep.relative_residual = res;

    const bool happy = hlast <= 1e-14;
    if (res <= opt.rtol || happy) {
      rep.converged = true;
      rep.stop_reason = happy && res > opt.rtol ? "invariant subspace reached" : "tolerance reached";
      ++j;
      break;
    }
    if (j + 1 < opt.max_iter) {
      for (T& t : w) t /= T(hlast);
      v.push_back(std::move(w));
    }
  }
  rep.iterations = j;
  if (!rep.converged) rep.stop_reason = "iteration limit reached";

  // Back substitution for y, then x = V y.
  const int m = static_cast<int>(h.size());
  std::vector<T> y(static_cast<size_t>(m));
  for (int i = m - 1; i >= 0; --i) {
    T s2 = g[static_cast<size_t>(i)];
    for (int kk = i + 1; kk < m; ++kk) s2 -= h[static_cast<size_t>(kk)][static_cast<size_t>(i)] * y[static_cast<size_t>(kk)];
    y[static_cast<size_t>(i)] = s2 / h[static_cast<size_t>(i)][static_cast<size_t>(i)];
  }
  for (int i = 0; i < m; ++i)
    for (index_t p = 0; p < n; ++p) x[static_cast<size_t>(p)] += y[static_cast<size_t>(i)] * v[static_cast<size_t>(i)][static_cast<size_t>(p)];
  return rep;
}

// Flexible GMRES: right preconditioning that may change from step to step.
// The monitored residual is the true one. Starts from x = 0.
template <class T>
SolveReport fgmres(const LinearOperator<T>& a, const std::vector<T>& b, std::vector<T>& x, const KrylovOptions& opt,
                   const LinearOperator<T>* right_precond = nullptr) {
  const index_t n = a.n;
  if (static_cast<index_t>(b.size()) != n) throw DimensionError("fgmres: rhs length mismatch");
  SolveReport rep;
  x.assign(static_cast<size_t>(n), T(0));

  const double beta = vec_norm2(b);
  if (opt.record_history) rep.history.push_back(1.0);
  if (beta == 0) {
    rep.converged = true;
    rep.stop_reason = "zero right-hand side";
    return rep;
  }

  std::vector<std::vector<T>> v, z;  // Arnoldi basis and preconditioned copies
  std::vector<std::vector<T>> h;
  std::vector<double> cs;
  std::vector<T> sn;
  std::vector<T> g{T(beta)};

  v.push_back(b);
  for (T& t : v[0]) t /= T(beta);

  int j = 0;
  for (; j < opt.max_iter; ++j) {
    z.push_back(right_precond ? (*right_precond)(v[static_cast<size_t>(j)]) : v[static_cast<size_t>(j)]);
    std::vector<T> w = a(z.back());

    std::vector<T> hj(static_cast<size_t>(j) + 2, T(0));
    const double before = vec_norm2(w);
    for (int i = 0; i <= j; ++i) {
      const T hij = detail::dot_c(v[static_cast<size_t>(i)], w);
      hj[static_cast<size_t>(i)] = hij;
      for (index_t p = 0; p < n; ++p) w[static_cast<size_t>(p)] -= hij * v[static_cast<size_t>(i)][static_cast<size_t>(p)];
    }
    if (vec_norm2(w) < 1e-8 * before) {
      for (int i = 0; i <= j; ++i) {
        const T corr = detail::dot_c(v[static_cast<size_t>(i)], w);
        hj[static_cast<size_t>(i)] += corr;
        for (index_t p = 0; p < n; ++p) w[static_cast<size_t>(p)] -= corr * v[static_cast<size_t>(i)][static_cast<size_t>(p)];
      }
    }
    const double hlast = vec_norm2(w);
    hj[static_cast<size_t>(j) + 1] = T(hlast);

    for (int i = 0; i < j; ++i) {
      const T t1 = hj[static_cast<size_t>(i)], t2 = hj[static_cast<size_t>(i) + 1];
      hj[static_cast<size_t>(i)] = cs[static_cast<size_t>(i)] * t1 + sn[static_cast<size_t>(i)] * t2;
      hj[static_cast<size_t>(i) + 1] = -detail::conj_only(sn[static_cast<size_t>(i)]) * t1 + cs[static_cast<size_t>(i)] * t2;
    }
    double c;
    T s;
    detail::make_givens(hj[static_cast<size_t>(j)], hj[static_cast<size_t>(j) + 1], c, s);
    cs.push_back(c);
    sn.push_back(s);
    hj[static_cast<size_t>(j)] = c * hj[static_cast<size_t>(j)] + s * hj[static_cast<size_t>(j) + 1];
    hj[static_cast<size_t>(j) + 1] = T(0);
    g.push_back(-detail::conj_only(s) * g[static_cast<size_t>(j)]);
    g[static_cast<size_t>(j)] = c * g[static_cast<size_t>(j)];
    h.push_back(std::move(hj));

    const double res = std::abs(g[static_cast<size_t>(j) + 1]) / beta;
    if (opt.record_history) rep.history.push_back(res);
    rep.relative_residual = res;

    const bool happy = hlast <= 1e-14;
    if (res <= opt.rtol || happy) {
      rep.converged = true;
      rep.stop_reason = happy && res > opt.rtol ? "invariant subspace reached" : "tolerance reached";
      ++j;
      break;
    }
    if (j + 1 < opt.max_iter) {
      for (T& t : w) t /= T(hlast);
      v.push_back(std::move(w));
    }
  }
  rep.iterations = j;
  if (!rep.converged) rep.stop_reason = "iteration limit reached";

  const int m = static_cast<int>(h.size());
  std::vector<T> y(static_cast<size_t>(m));
  for (int i = m - 1; i >= 0; --i) {
    T s2 = g[static_cast<size_t>(i)];
    for (int kk = i + 1; kk < m; ++kk) s2 -= h[static_cast<size_t>(kk)][static_cast<size_t>(i)] * y[static_cast<size_t>(kk)];
    y[static_cast<size_t>(i)] = s2 / h[static_cast<size_t>(i)][static_cast<size_t>(i)];
  }
  for (int i = 0; i < m; ++i)
    for (index_t p = 0; p < n; ++p) x[static_cast<size_t>(p)] += y[static_cast<size_t>(i)] * z[static_cast<size_t>(i)][static_cast<size_t>(p)];
  return rep;
}

// Preconditioned conjugate gradients for SPD operators. Monitors
// sqrt(r' M^{-1} r) relative to its initial value and returns the iterate
// with the smallest monitored value seen. Throws IndefiniteOperatorError
// when a curvature or preconditioner inner product turns nonpositive.
inline SolveReport pcg(const LinearOperator<double>& a, const std::vector<double>& b, std::vector<double>& x,
                       const KrylovOptions& opt, const LinearOperator<double>* precond = nullptr) {
  const index_t n = a.n;
  if (static_cast<index_t>(b.size()) != n) throw DimensionError("pcg: rhs length mismatch");
  SolveReport rep;
  x.assign(static_cast<size_t>(n), 0.0);

  std::vector<double> r = b;
  std::vector<double> z = precond ? (*precond)(r) : r;
  double rz = detail::dot_c(r, z);
  if (rz < 0) throw IndefiniteOperatorError("pcg: preconditioner produced a negative inner product");
  const double norm0 = std::sqrt(rz);
  if (opt.record_history) rep.history.push_back(1.0);
  if (norm0 == 0) {
    rep.converged = true;
    rep.stop_reason = "zero right-hand side";
    return rep;
  }

  std::vector<double> p = z;
  std::vector<double> best_x = x;
  double best_res = 1.0;

  int it = 0;
  for (; it < opt.max_iter; ++it) {
    const std::vector<double> ap = a(p);
    const double pap = detail::dot_c(p, ap);
    if (pap <= 0) throw IndefiniteOperatorError("pcg: operator has nonpositive curvature");
    const double alpha = rz / pap;
    for (index_t i = 0; i < n; ++i) {
      x[static_cast<size_t>(i)] += alpha * p[static_cast<size_t>(i)];
      r[static_cast<size_t>(i)] -= alpha * ap[static_cast<size_t>(i)];
    }
    z = precond ? (*precond)(r) : r;
    const double rz_next = detail::dot_c(r, z);
    if (rz_next < 0) throw IndefiniteOperatorError("pcg: preconditioner produced a negative inner product");
    const double res = std::sqrt(rz_next) / norm0;
    if (opt.record_history) rep.history.push_back(res);
    rep.relative_residual = res;
    if (res < best_res) {
      best_res = res;
      best_x = x;
    }
    if (res <= opt.rtol) {
      rep.converged = true;
      rep.stop_reason = "tolerance reached";
      ++it;
      break;
    }
    const double betak = rz_next / rz;
    rz = rz_next;
    for (index_t i = 0; i < n; ++i) p[static_cast<size_t>(i)] = z[static_cast<size_t>(i)] + betak * p[static_cast<size_t>(i)];
  }
  rep.iterations = it;
  if (!rep.converged) rep.stop_reason = "iteration limit reached";
  if (best_res < rep.relative_residual) {
    x = best_x;
    rep.relative_residual = best_res;
  }
  return rep;
}

}  // namespace maxlab
