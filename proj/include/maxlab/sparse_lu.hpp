#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "maxlab/csr.hpp"
#include "maxlab/ordering.hpp"
#include "maxlab/types.hpp"

namespace maxlab {

// Sparse LU factors P A = L U in compressed-column form. L has a unit diagonal
// (stored implicitly); row indices of both factors are pivot positions.
template <class T>
struct SparseLu {
  index_t n = 0;
  std::vector<index_t> lp, li;
  std::vector<T> lx;
  std::vector<index_t> up, ui;  // strictly above the diagonal; diagonal kept in udiag
  std::vector<T> ux;
  std::vector<T> udiag;
  std::vector<index_t> pivot_row;  // pivot_row[k] = original row placed at position k

  size_t factor_entries() const { return li.size() + ui.size() + static_cast<size_t>(n); }

  // x := U^{-1} L^{-1} P x
  void solve(T* x) const {
    std::vector<T> y(static_cast<size_t>(n));
    for (index_t k = 0; k < n; ++k) y[static_cast<size_t>(k)] = x[pivot_row[static_cast<size_t>(k)]];
    for (index_t j = 0; j < n; ++j) {
      const T yj = y[static_cast<size_t>(j)];
      if (yj == T(0)) continue;
      for (index_t p = lp[static_cast<size_t>(j)]; p < lp[static_cast<size_t>(j) + 1]; ++p)
        y[static_cast<size_t>(li[static_cast<size_t>(p)])] -= lx[static_cast<size_t>(p)] * yj;
    }
    for (index_t j = n - 1; j >= 0; --j) {
      y[static_cast<size_t>(j)] /= udiag[static_cast<size_t>(j)];
      const T yj = y[static_cast<size_t>(j)];
      if (yj == T(0)) continue;
      for (index_t p = up[static_cast<size_t>(j)]; p < up[static_cast<size_t>(j) + 1]; ++p)
        y[static_cast<size_t>(ui[static_cast<size_t>(p)])] -= ux[static_cast<size_t>(p)] * yj;
    }
    std::copy(y.begin(), y.end(), x);
  }

  std::vector<T> solve(std::vector<T> b) const {
    if (static_cast<index_t>(b.size()) != n) throw DimensionError("SparseLu::solve: length mismatch");
    solve(b.data());
    return b;
  }
};

// Left-looking factorization with partial pivoting. At each column the pivot
// is the largest remaining magnitude, ties broken by lowest original row
// index. A column with no admissible pivot, or a pivot below 1e-14 times the
// largest entry of its original row, raises SingularMatrixError.
template <class T>
SparseLu<T> sparse_lu(const CsrMatrix<T>& a) {
  if (a.rows != a.cols) throw DimensionError("sparse_lu: square matrix required");
  const index_t n = a.rows;
  const CsrMatrix<T> acsc = transpose(a);  // rows of A^T are the columns of A

  std::vector<double> row_max(static_cast<size_t>(n), 0.0);
  for (index_t i = 0; i < n; ++i)
    for (index_t k = a.row_ptr[static_cast<size_t>(i)]; k < a.row_ptr[static_cast<size_t>(i) + 1]; ++k)
      row_max[static_cast<size_t>(i)] = std::max(row_max[static_cast<size_t>(i)], std::abs(a.values[static_cast<size_t>(k)]));

  SparseLu<T> f;
  f.n = n;
  f.lp.assign(static_cast<size_t>(n) + 1, 0);
  f.up.assign(static_cast<size_t>(n) + 1, 0);
  f.udiag.assign(static_cast<size_t>(n), T(0));
  f.pivot_row.assign(static_cast<size_t>(n), -1);

  std::vector<index_t> pinv(static_cast<size_t>(n), -1);  // original row -> pivot position
  std::vector<T> x(static_cast<size_t>(n), T(0));
  std::vector<index_t> visited(static_cast<size_t>(n), -1);
  std::vector<index_t> reach(static_cast<size_t>(n));
  std::vector<index_t> stack(static_cast<size_t>(n)), pstack(static_cast<size_t>(n));

  for (index_t j = 0; j < n; ++j) {
    // Symbolic step: reach of A(:,j) through the columns of L already built,
    // collected in topological (reverse postorder) order in reach[top..n).
    index_t top = n;
    for (index_t k = acsc.row_ptr[static_cast<size_t>(j)]; k < acsc.row_ptr[static_cast<size_t>(j) + 1]; ++k) {
      index_t start = acsc.col_idx[static_cast<size_t>(k)];
      if (visited[static_cast<size_t>(start)] == j) continue;
      index_t sp = 0;
      stack[0] = start;
      pstack[0] = pinv[static_cast<size_t>(start)] >= 0 ? f.lp[static_cast<size_t>(pinv[static_cast<size_t>(start)])] : 0;
      visited[static_cast<size_t>(start)] = j;
      while (sp >= 0) {
        const index_t node = stack[static_cast<size_t>(sp)];
        const index_t col = pinv[static_cast<size_t>(node)];
        bool descended = false;
        if (col >= 0) {
          index_t p = pstack[static_cast<size_t>(sp)];
          const index_t pend = f.lp[static_cast<size_t>(col) + 1];
          for (; p < pend; ++p) {
            const index_t r = f.li[static_cast<size_t>(p)];
            if (visited[static_cast<size_t>(r)] != j) {
              visited[static_cast<size_t>(r)] = j;
              pstack[static_cast<size_t>(sp)] = p + 1;
              ++sp;
              stack[static_cast<size_t>(sp)] = r;
              pstack[static_cast<size_t>(sp)] = pinv[static_cast<size_t>(r)] >= 0 ? f.lp[static_cast<size_t>(pinv[static_cast<size_t>(r)])] : 0;
              descended = true;
              break;
            }
          }
        }
        if (!descended) {
          reach[static_cast<size_t>(--top)] = node;
          --sp;
        }
      }
    }

    // Numeric step: sparse triangular solve against the finished L columns.
    for (index_t t = top; t < n; ++t) x[static_cast<size_t>(reach[static_cast<size_t>(t)])] = T(0);
    for (index_t k = acsc.row_ptr[static_cast<size_t>(j)]; k < acsc.row_ptr[static_cast<size_t>(j) + 1]; ++k)
      x[static_cast<size_t>(acsc.col_idx[static_cast<size_t>(k)])] = acsc.values[static_cast<size_t>(k)];
    for (index_t t = top; t < n; ++t) {
      const index_t node = reach[static_cast<size_t>(t)];
      const index_t col = pinv[static_cast<size_t>(node)];
      if (col < 0) continue;
      const T xk = x[static_cast<size_t>(node)];
      f.ui.push_back(col);
      f.ux.push_back(xk);
      if (xk == T(0)) continue;
      for (index_t p = f.lp[static_cast<size_t>(col)]; p < f.lp[static_cast<size_t>(col) + 1]; ++p)
        x[static_cast<size_t>(f.li[static_cast<size_t>(p)])] -= f.lx[static_cast<size_t>(p)] * xk;
    }

    // Pivot: largest magnitude among rows not yet pivoted, lowest index on ties.
    index_t ipiv = -1;
    double best = -1.0;
    for (index_t t = top; t < n; ++t) {
      const index_t node = reach[static_cast<size_t>(t)];
      if (pinv[static_cast<size_t>(node)] >= 0) continue;
      const double mag = std::abs(x[static_cast<size_t>(node)]);
      if (mag > best || (mag == best && (ipiv < 0 || node < ipiv))) {
        best = mag;
        ipiv = node;
      }
    }
    if (ipiv < 0 || best == 0.0)
      throw SingularMatrixError("sparse_lu: no admissible pivot in column " + std::to_string(j));
    if (best < 1e-14 * row_max[static_cast<size_t>(ipiv)])
      throw SingularMatrixError("sparse_lu: pivot in column " + std::to_string(j) + " is negligible against row " +
                                std::to_string(ipiv));
    pinv[static_cast<size_t>(ipiv)] = j;
    f.pivot_row[static_cast<size_t>(j)] = ipiv;
    const T pivot = x[static_cast<size_t>(ipiv)];
    f.udiag[static_cast<size_t>(j)] = pivot;
    for (index_t t = top; t < n; ++t) {
      const index_t node = reach[static_cast<size_t>(t)];
      if (pinv[static_cast<size_t>(node)] >= 0 || node == ipiv) continue;
      const T v = x[static_cast<size_t>(node)] / pivot;
      if (v != T(0)) {
        f.li.push_back(node);  // original row id; remapped to pivot position below
        f.lx.push_back(v);
      }
    }
    f.lp[static_cast<size_t>(j) + 1] = static_cast<index_t>(f.li.size());
    f.up[static_cast<size_t>(j) + 1] = static_cast<index_t>(f.ui.size());
  }

  // Rewrite L row ids into pivot positions now that the permutation is total.
  for (index_t& r : f.li) r = pinv[static_cast<size_t>(r)];
  return f;
}

// Convenience direct solver: optional reverse Cuthill-McKee preorder to tame
// fill, then Gilbert-Peierls on the permuted matrix.
template <class T>
class LuSolver {
public:
  explicit LuSolver(const CsrMatrix<T>& a, bool use_rcm = true) {
    if (use_rcm) {
      perm_ = reverse_cuthill_mckee(a);
      lu_ = sparse_lu(permute_symmetric(a, perm_));
    } else {
      lu_ = sparse_lu(a);
    }
  }

  std::vector<T> solve(const std::vector<T>& b) const {
    if (perm_.empty()) return lu_.solve(b);
    std::vector<T> pb(b.size());
    for (size_t k = 0; k < perm_.size(); ++k) pb[k] = b[static_cast<size_t>(perm_[k])];
    pb = lu_.solve(std::move(pb));
    std::vector<T> xf(b.size());
    for (size_t k = 0; k < perm_.size(); ++k) xf[static_cast<size_t>(perm_[k])] = pb[k];
    return xf;
  }

  size_t factor_entries() const { return lu_.factor_entries(); }

private:
  std::vector<index_t> perm_;  // perm_[new] = old
  SparseLu<T> lu_;
};

}  // namespace maxlab
