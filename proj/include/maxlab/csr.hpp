#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "maxlab/types.hpp"

namespace maxlab {

// Compressed sparse row matrix. Column indices are strictly ascending within
// each row and carry no explicit zeros unless the caller stored them.
template <class T>
struct CsrMatrix {
  index_t rows = 0;
  index_t cols = 0;
  std::vector<index_t> row_ptr;  // size rows + 1
  std::vector<index_t> col_idx;  // size nnz
  std::vector<T> values;         // size nnz

  CsrMatrix() = default;
  CsrMatrix(index_t r, index_t c) : rows(r), cols(c), row_ptr(static_cast<size_t>(r) + 1, 0) {}

  index_t nnz() const { return static_cast<index_t>(col_idx.size()); }

  static CsrMatrix identity(index_t n) {
    CsrMatrix a(n, n);
    a.col_idx.resize(static_cast<size_t>(n));
    a.values.assign(static_cast<size_t>(n), T(1));
    for (index_t i = 0; i < n; ++i) {
      a.row_ptr[static_cast<size_t>(i) + 1] = i + 1;
      a.col_idx[static_cast<size_t>(i)] = i;
    }
    return a;
  }

  // Value at (i, j); zero when the entry is not stored.
  T coeff(index_t i, index_t j) const {
    const index_t* first = col_idx.data() + row_ptr[static_cast<size_t>(i)];
    const index_t* last = col_idx.data() + row_ptr[static_cast<size_t>(i) + 1];
    const index_t* it = std::lower_bound(first, last, j);
    if (it != last && *it == j) return values[static_cast<size_t>(it - col_idx.data())];
    return T(0);
  }

  std::vector<T> diagonal() const {
    std::vector<T> d(static_cast<size_t>(std::min(rows, cols)), T(0));
    for (index_t i = 0; i < static_cast<index_t>(d.size()); ++i) d[static_cast<size_t>(i)] = coeff(i, i);
    return d;
  }

  double frobenius_norm() const {
    double s = 0;
    for (const T& v : values) s += std::norm(std::complex<double>(v));
    return std::sqrt(s);
  }
};

// Coordinate-format accumulator. Duplicate entries are summed in insertion
// order, so assembly results do not depend on how triplets were interleaved.
template <class T>
class CsrBuilder {
public:
  CsrBuilder(index_t rows, index_t cols) : rows_(rows), cols_(cols) {}

  void add(index_t i, index_t j, T v) {
    if (i < 0 || i >= rows_ || j < 0 || j >= cols_)
      throw DimensionError("CsrBuilder::add: index out of range");
    trips_.push_back({i, j, v});
  }

  void reserve(size_t n) { trips_.reserve(n); }

  CsrMatrix<T> build() const {
    std::vector<index_t> order(trips_.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](index_t a, index_t b) {
      const Trip& ta = trips_[static_cast<size_t>(a)];
      const Trip& tb = trips_[static_cast<size_t>(b)];
      if (ta.i != tb.i) return ta.i < tb.i;
      return ta.j < tb.j;
    });
    CsrMatrix<T> m(rows_, cols_);
    m.col_idx.reserve(trips_.size());
    m.values.reserve(trips_.size());
    size_t k = 0;
    for (index_t i = 0; i < rows_; ++i) {
      while (k < order.size() && trips_[static_cast<size_t>(order[k])].i == i) {
        const index_t j = trips_[static_cast<size_t>(order[k])].j;
        T sum = trips_[static_cast<size_t>(order[k])].v;
        ++k;
        while (k < order.size()) {
          const Trip& t = trips_[static_cast<size_t>(order[k])];
          if (t.i != i || t.j != j) break;
          sum += t.v;
          ++k;
        }
        m.col_idx.push_back(j);
        m.values.push_back(sum);
      }
      m.row_ptr[static_cast<size_t>(i) + 1] = static_cast<index_t>(m.col_idx.size());
    }
    return m;
  }

private:
  struct Trip {
    index_t i, j;
    T v;
  };
  index_t rows_, cols_;
  std::vector<Trip> trips_;
};

template <class T>
void spmv(const CsrMatrix<T>& a, const T* x, T* y) {
  for (index_t i = 0; i < a.rows; ++i) {
    T s(0);
    for (index_t k = a.row_ptr[static_cast<size_t>(i)]; k < a.row_ptr[static_cast<size_t>(i) + 1]; ++k)
      s += a.values[static_cast<size_t>(k)] * x[a.col_idx[static_cast<size_t>(k)]];
    y[i] = s;
  }
}

template <class T>
std::vector<T> spmv(const CsrMatrix<T>& a, const std::vector<T>& x) {
  if (static_cast<index_t>(x.size()) != a.cols)
    throw DimensionError("spmv: vector length does not match matrix columns");
  std::vector<T> y(static_cast<size_t>(a.rows));
  spmv(a, x.data(), y.data());
  return y;
}

// y += alpha * A x
template <class T>
void spmv_acc(const CsrMatrix<T>& a, T alpha, const T* x, T* y) {
  for (index_t i = 0; i < a.rows; ++i) {
    T s(0);
    for (index_t k = a.row_ptr[static_cast<size_t>(i)]; k < a.row_ptr[static_cast<size_t>(i) + 1]; ++k)
      s += a.values[static_cast<size_t>(k)] * x[a.col_idx[static_cast<size_t>(k)]];
    y[i] += alpha * s;
  }
}

// y = A^T x (no conjugation)
template <class T>
std::vector<T> spmv_transposed(const CsrMatrix<T>& a, const std::vector<T>& x) {
  if (static_cast<index_t>(x.size()) != a.rows)
    throw DimensionError("spmv_transposed: vector length does not match matrix rows");
  std::vector<T> y(static_cast<size_t>(a.cols), T(0));
  for (index_t i = 0; i < a.rows; ++i)
    for (index_t k = a.row_ptr[static_cast<size_t>(i)]; k < a.row_ptr[static_cast<size_t>(i) + 1]; ++k)
      y[a.col_idx[static_cast<size_t>(k)]] += a.values[static_cast<size_t>(k)] * x[i];
  return y;
}

template <class T>
CsrMatrix<T> transpose(const CsrMatrix<T>& a) {
  CsrMatrix<T> t(a.cols, a.rows);
  std::vector<index_t> count(static_cast<size_t>(a.cols), 0);
  for (index_t j : a.col_idx) ++count[static_cast<size_t>(j)];
  for (index_t j = 0; j < a.cols; ++j)
    t.row_ptr[static_cast<size_t>(j) + 1] = t.row_ptr[static_cast<size_t>(j)] + count[static_cast<size_t>(j)];
  t.col_idx.resize(a.col_idx.size());
  t.values.resize(a.values.size());
  std::vector<index_t> next(t.row_ptr.begin(), t.row_ptr.end() - 1);
  for (index_t i = 0; i < a.rows; ++i) {
    for (index_t k = a.row_ptr[static_cast<size_t>(i)]; k < a.row_ptr[static_cast<size_t>(i) + 1]; ++k) {
      const index_t j = a.col_idx[static_cast<size_t>(k)];
      const index_t dst = next[static_cast<size_t>(j)]++;
      t.col_idx[static_cast<size_t>(dst)] = i;
      t.values[static_cast<size_t>(dst)] = a.values[static_cast<size_t>(k)];
    }
  }
  return t;  // column order inside each row is ascending because rows of a were scanned in order
}

// alpha*A + beta*B for same-shape matrices.
template <class T>
CsrMatrix<T> add(T alpha, const CsrMatrix<T>& a, T beta, const CsrMatrix<T>& b) {
  if (a.rows != b.rows || a.cols != b.cols) throw DimensionError("add: shape mismatch");
  CsrMatrix<T> c(a.rows, a.cols);
  c.col_idx.reserve(a.col_idx.size() + b.col_idx.size());
  c.values.reserve(a.col_idx.size() + b.col_idx.size());
  for (index_t i = 0; i < a.rows; ++i) {
    index_t ka = a.row_ptr[static_cast<size_t>(i)], ea = a.row_ptr[static_cast<size_t>(i) + 1];
    index_t kb = b.row_ptr[static_cast<size_t>(i)], eb = b.row_ptr[static_cast<size_t>(i) + 1];
    while (ka < ea || kb < eb) {
      index_t ja = ka < ea ? a.col_idx[static_cast<size_t>(ka)] : a.cols;
      index_t jb = kb < eb ? b.col_idx[static_cast<size_t>(kb)] : a.cols;
      if (ja == jb) {
        c.col_idx.push_back(ja);
        c.values.push_back(alpha * a.values[static_cast<size_t>(ka)] + beta * b.values[static_cast<size_t>(kb)]);
        ++ka;
        ++kb;
      } else if (ja < jb) {
        c.col_idx.push_back(ja);
        c.values.push_back(alpha * a.values[static_cast<size_t>(ka)]);
        ++ka;
      } else {
        c.col_idx.push_back(jb);
        c.values.push_back(beta * b.values[static_cast<size_t>(kb)]);
        ++kb;
      }
    }
    c.row_ptr[static_cast<size_t>(i) + 1] = static_cast<index_t>(c.col_idx.size());
  }
  return c;
}

// Sparse * sparse product (Gustavson row-by-row with a dense accumulator).
template <class T>
CsrMatrix<T> matmul(const CsrMatrix<T>& a, const CsrMatrix<T>& b) {
  if (a.cols != b.rows) throw DimensionError("matmul: inner dimensions differ");
  CsrMatrix<T> c(a.rows, b.cols);
  std::vector<T> acc(static_cast<size_t>(b.cols), T(0));
  std::vector<index_t> marker(static_cast<size_t>(b.cols), -1);
  std::vector<index_t> cols_in_row;
  for (index_t i = 0; i < a.rows; ++i) {
    cols_in_row.clear();
    for (index_t ka = a.row_ptr[static_cast<size_t>(i)]; ka < a.row_ptr[static_cast<size_t>(i) + 1]; ++ka) {
      const index_t j = a.col_idx[static_cast<size_t>(ka)];
      const T av = a.values[static_cast<size_t>(ka)];
      for (index_t kb = b.row_ptr[static_cast<size_t>(j)]; kb < b.row_ptr[static_cast<size_t>(j) + 1]; ++kb) {
        const index_t jj = b.col_idx[static_cast<size_t>(kb)];
        if (marker[static_cast<size_t>(jj)] != i) {
          marker[static_cast<size_t>(jj)] = i;
          acc[static_cast<size_t>(jj)] = T(0);
          cols_in_row.push_back(jj);
        }
        acc[static_cast<size_t>(jj)] += av * b.values[static_cast<size_t>(kb)];
      }
    }
    std::sort(cols_in_row.begin(), cols_in_row.end());
    for (index_t jj : cols_in_row) {
      c.col_idx.push_back(jj);
      c.values.push_back(acc[static_cast<size_t>(jj)]);
    }
    c.row_ptr[static_cast<size_t>(i) + 1] = static_cast<index_t>(c.col_idx.size());
  }
  return c;
}

// Submatrix A(rows, cols). row_map/col_map give the new index of each old
// index, or -1 when the row/column is dropped.
template <class T>
CsrMatrix<T> extract_submatrix(const CsrMatrix<T>& a, const std::vector<index_t>& row_map, index_t new_rows,
                               const std::vector<index_t>& col_map, index_t new_cols) {
  if (static_cast<index_t>(row_map.size()) != a.rows || static_cast<index_t>(col_map.size()) != a.cols)
    throw DimensionError("extract_submatrix: map sizes do not match matrix shape");
  CsrMatrix<T> s(new_rows, new_cols);
  // New rows appear in old-row order only if row_map is monotone; gather via
  // an inverse list so arbitrary permutations work too.
  std::vector<index_t> old_of_new(static_cast<size_t>(new_rows), -1);
  for (index_t i = 0; i < a.rows; ++i)
    if (row_map[static_cast<size_t>(i)] >= 0) old_of_new[static_cast<size_t>(row_map[static_cast<size_t>(i)])] = i;
  std::vector<std::pair<index_t, T>> row;
  for (index_t ni = 0; ni < new_rows; ++ni) {
    const index_t i = old_of_new[static_cast<size_t>(ni)];
    if (i < 0) throw DimensionError("extract_submatrix: new row without a source row");
    row.clear();
    for (index_t k = a.row_ptr[static_cast<size_t>(i)]; k < a.row_ptr[static_cast<size_t>(i) + 1]; ++k) {
      const index_t nj = col_map[static_cast<size_t>(a.col_idx[static_cast<size_t>(k)])];
      if (nj >= 0) row.push_back({nj, a.values[static_cast<size_t>(k)]});
    }
    std::sort(row.begin(), row.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
    for (const auto& [nj, v] : row) {
      s.col_idx.push_back(nj);
      s.values.push_back(v);
    }
    s.row_ptr[static_cast<size_t>(ni) + 1] = static_cast<index_t>(s.col_idx.size());
  }
  return s;
}

// Symmetric permutation B = A(p, p) where perm[new] = old.
template <class T>
CsrMatrix<T> permute_symmetric(const CsrMatrix<T>& a, const std::vector<index_t>& perm) {
  if (a.rows != a.cols || static_cast<index_t>(perm.size()) != a.rows)
    throw DimensionError("permute_symmetric: needs square matrix and full permutation");
  std::vector<index_t> inv(perm.size());
  for (index_t ni = 0; ni < a.rows; ++ni) inv[static_cast<size_t>(perm[static_cast<size_t>(ni)])] = ni;
  CsrMatrix<T> b(a.rows, a.cols);
  b.col_idx.reserve(a.col_idx.size());
  b.values.reserve(a.values.size());
  std::vector<std::pair<index_t, T>> row;
  for (index_t ni = 0; ni < a.rows; ++ni) {
    const index_t i = perm[static_cast<size_t>(ni)];
    row.clear();
    for (index_t k = a.row_ptr[static_cast<size_t>(i)]; k < a.row_ptr[static_cast<size_t>(i) + 1]; ++k)
      row.push_back({inv[static_cast<size_t>(a.col_idx[static_cast<size_t>(k)])], a.values[static_cast<size_t>(k)]});
    std::sort(row.begin(), row.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
    for (const auto& [nj, v] : row) {
      b.col_idx.push_back(nj);
      b.values.push_back(v);
    }
    b.row_ptr[static_cast<size_t>(ni) + 1] = static_cast<index_t>(b.col_idx.size());
  }
  return b;
}

// Complex combination sum_t coef[t] * M[t] of same-shape real matrices.
inline CsrMatrix<complex_t> complex_combination(const std::vector<complex_t>& coef,
                                                const std::vector<const CsrMatrix<double>*>& mats) {
  if (coef.size() != mats.size() || mats.empty())
    throw DimensionError("complex_combination: one coefficient per matrix required");
  const index_t rows = mats[0]->rows, cols = mats[0]->cols;
  CsrBuilder<complex_t> bld(rows, cols);
  size_t total = 0;
  for (const auto* m : mats) total += m->col_idx.size();
  bld.reserve(total);
  for (size_t t = 0; t < mats.size(); ++t) {
    const CsrMatrix<double>& m = *mats[t];
    if (m.rows != rows || m.cols != cols) throw DimensionError("complex_combination: shape mismatch");
    for (index_t i = 0; i < m.rows; ++i)
      for (index_t k = m.row_ptr[static_cast<size_t>(i)]; k < m.row_ptr[static_cast<size_t>(i) + 1]; ++k)
        bld.add(i, m.col_idx[static_cast<size_t>(k)], coef[t] * m.values[static_cast<size_t>(k)]);
  }
  return bld.build();
}

inline CsrMatrix<complex_t> to_complex(const CsrMatrix<double>& a) {
  CsrMatrix<complex_t> c(a.rows, a.cols);
  c.row_ptr = a.row_ptr;
  c.col_idx = a.col_idx;
  c.values.assign(a.values.begin(), a.values.end());
  return c;
}

// Drops entries with |value| <= tol (structural cleanup after cancellation).
template <class T>
CsrMatrix<T> drop_small(const CsrMatrix<T>& a, double tol) {
  CsrMatrix<T> c(a.rows, a.cols);
  for (index_t i = 0; i < a.rows; ++i) {
    for (index_t k = a.row_ptr[static_cast<size_t>(i)]; k < a.row_ptr[static_cast<size_t>(i) + 1]; ++k) {
      if (std::abs(a.values[static_cast<size_t>(k)]) > tol) {
        c.col_idx.push_back(a.col_idx[static_cast<size_t>(k)]);
        c.values.push_back(a.values[static_cast<size_t>(k)]);
      }
    }
    c.row_ptr[static_cast<size_t>(i) + 1] = static_cast<index_t>(c.col_idx.size());
  }
  return c;
}

template <class T>
double vec_norm2(const std::vector<T>& x) {
  double s = 0;
  for (const T& v : x) s += std::norm(std::complex<double>(v));
  return std::sqrt(s);
}

template <class T>
std::vector<T> vec_sub(const std::vector<T>& a, const std::vector<T>& b) {
  if (a.size() != b.size()) throw DimensionError("vec_sub: length mismatch");
  std::vector<T> r(a.size());
  for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

}  // namespace maxlab
