#pragma once

#include <vector>

#include "maxlab/types.hpp"

namespace maxlab {

// Column-major dense block.
template <class T>
struct DenseBlock {
  index_t rows = 0;
  index_t cols = 0;
  std::vector<T> data;

  DenseBlock() = default;
  DenseBlock(index_t r, index_t c) : rows(r), cols(c), data(static_cast<size_t>(r) * static_cast<size_t>(c), T(0)) {}

  T& operator()(index_t i, index_t j) { return data[static_cast<size_t>(j) * rows + i]; }
  const T& operator()(index_t i, index_t j) const { return data[static_cast<size_t>(j) * rows + i]; }

  size_t entries() const { return data.size(); }
};

// Rank-r factorization left (m x r) * right (r x n); right already carries the
// singular values, so the plain product reconstructs the block.
template <class T>
struct LowRankBlock {
  DenseBlock<T> left;
  DenseBlock<T> right;

  index_t rank() const { return left.cols; }
  size_t entries() const { return left.entries() + right.entries(); }
};

// C += alpha * A * B
template <class T>
void gemm_acc(T alpha, const DenseBlock<T>& a, const DenseBlock<T>& b, DenseBlock<T>& c);

template <class T>
DenseBlock<T> gemm(const DenseBlock<T>& a, const DenseBlock<T>& b);

// y += alpha * A x and y += alpha * A^T x on raw segments.
template <class T>
void gemv_acc(T alpha, const DenseBlock<T>& a, const T* x, T* y);
template <class T>
void gemv_transposed_acc(T alpha, const DenseBlock<T>& a, const T* x, T* y);

// In-place LU with partial pivoting; piv[k] is the row swapped into position k
// at step k. Throws SingularMatrixError on an exactly zero pivot column.
template <class T>
void lu_factor_inplace(DenseBlock<T>& a, std::vector<index_t>& piv);

// x := U^{-1} L^{-1} P x for the packed factors from lu_factor_inplace.
template <class T>
void lu_solve_inplace(const DenseBlock<T>& lu, const std::vector<index_t>& piv, T* x);

// Applies the row swaps recorded in piv to a rectangular block: B := P B.
template <class T>
void apply_row_swaps(const std::vector<index_t>& piv, DenseBlock<T>& b);

// B := L^{-1} B with L the unit lower triangle of the packed factor.
template <class T>
void trsm_left_lower_unit(const DenseBlock<T>& lu, DenseBlock<T>& b);

// B := B U^{-1} with U the upper triangle of the packed factor.
template <class T>
void trsm_right_upper(const DenseBlock<T>& lu, DenseBlock<T>& b);

// B := U^{-1} B with U the upper triangle of the packed factor.
template <class T>
void trsm_left_upper(const DenseBlock<T>& lu, DenseBlock<T>& b);

// Truncated SVD keeping singular values sigma_i > tol * sigma_max. A zero
// block yields rank 0. tol is a relative threshold and must be >= 0.
template <class T>
LowRankBlock<T> truncated_svd(const DenseBlock<T>& a, double tol);

// Spectral norm (largest singular value); used to scale compression thresholds.
template <class T>
double spectral_norm(const DenseBlock<T>& a);

}  // namespace maxlab
