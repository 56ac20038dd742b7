#include "maxlab/dense.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <cmath>

namespace maxlab {

namespace {

template <class T>
using EMat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;

template <class T>
Eigen::Map<EMat<T>> map(DenseBlock<T>& a) {
  return Eigen::Map<EMat<T>>(a.data.data(), a.rows, a.cols);
}

template <class T>
Eigen::Map<const EMat<T>> map(const DenseBlock<T>& a) {
  return Eigen::Map<const EMat<T>>(a.data.data(), a.rows, a.cols);
}

}  // namespace

template <class T>
void gemm_acc(T alpha, const DenseBlock<T>& a, const DenseBlock<T>& b, DenseBlock<T>& c) {
  if (a.cols != b.rows || c.rows != a.rows || c.cols != b.cols)
    throw DimensionError("gemm_acc: shape mismatch");
  map(c).noalias() += alpha * (map(a) * map(b));
}

template <class T>
DenseBlock<T> gemm(const DenseBlock<T>& a, const DenseBlock<T>& b) {
  if (a.cols != b.rows) throw DimensionError("gemm: inner dimensions differ");
  DenseBlock<T> c(a.rows, b.cols);
  map(c).noalias() = map(a) * map(b);
  return c;
}

template <class T>
void gemv_acc(T alpha, const DenseBlock<T>& a, const T* x, T* y) {
  Eigen::Map<const Eigen::Matrix<T, Eigen::Dynamic, 1>> xv(x, a.cols);
  Eigen::Map<Eigen::Matrix<T, Eigen::Dynamic, 1>> yv(y, a.rows);
  yv.noalias() += alpha * (map(a) * xv);
}

template <class T>
void gemv_transposed_acc(T alpha, const DenseBlock<T>& a, const T* x, T* y) {
  Eigen::Map<const Eigen::Matrix<T, Eigen::Dynamic, 1>> xv(x, a.rows);
  Eigen::Map<Eigen::Matrix<T, Eigen::Dynamic, 1>> yv(y, a.cols);
  yv.noalias() += alpha * (map(a).transpose() * xv);
}

template <class T>
void lu_factor_inplace(DenseBlock<T>& a, std::vector<index_t>& piv) {
  if (a.rows != a.cols) throw DimensionError("lu_factor_inplace: block must be square");
  const index_t n = a.rows;
  piv.assign(static_cast<size_t>(n), 0);
  auto m = map(a);
  for (index_t k = 0; k < n; ++k) {
    // Partial pivoting: largest magnitude in column k at or below the diagonal.
    index_t p = k;
    double best = std::abs(m(k, k));
    for (index_t i = k + 1; i < n; ++i) {
      const double v = std::abs(m(i, k));
      if (v > best) {
        best = v;
        p = i;
      }
    }
    if (best == 0.0) throw SingularMatrixError("lu_factor_inplace: zero pivot column at step " + std::to_string(k));
    piv[static_cast<size_t>(k)] = p;
    if (p != k) m.row(k).swap(m.row(p));
    const T pivot = m(k, k);
    for (index_t i = k + 1; i < n; ++i) m(i, k) /= pivot;
    if (k + 1 < n)
      m.block(k + 1, k + 1, n - k - 1, n - k - 1).noalias() -= m.col(k).segment(k + 1, n - k - 1) * m.row(k).segment(k + 1, n - k - 1);
  }
}

template <class T>
void lu_solve_inplace(const DenseBlock<T>& lu, const std::vector<index_t>& piv, T* x) {
  const index_t n = lu.rows;
  for (index_t k = 0; k < n; ++k) {
    const index_t p = piv[static_cast<size_t>(k)];
    if (p != k) std::swap(x[k], x[p]);
  }
  auto m = map(lu);
  Eigen::Map<Eigen::Matrix<T, Eigen::Dynamic, 1>> xv(x, n);
  m.template triangularView<Eigen::UnitLower>().solveInPlace(xv);
  m.template triangularView<Eigen::Upper>().solveInPlace(xv);
}

template <class T>
void apply_row_swaps(const std::vector<index_t>& piv, DenseBlock<T>& b) {
  auto m = map(b);
  for (index_t k = 0; k < static_cast<index_t>(piv.size()); ++k) {
    const index_t p = piv[static_cast<size_t>(k)];
    if (p != k) m.row(k).swap(m.row(p));
  }
}

template <class T>
void trsm_left_lower_unit(const DenseBlock<T>& lu, DenseBlock<T>& b) {
  if (lu.rows != b.rows) throw DimensionError("trsm_left_lower_unit: shape mismatch");
  map(lu).template triangularView<Eigen::UnitLower>().solveInPlace(map(b));
}

template <class T>
void trsm_right_upper(const DenseBlock<T>& lu, DenseBlock<T>& b) {
  if (lu.rows != b.cols) throw DimensionError("trsm_right_upper: shape mismatch");
  auto bm = map(b);
  map(lu).template triangularView<Eigen::Upper>().template solveInPlace<Eigen::OnTheRight>(bm);
}

template <class T>
void trsm_left_upper(const DenseBlock<T>& lu, DenseBlock<T>& b) {
  if (lu.rows != b.rows) throw DimensionError("trsm_left_upper: shape mismatch");
  auto bm = map(b);
  map(lu).template triangularView<Eigen::Upper>().solveInPlace(bm);
}

template <class T>
LowRankBlock<T> truncated_svd(const DenseBlock<T>& a, double tol) {
  if (tol < 0) throw DimensionError("truncated_svd: tol must be nonnegative");
  Eigen::BDCSVD<EMat<T>> svd(map(a), Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sig = svd.singularValues();
  const double smax = sig.size() > 0 ? sig(0) : 0.0;
  index_t r = 0;
  for (Eigen::Index i = 0; i < sig.size(); ++i)
    if (sig(i) > tol * smax && sig(i) > 0.0) ++r;
  LowRankBlock<T> lr;
  lr.left = DenseBlock<T>(a.rows, r);
  lr.right = DenseBlock<T>(r, a.cols);
  map(lr.left) = svd.matrixU().leftCols(r);
  map(lr.right) = sig.head(r).template cast<T>().asDiagonal() * svd.matrixV().leftCols(r).adjoint();
  return lr;
}

template <class T>
double spectral_norm(const DenseBlock<T>& a) {
  if (a.rows == 0 || a.cols == 0) return 0.0;
  Eigen::JacobiSVD<EMat<T>> svd(map(a));
  return svd.singularValues().size() > 0 ? svd.singularValues()(0) : 0.0;
}

#define MAXLAB_INSTANTIATE_DENSE(T)                                                             \
  template void gemm_acc<T>(T, const DenseBlock<T>&, const DenseBlock<T>&, DenseBlock<T>&);     \
  template DenseBlock<T> gemm<T>(const DenseBlock<T>&, const DenseBlock<T>&);                   \
  template void gemv_acc<T>(T, const DenseBlock<T>&, const T*, T*);                             \
  template void gemv_transposed_acc<T>(T, const DenseBlock<T>&, const T*, T*);                  \
  template void lu_factor_inplace<T>(DenseBlock<T>&, std::vector<index_t>&);                    \
  template void lu_solve_inplace<T>(const DenseBlock<T>&, const std::vector<index_t>&, T*);     \
  template void apply_row_swaps<T>(const std::vector<index_t>&, DenseBlock<T>&);                \
  template void trsm_left_lower_unit<T>(const DenseBlock<T>&, DenseBlock<T>&);                  \
  template void trsm_right_upper<T>(const DenseBlock<T>&, DenseBlock<T>&);                      \
  template void trsm_left_upper<T>(const DenseBlock<T>&, DenseBlock<T>&);                       \
  template LowRankBlock<T> truncated_svd<T>(const DenseBlock<T>&, double);                      \
  template double spectral_norm<T>(const DenseBlock<T>&);

MAXLAB_INSTANTIATE_DENSE(double)
MAXLAB_INSTANTIATE_DENSE(complex_t)

#undef MAXLAB_INSTANTIATE_DENSE

}  // namespace maxlab
