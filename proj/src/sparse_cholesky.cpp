#include "maxlab/sparse_cholesky.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace maxlab {

SkylineCholesky::SkylineCholesky(const CsrMatrix<double>& a) {
  if (a.rows != a.cols) throw DimensionError("SkylineCholesky: square matrix required");
  n_ = a.rows;
  first_.assign(static_cast<size_t>(n_), 0);
  for (index_t i = 0; i < n_; ++i) {
    index_t f = i;
    for (index_t k = a.row_ptr[static_cast<size_t>(i)]; k < a.row_ptr[static_cast<size_t>(i) + 1]; ++k)
      f = std::min(f, a.col_idx[static_cast<size_t>(k)]);
    first_[static_cast<size_t>(i)] = f;
  }
  row_start_.assign(static_cast<size_t>(n_), 0);
  size_t total = 0;
  for (index_t i = 0; i < n_; ++i) {
    row_start_[static_cast<size_t>(i)] = total;
    total += static_cast<size_t>(i - first_[static_cast<size_t>(i)] + 1);
  }
  vals_.assign(total, 0.0);

  // Scatter the lower triangle of A into the envelope.
  for (index_t i = 0; i < n_; ++i)
    for (index_t k = a.row_ptr[static_cast<size_t>(i)]; k < a.row_ptr[static_cast<size_t>(i) + 1]; ++k) {
      const index_t j = a.col_idx[static_cast<size_t>(k)];
      if (j <= i) vals_[row_start_[static_cast<size_t>(i)] + static_cast<size_t>(j - first_[static_cast<size_t>(i)])] =
          a.values[static_cast<size_t>(k)];
    }

  // Row-oriented factorization; the envelope never grows.
  for (index_t i = 0; i < n_; ++i) {
    const index_t fi = first_[static_cast<size_t>(i)];
    double* ri = vals_.data() + row_start_[static_cast<size_t>(i)];
    for (index_t j = fi; j < i; ++j) {
      const index_t fj = first_[static_cast<size_t>(j)];
      const double* rj = vals_.data() + row_start_[static_cast<size_t>(j)];
      const index_t lo = std::max(fi, fj);
      double s = ri[j - fi];
      for (index_t k = lo; k < j; ++k) s -= ri[k - fi] * rj[k - fj];
      ri[j - fi] = s / rj[j - fj];
    }
    double d = ri[i - fi];
    for (index_t k = fi; k < i; ++k) d -= ri[k - fi] * ri[k - fi];
    if (!(d > 0.0))
      throw NotSpdError("SkylineCholesky: nonpositive pivot at row " + std::to_string(i));
    ri[i - fi] = std::sqrt(d);
  }
}

void SkylineCholesky::solve(double* x) const {
  // Forward: L y = x, row by row.
  for (index_t i = 0; i < n_; ++i) {
    const index_t fi = first_[static_cast<size_t>(i)];
    const double* ri = vals_.data() + row_start_[static_cast<size_t>(i)];
    double s = x[i];
    for (index_t k = fi; k < i; ++k) s -= ri[k - fi] * x[k];
    x[i] = s / ri[i - fi];
  }
  // Backward: L^T x = y, using the same rows column-wise.
  for (index_t i = n_ - 1; i >= 0; --i) {
    const index_t fi = first_[static_cast<size_t>(i)];
    const double* ri = vals_.data() + row_start_[static_cast<size_t>(i)];
    const double xi = x[i] / ri[i - fi];
    x[i] = xi;
    for (index_t k = fi; k < i; ++k) x[k] -= ri[k - fi] * xi;
  }
}

std::vector<double> SkylineCholesky::solve(std::vector<double> b) const {
  if (static_cast<index_t>(b.size()) != n_) throw DimensionError("SkylineCholesky::solve: length mismatch");
  solve(b.data());
  return b;
}

}  // namespace maxlab
