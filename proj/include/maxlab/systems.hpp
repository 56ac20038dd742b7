#pragma once

#include <vector>

#include "maxlab/assembly.hpp"
#include "maxlab/csr.hpp"
#include "maxlab/types.hpp"

namespace maxlab {

// Complex formulation: (C - M - iB) x = s_re + i s_im.
struct ComplexSystem {
  CsrMatrix<complex_t> A;
  std::vector<complex_t> b;
};

inline ComplexSystem build_complex_system(const MaxwellOperators& ops) {
  ComplexSystem sys;
  sys.A = complex_combination({complex_t(1, 0), complex_t(-1, 0), complex_t(0, -1)}, {&ops.C, &ops.M, &ops.B});
  sys.b.resize(ops.s_re.size());
  for (size_t i = 0; i < sys.b.size(); ++i) sys.b[i] = complex_t(ops.s_re[i], ops.s_im[i]);
  return sys;
}

// Real 2n formulation: [[C-M, B], [B, -(C-M)]] [x_re; x_im] = [s_re; -s_im].
// Solving either system yields the same field.
struct SplitSystem {
  CsrMatrix<double> A;
  std::vector<double> b;
};

inline SplitSystem build_split_system(const MaxwellOperators& ops) {
  const index_t n = ops.n_free_edges;
  const CsrMatrix<double> cm = add(1.0, ops.C, -1.0, ops.M);
  CsrBuilder<double> bld(2 * n, 2 * n);
  bld.reserve(2 * (cm.col_idx.size() + ops.B.col_idx.size()));
  for (index_t i = 0; i < n; ++i) {
    for (index_t k = cm.row_ptr[static_cast<size_t>(i)]; k < cm.row_ptr[static_cast<size_t>(i) + 1]; ++k) {
      bld.add(i, cm.col_idx[static_cast<size_t>(k)], cm.values[static_cast<size_t>(k)]);
      bld.add(n + i, n + cm.col_idx[static_cast<size_t>(k)], -cm.values[static_cast<size_t>(k)]);
    }
    for (index_t k = ops.B.row_ptr[static_cast<size_t>(i)]; k < ops.B.row_ptr[static_cast<size_t>(i) + 1]; ++k) {
      bld.add(i, n + ops.B.col_idx[static_cast<size_t>(k)], ops.B.values[static_cast<size_t>(k)]);
      bld.add(n + i, ops.B.col_idx[static_cast<size_t>(k)], ops.B.values[static_cast<size_t>(k)]);
    }
  }
  SplitSystem sys;
  sys.A = bld.build();
  sys.b.resize(2 * static_cast<size_t>(n));
  for (index_t i = 0; i < n; ++i) {
    sys.b[static_cast<size_t>(i)] = ops.s_re[static_cast<size_t>(i)];
    sys.b[static_cast<size_t>(n + i)] = -ops.s_im[static_cast<size_t>(i)];
  }
  return sys;
}

inline std::vector<complex_t> split_to_complex(const std::vector<double>& x) {
  const size_t n = x.size() / 2;
  std::vector<complex_t> z(n);
  for (size_t i = 0; i < n; ++i) z[i] = complex_t(x[i], x[n + i]);
  return z;
}

inline std::vector<double> complex_to_split(const std::vector<complex_t>& z) {
  std::vector<double> x(2 * z.size());
  for (size_t i = 0; i < z.size(); ++i) {
    x[i] = z[i].real();
    x[z.size() + i] = z[i].imag();
  }
  return x;
}

// C + M + B: the real symmetric positive definite shifted operator driving
// the block preconditioner of the split system.
inline CsrMatrix<double> shifted_real_operator(const MaxwellOperators& ops) {
  return add(1.0, add(1.0, ops.C, 1.0, ops.M), 1.0, ops.B);
}

template <class T>
double relative_residual(const CsrMatrix<T>& a, const std::vector<T>& x, const std::vector<T>& b) {
  const auto r = vec_sub(b, spmv(a, x));
  const double bn = vec_norm2(b);
  return bn == 0 ? vec_norm2(r) : vec_norm2(r) / bn;
}

}  // namespace maxlab
