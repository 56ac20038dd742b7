#pragma once

#include <vector>

#include "maxlab/csr.hpp"
#include "maxlab/types.hpp"

namespace maxlab {

// Sparse approximate inverse for the split (real) system: sparsify the
// diagonally scaled matrix, take the pattern of its m-th power, fit each
// column of H by least squares so that ||I - A H||_F is small, then drop
// relatively small entries. H is applied as a stationary left
// preconditioner, so plain GMRES is the matching outer solver.
struct SpaiConfig {
  double thresh = 0.001;  // sparsification threshold on scaled entries
  double filter = 0.01;   // columnwise relative post-filter
  int m = 3;              // pattern power
};

// Boolean sparsity structure in compressed-row form, rows sorted.
struct SparsityPattern {
  index_t rows = 0;
  index_t cols = 0;
  std::vector<index_t> ptr;
  std::vector<index_t> idx;

  index_t nnz() const { return ptr.empty() ? 0 : ptr.back(); }
};

// Pattern of D^{-1/2} A D^{-1/2} entries with magnitude >= thresh, where
// D = |diag(A)| (unit where the diagonal vanishes). The diagonal itself is
// always part of the pattern.
SparsityPattern sparsify_pattern(const CsrMatrix<double>& a, double thresh);

// Boolean m-th power: (i,j) present iff j is reachable from i in at most m
// steps of the pattern graph (the pattern always contains the diagonal).
SparsityPattern pattern_power(const SparsityPattern& p, int m);

// Column j of H minimizes ||e_j - A h_j||_2 over vectors supported on the
// pattern's column j, solved by dense QR on the gathered submatrix; a
// rank-deficient local problem yields the minimum-norm solution.
CsrMatrix<double> frobenius_fit(const CsrMatrix<double>& a, const SparsityPattern& pat);

// Drop h_ij with |h_ij| < filter * max_i |h_ij| (columnwise); diagonal kept.
CsrMatrix<double> post_filter(const CsrMatrix<double>& h, double filter);

struct SpaiPreconditioner {
  SpaiConfig config;
  CsrMatrix<double> h;
};

SpaiPreconditioner build_spai(const CsrMatrix<double>& a, const SpaiConfig& cfg);

}  // namespace maxlab
