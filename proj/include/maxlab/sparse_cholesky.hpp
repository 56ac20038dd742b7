#pragma once

#include <vector>

#include "maxlab/csr.hpp"
#include "maxlab/types.hpp"

namespace maxlab {

// Envelope (skyline) Cholesky A = L L^T for symmetric positive definite
// matrices. Rows are stored densely from their first stored column to the
// diagonal; all fill lands inside that envelope. Throws NotSpdError when a
// diagonal pivot fails to stay positive.
class SkylineCholesky {
public:
  explicit SkylineCholesky(const CsrMatrix<double>& a);

  void solve(double* x) const;
  std::vector<double> solve(std::vector<double> b) const;

  index_t size() const { return n_; }
  size_t factor_entries() const { return vals_.size(); }

private:
  index_t n_ = 0;
  std::vector<index_t> first_;      // first stored column of each row
  std::vector<size_t> row_start_;   // offset of (i, first_[i]) in vals_
  std::vector<double> vals_;        // rows [first_[i] .. i], diagonal last
};

}  // namespace maxlab
