#pragma once

#include <vector>

#include "maxlab/csr.hpp"
#include "maxlab/krylov.hpp"
#include "maxlab/ordering.hpp"
#include "maxlab/sparse_lu.hpp"
#include "maxlab/types.hpp"

namespace maxlab {

// One-level restricted additive Schwarz on the complex system: partition the
// matrix graph into N cores, widen each by `overlap` rings, factorize the
// local blocks exactly, and on application solve every local problem on the
// widened set while writing the correction back only at core rows.
struct RasConfig {
  int n_subdomains = 4;
  int overlap = 2;
};

struct RasPartition {
  std::vector<std::vector<index_t>> core;        // disjoint, sorted, cover all dofs
  std::vector<std::vector<index_t>> overlapped;  // supersets of core, sorted
  std::vector<index_t> owner;                    // dof id -> subdomain id
};

// Greedy balanced breadth-first partition: seed at the lowest-index
// unassigned vertex, grow by BFS until ceil(n / n_subdomains) vertices (or
// the component is exhausted), repeat. Trailing empty sets (possible only in
// near-degenerate configurations) are dropped.
std::vector<std::vector<index_t>> partition_graph(const Graph& g, int n_subdomains);

// `overlap` rounds of one-ring neighborhood expansion of each set.
std::vector<std::vector<index_t>> grow_overlap(const Graph& g, const std::vector<std::vector<index_t>>& sets,
                                               int overlap);

class RasPreconditioner {
 public:
  RasPreconditioner(const CsrMatrix<complex_t>& a, const RasConfig& cfg);

  void apply(const std::vector<complex_t>& r, std::vector<complex_t>& y) const;

  // Valid only while the preconditioner itself stays alive.
  LinearOperator<complex_t> as_operator() const {
    return {n_, [this](const std::vector<complex_t>& r, std::vector<complex_t>& y) { apply(r, y); }};
  }

  const RasPartition& partition() const { return part_; }
  const RasConfig& config() const { return cfg_; }

 private:
  index_t n_ = 0;
  RasConfig cfg_;
  RasPartition part_;
  std::vector<LuSolver<complex_t>> factors_;
  std::vector<std::vector<char>> core_mask_;  // per subdomain, local-index flags
};

}  // namespace maxlab
