#pragma once

#include <vector>

#include "maxlab/csr.hpp"

namespace maxlab {

// Undirected adjacency of the symmetrized pattern of A (diagonal excluded).
// Neighbor lists are sorted ascending.
struct Graph {
  index_t n = 0;
  std::vector<index_t> ptr;
  std::vector<index_t> adj;
};

template <class T>
Graph pattern_graph(const CsrMatrix<T>& a) {
  if (a.rows != a.cols) throw DimensionError("pattern_graph: square matrix required");
  Graph g;
  g.n = a.rows;
  std::vector<std::vector<index_t>> nb(static_cast<size_t>(a.rows));
  for (index_t i = 0; i < a.rows; ++i) {
    for (index_t k = a.row_ptr[static_cast<size_t>(i)]; k < a.row_ptr[static_cast<size_t>(i) + 1]; ++k) {
      const index_t j = a.col_idx[static_cast<size_t>(k)];
      if (j == i) continue;
      nb[static_cast<size_t>(i)].push_back(j);
      nb[static_cast<size_t>(j)].push_back(i);
    }
  }
  g.ptr.assign(static_cast<size_t>(g.n) + 1, 0);
  for (index_t i = 0; i < g.n; ++i) {
    auto& v = nb[static_cast<size_t>(i)];
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    g.ptr[static_cast<size_t>(i) + 1] = g.ptr[static_cast<size_t>(i)] + static_cast<index_t>(v.size());
  }
  g.adj.reserve(static_cast<size_t>(g.ptr.back()));
  for (auto& v : nb) g.adj.insert(g.adj.end(), v.begin(), v.end());
  return g;
}

// Reverse Cuthill-McKee permutation; perm[new] = old. Each connected component
// is started from a pseudo-peripheral vertex, components taken in order of
// their lowest-index vertex, so the result is deterministic.
std::vector<index_t> reverse_cuthill_mckee(const Graph& g);

template <class T>
std::vector<index_t> reverse_cuthill_mckee(const CsrMatrix<T>& a) {
  return reverse_cuthill_mckee(pattern_graph(a));
}

// Maximum of |i - j| over stored entries; the quantity RCM tries to shrink.
template <class T>
index_t bandwidth(const CsrMatrix<T>& a) {
  index_t b = 0;
  for (index_t i = 0; i < a.rows; ++i)
    for (index_t k = a.row_ptr[static_cast<size_t>(i)]; k < a.row_ptr[static_cast<size_t>(i) + 1]; ++k)
      b = std::max(b, std::abs(i - a.col_idx[static_cast<size_t>(k)]));
  return b;
}

}  // namespace maxlab
