#include "maxlab/ordering.hpp"

#include <algorithm>

namespace maxlab {

namespace {

index_t degree(const Graph& g, index_t v) {
  return g.ptr[static_cast<size_t>(v) + 1] - g.ptr[static_cast<size_t>(v)];
}

// BFS level structure rooted at r, restricted to unnumbered vertices.
// Returns vertices level by level and writes the index of the last level.
std::vector<std::vector<index_t>> level_structure(const Graph& g, index_t r, const std::vector<char>& numbered) {
  std::vector<std::vector<index_t>> levels;
  std::vector<char> seen(static_cast<size_t>(g.n), 0);
  levels.push_back({r});
  seen[static_cast<size_t>(r)] = 1;
  while (true) {
    std::vector<index_t> next;
    for (index_t v : levels.back()) {
      for (index_t k = g.ptr[static_cast<size_t>(v)]; k < g.ptr[static_cast<size_t>(v) + 1]; ++k) {
        const index_t w = g.adj[static_cast<size_t>(k)];
        if (!seen[static_cast<size_t>(w)] && !numbered[static_cast<size_t>(w)]) {
          seen[static_cast<size_t>(w)] = 1;
          next.push_back(w);
        }
      }
    }
    if (next.empty()) break;
    std::sort(next.begin(), next.end());
    levels.push_back(std::move(next));
  }
  return levels;
}

// George-Liu pseudo-peripheral vertex for the component containing start.
index_t pseudo_peripheral(const Graph& g, index_t start, const std::vector<char>& numbered) {
  index_t r = start;
  auto levels = level_structure(g, r, numbered);
  while (true) {
    // Candidate: minimum-degree vertex in the deepest level (ties -> lowest id).
    const auto& last = levels.back();
    index_t best = last[0];
    for (index_t v : last)
      if (degree(g, v) < degree(g, best)) best = v;
    auto trial = level_structure(g, best, numbered);
    if (trial.size() > levels.size()) {
      r = best;
      levels = std::move(trial);
    } else {
      return r;
    }
  }
}

}  // namespace

std::vector<index_t> reverse_cuthill_mckee(const Graph& g) {
  std::vector<index_t> order;
  order.reserve(static_cast<size_t>(g.n));
  std::vector<char> numbered(static_cast<size_t>(g.n), 0);
  std::vector<index_t> nbrs;
  for (index_t seed = 0; seed < g.n; ++seed) {
    if (numbered[static_cast<size_t>(seed)]) continue;
    const index_t root = pseudo_peripheral(g, seed, numbered);
    // Cuthill-McKee sweep over this component.
    size_t head = order.size();
    order.push_back(root);
    numbered[static_cast<size_t>(root)] = 1;
    while (head < order.size()) {
      const index_t v = order[head++];
      nbrs.clear();
      for (index_t k = g.ptr[static_cast<size_t>(v)]; k < g.ptr[static_cast<size_t>(v) + 1]; ++k) {
        const index_t w = g.adj[static_cast<size_t>(k)];
        if (!numbered[static_cast<size_t>(w)]) {
          numbered[static_cast<size_t>(w)] = 1;
          nbrs.push_back(w);
        }
      }
      std::sort(nbrs.begin(), nbrs.end(), [&](index_t a, index_t b) {
        const index_t da = degree(g, a), db = degree(g, b);
        if (da != db) return da < db;
        return a < b;
      });
      order.insert(order.end(), nbrs.begin(), nbrs.end());
    }
  }
  std::reverse(order.begin(), order.end());
  return order;
}

}  // namespace maxlab
