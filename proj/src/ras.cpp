#include "maxlab/ras.hpp"

#include <algorithm>
#include <queue>
#include <string>

namespace maxlab {

std::vector<std::vector<index_t>> partition_graph(const Graph& g, int n_subdomains) {
  if (n_subdomains < 1) throw DimensionError("partition_graph: subdomain count must be positive");
  if (static_cast<index_t>(n_subdomains) > g.n) throw DimensionError("partition_graph: more subdomains than vertices");
  const index_t quota = (g.n + n_subdomains - 1) / n_subdomains;

  std::vector<index_t> owner(static_cast<size_t>(g.n), -1);
  std::vector<std::vector<index_t>> sets;
  index_t assigned = 0;
  index_t scan = 0;  // lowest possibly-unassigned vertex; only moves forward
  while (assigned < g.n) {
    while (owner[static_cast<size_t>(scan)] >= 0) ++scan;
    const auto sd = static_cast<index_t>(sets.size());
    std::vector<index_t> set;
    std::queue<index_t> frontier;
    owner[static_cast<size_t>(scan)] = sd;
    set.push_back(scan);
    frontier.push(scan);
    while (!frontier.empty() && static_cast<index_t>(set.size()) < quota) {
      const index_t v = frontier.front();
      frontier.pop();
      for (index_t e = g.ptr[static_cast<size_t>(v)]; e < g.ptr[static_cast<size_t>(v) + 1]; ++e) {
        const index_t w = g.adj[static_cast<size_t>(e)];
        if (owner[static_cast<size_t>(w)] >= 0) continue;
        owner[static_cast<size_t>(w)] = sd;
        set.push_back(w);
        frontier.push(w);
        if (static_cast<index_t>(set.size()) == quota) break;
      }
    }
    assigned += static_cast<index_t>(set.size());
    std::sort(set.begin(), set.end());
    sets.push_back(std::move(set));
  }
  return sets;
}

std::vector<std::vector<index_t>> grow_overlap(const Graph& g, const std::vector<std::vector<index_t>>& sets,
                                               int overlap) {
  if (overlap < 0) throw DimensionError("grow_overlap: overlap must be nonnegative");
  std::vector<std::vector<index_t>> out;
  out.reserve(sets.size());
  std::vector<char> member(static_cast<size_t>(g.n), 0);
  for (const auto& set : sets) {
    std::vector<index_t> grown = set;
    for (const index_t v : grown) member[static_cast<size_t>(v)] = 1;
    index_t ring_begin = 0;
    for (int round = 0; round < overlap; ++round) {
      const auto ring_end = static_cast<index_t>(grown.size());
      for (index_t p = ring_begin; p < ring_end; ++p) {
        const index_t v = grown[static_cast<size_t>(p)];
        for (index_t e = g.ptr[static_cast<size_t>(v)]; e < g.ptr[static_cast<size_t>(v) + 1]; ++e) {
          const index_t w = g.adj[static_cast<size_t>(e)];
          if (!member[static_cast<size_t>(w)]) {
            member[static_cast<size_t>(w)] = 1;
            grown.push_back(w);
          }
        }
      }
      ring_begin = ring_end;
    }
    for (const index_t v : grown) member[static_cast<size_t>(v)] = 0;  // reset for the next set
    std::sort(grown.begin(), grown.end());
    out.push_back(std::move(grown));
  }
  return out;
}

RasPreconditioner::RasPreconditioner(const CsrMatrix<complex_t>& a, const RasConfig& cfg) : n_(a.rows), cfg_(cfg) {
  if (a.rows != a.cols) throw DimensionError("ras: square matrix required");
  const Graph g = pattern_graph(a);
  part_.core = partition_graph(g, cfg.n_subdomains);
  part_.overlapped = grow_overlap(g, part_.core, cfg.overlap);

  part_.owner.assign(static_cast<size_t>(n_), -1);
  for (size_t sd = 0; sd < part_.core.size(); ++sd)
    for (const index_t v : part_.core[sd]) part_.owner[static_cast<size_t>(v)] = static_cast<index_t>(sd);

  std::vector<index_t> map(static_cast<size_t>(n_), -1);
  factors_.reserve(part_.overlapped.size());
  core_mask_.reserve(part_.overlapped.size());
  for (size_t sd = 0; sd < part_.overlapped.size(); ++sd) {
    const auto& ov = part_.overlapped[sd];
    for (size_t p = 0; p < ov.size(); ++p) map[static_cast<size_t>(ov[p])] = static_cast<index_t>(p);
    const auto local = extract_submatrix(a, map, static_cast<index_t>(ov.size()), map, static_cast<index_t>(ov.size()));
    try {
      factors_.emplace_back(local, /*use_rcm=*/true);
    } catch (const SingularMatrixError& e) {
      throw SingularMatrixError("ras: local block of subdomain " + std::to_string(sd) + " is singular (" + e.what() +
                                ")");
    }
    std::vector<char> mask(ov.size(), 0);
    for (size_t p = 0; p < ov.size(); ++p)
      if (part_.owner[static_cast<size_t>(ov[p])] == static_cast<index_t>(sd)) mask[p] = 1;
    core_mask_.push_back(std::move(mask));
    for (const index_t v : ov) map[static_cast<size_t>(v)] = -1;  // reset for the next block
  }
}

void RasPreconditioner::apply(const std::vector<complex_t>& r, std::vector<complex_t>& y) const {
  if (static_cast<index_t>(r.size()) != n_) throw DimensionError("ras: vector length mismatch");
  y.assign(static_cast<size_t>(n_), complex_t(0));
  std::vector<complex_t> local;
  for (size_t sd = 0; sd < part_.overlapped.size(); ++sd) {
    const auto& ov = part_.overlapped[sd];
    local.resize(ov.size());
    for (size_t p = 0; p < ov.size(); ++p) local[p] = r[static_cast<size_t>(ov[p])];
    local = factors_[sd].solve(local);
    // Restricted write-back: each dof receives exactly one correction, from
    // the subdomain owning it.
    for (size_t p = 0; p < ov.size(); ++p)
      if (core_mask_[sd][p]) y[static_cast<size_t>(ov[p])] = local[p];
  }
}

}  // namespace maxlab
