#include "maxlab/spai.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

namespace maxlab {

SparsityPattern sparsify_pattern(const CsrMatrix<double>& a, double thresh) {
  if (a.rows != a.cols) throw DimensionError("sparsify_pattern: square matrix required");
  if (thresh < 0) throw DimensionError("sparsify_pattern: threshold must be nonnegative");
  const index_t n = a.rows;
  const auto diag = a.diagonal();
  std::vector<double> scale(static_cast<size_t>(n));
  for (index_t i = 0; i < n; ++i) {
    const double d = std::abs(diag[static_cast<size_t>(i)]);
    scale[static_cast<size_t>(i)] = d > 0 ? 1.0 / std::sqrt(d) : 1.0;
  }

  SparsityPattern p;
  p.rows = p.cols = n;
  p.ptr.assign(static_cast<size_t>(n) + 1, 0);
  p.idx.reserve(a.values.size());
  for (index_t i = 0; i < n; ++i) {
    bool diag_seen = false;
    const index_t row_begin = static_cast<index_t>(p.idx.size());
    for (index_t e = a.row_ptr[static_cast<size_t>(i)]; e < a.row_ptr[static_cast<size_t>(i) + 1]; ++e) {
      const index_t j = a.col_idx[static_cast<size_t>(e)];
      const double scaled = std::abs(a.values[static_cast<size_t>(e)]) * scale[static_cast<size_t>(i)] * scale[static_cast<size_t>(j)];
      if (j == i) {
        diag_seen = true;
        p.idx.push_back(j);
      } else if (scaled >= thresh) {
        p.idx.push_back(j);
      }
    }
    if (!diag_seen) {
      // Missing structural diagonal: insert it, keeping the row sorted.
      p.idx.push_back(i);
      std::sort(p.idx.begin() + row_begin, p.idx.end());
    }
    p.ptr[static_cast<size_t>(i) + 1] = static_cast<index_t>(p.idx.size());
  }
  return p;
}

namespace {

// One boolean Gustavson product r * p with sorted rows.
SparsityPattern bool_product(const SparsityPattern& r, const SparsityPattern& p) {
  const index_t n = r.rows;
  SparsityPattern out;
  out.rows = n;
  out.cols = p.cols;
  out.ptr.assign(static_cast<size_t>(n) + 1, 0);
  std::vector<index_t> stamp(static_cast<size_t>(p.cols), -1);
  std::vector<index_t> row;
  for (index_t i = 0; i < n; ++i) {
    row.clear();
    for (index_t e = r.ptr[static_cast<size_t>(i)]; e < r.ptr[static_cast<size_t>(i) + 1]; ++e) {
      const index_t kk = r.idx[static_cast<size_t>(e)];
      for (index_t f = p.ptr[static_cast<size_t>(kk)]; f < p.ptr[static_cast<size_t>(kk) + 1]; ++f) {
        const index_t j = p.idx[static_cast<size_t>(f)];
        if (stamp[static_cast<size_t>(j)] != i) {
          stamp[static_cast<size_t>(j)] = i;
          row.push_back(j);
        }
      }
    }
    std::sort(row.begin(), row.end());
    out.idx.insert(out.idx.end(), row.begin(), row.end());
    out.ptr[static_cast<size_t>(i) + 1] = static_cast<index_t>(out.idx.size());
  }
  return out;
}

SparsityPattern pattern_transpose(const SparsityPattern& p) {
  SparsityPattern t;
  t.rows = p.cols;
  t.cols = p.rows;
  t.ptr.assign(static_cast<size_t>(p.cols) + 1, 0);
  for (const index_t j : p.idx) ++t.ptr[static_cast<size_t>(j) + 1];
  for (index_t j = 0; j < p.cols; ++j) t.ptr[static_cast<size_t>(j) + 1] += t.ptr[static_cast<size_t>(j)];
  t.idx.resize(p.idx.size());
  std::vector<index_t> next(t.ptr.begin(), t.ptr.end() - 1);
  for (index_t i = 0; i < p.rows; ++i)
    for (index_t e = p.ptr[static_cast<size_t>(i)]; e < p.ptr[static_cast<size_t>(i) + 1]; ++e)
      t.idx[static_cast<size_t>(next[static_cast<size_t>(p.idx[static_cast<size_t>(e)])]++)] = i;
  return t;
}

}  // namespace

SparsityPattern pattern_power(const SparsityPattern& p, int m) {
  if (m < 1) throw DimensionError("pattern_power: power must be at least 1");
  if (p.rows != p.cols) throw DimensionError("pattern_power: square pattern required");
  SparsityPattern r = p;
  for (int step = 1; step < m; ++step) r = bool_product(r, p);
  return r;
}

CsrMatrix<double> frobenius_fit(const CsrMatrix<double>& a, const SparsityPattern& pat) {
  if (a.rows != a.cols || pat.rows != a.rows || pat.cols != a.cols)
    throw DimensionError("frobenius_fit: dimension mismatch between matrix and pattern");
  const index_t n = a.rows;
  for (index_t j = 0; j < n; ++j)
    if (pat.ptr[static_cast<size_t>(j) + 1] == pat.ptr[static_cast<size_t>(j)])
      throw DimensionError("frobenius_fit: pattern has an empty row");

  const auto at = transpose(a);             // rows of at are columns of a
  const auto pt = pattern_transpose(pat);   // rows of pt are pattern columns

  CsrBuilder<double> hb(n, n);
  std::vector<index_t> stamp(static_cast<size_t>(n), -1);
  std::vector<index_t> local(static_cast<size_t>(n), 0);
  std::vector<index_t> gathered;

  for (index_t j = 0; j < n; ++j) {
    const index_t jb = pt.ptr[static_cast<size_t>(j)], je = pt.ptr[static_cast<size_t>(j) + 1];
    const index_t width = je - jb;

    // Rows touched by any allowed column, plus row j for the unit target.
    gathered.clear();
    for (index_t e = jb; e < je; ++e) {
      const index_t col = pt.idx[static_cast<size_t>(e)];
      for (index_t f = at.row_ptr[static_cast<size_t>(col)]; f < at.row_ptr[static_cast<size_t>(col) + 1]; ++f) {
        const index_t row = at.col_idx[static_cast<size_t>(f)];
        if (stamp[static_cast<size_t>(row)] != j) {
          stamp[static_cast<size_t>(row)] = j;
          gathered.push_back(row);
        }
      }
    }
    if (stamp[static_cast<size_t>(j)] != j) {
      stamp[static_cast<size_t>(j)] = j;
      gathered.push_back(j);
    }
    std::sort(gathered.begin(), gathered.end());
    for (index_t t = 0; t < static_cast<index_t>(gathered.size()); ++t) local[static_cast<size_t>(gathered[static_cast<size_t>(t)])] = t;

    Eigen::MatrixXd loc = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(gathered.size()), width);
    for (index_t e = jb; e < je; ++e) {
      const index_t col = pt.idx[static_cast<size_t>(e)];
      for (index_t f = at.row_ptr[static_cast<size_t>(col)]; f < at.row_ptr[static_cast<size_t>(col) + 1]; ++f)
        loc(local[static_cast<size_t>(at.col_idx[static_cast<size_t>(f)])], e - jb) = at.values[static_cast<size_t>(f)];
    }
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(gathered.size()));
    rhs(local[static_cast<size_t>(j)]) = 1.0;

    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(loc);
    const Eigen::VectorXd sol = cod.solve(rhs);
    for (index_t e = jb; e < je; ++e) hb.add(pt.idx[static_cast<size_t>(e)], j, sol(e - jb));
  }
  return hb.build();
}

CsrMatrix<double> post_filter(const CsrMatrix<double>& h, double filter) {
  if (filter < 0) throw DimensionError("post_filter: filter must be nonnegative");
  std::vector<double> colmax(static_cast<size_t>(h.cols), 0.0);
  for (index_t i = 0; i < h.rows; ++i)
    for (index_t e = h.row_ptr[static_cast<size_t>(i)]; e < h.row_ptr[static_cast<size_t>(i) + 1]; ++e) {
      const index_t j = h.col_idx[static_cast<size_t>(e)];
      colmax[static_cast<size_t>(j)] = std::max(colmax[static_cast<size_t>(j)], std::abs(h.values[static_cast<size_t>(e)]));
    }
  CsrBuilder<double> out(h.rows, h.cols);
  for (index_t i = 0; i < h.rows; ++i)
    for (index_t e = h.row_ptr[static_cast<size_t>(i)]; e < h.row_ptr[static_cast<size_t>(i) + 1]; ++e) {
      const index_t j = h.col_idx[static_cast<size_t>(e)];
      const double v = h.values[static_cast<size_t>(e)];
      if (i == j || std::abs(v) >= filter * colmax[static_cast<size_t>(j)]) out.add(i, j, v);
    }
  return out.build();
}

SpaiPreconditioner build_spai(const CsrMatrix<double>& a, const SpaiConfig& cfg) {
  if (cfg.m < 1) throw DimensionError("build_spai: pattern power must be at least 1");
  if (cfg.thresh < 0 || cfg.filter < 0) throw DimensionError("build_spai: thresholds must be nonnegative");
  auto pattern = pattern_power(sparsify_pattern(a, cfg.thresh), cfg.m);
  auto h = post_filter(frobenius_fit(a, pattern), cfg.filter);
  return {cfg, std::move(h)};
}

}  // namespace maxlab
