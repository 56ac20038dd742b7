#pragma once

#include <map>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "maxlab/csr.hpp"
#include "maxlab/dense.hpp"
#include "maxlab/krylov.hpp"
#include "maxlab/ordering.hpp"
#include "maxlab/types.hpp"

namespace maxlab {

// Block low-rank LU: reorder with reverse Cuthill-McKee, partition into
// contiguous blocks, run a blocked right-looking factorization with partial
// pivoting confined to the diagonal blocks, and pass every finished
// off-diagonal factor block through a truncated SVD with relative threshold
// epsilon (compress-after-update). epsilon = 0 skips compression entirely,
// which makes the factorization a plain blocked LU and doubles as the
// full-rank direct solver.
struct BlrConfig {
  double epsilon = 0.0;
  index_t block_size = 64;
};

template <class T>
class BlrFactor {
  using Block = std::variant<DenseBlock<T>, LowRankBlock<T>>;

 public:
  BlrFactor(const CsrMatrix<T>& a, const BlrConfig& cfg) : cfg_(cfg), n_(a.rows) {
    if (a.rows != a.cols) throw DimensionError("blr: square matrix required");
    if (cfg.block_size < 8) throw DimensionError("blr: block size must be at least 8");
    if (cfg.epsilon < 0) throw DimensionError("blr: compression threshold must be nonnegative");

    perm_ = reverse_cuthill_mckee(a);
    const auto ap = permute_symmetric(a, perm_);
    nb_ = (n_ + cfg.block_size - 1) / cfg.block_size;
    rows_.resize(static_cast<size_t>(nb_));
    piv_.resize(static_cast<size_t>(nb_));

    // Scatter the reordered matrix into dense blocks, allocating only the
    // blocks that hold entries; fill-in allocates more during the sweep.
    for (index_t i = 0; i < n_; ++i) {
      const index_t bi = i / cfg.block_size;
      for (index_t e = ap.row_ptr[static_cast<size_t>(i)]; e < ap.row_ptr[static_cast<size_t>(i) + 1]; ++e) {
        const index_t j = ap.col_idx[static_cast<size_t>(e)];
        const index_t bj = j / cfg.block_size;
        auto& blk = dense_at(bi, bj);
        blk(i - bi * cfg.block_size, j - bj * cfg.block_size) = ap.values[static_cast<size_t>(e)];
      }
    }

    factorize();
    count_storage();
  }

  std::vector<T> solve(std::vector<T> b) const {
    if (static_cast<index_t>(b.size()) != n_) throw DimensionError("blr solve: length mismatch");
    // P A P^T with perm_[new] = old: gather, solve the reordered system with
    // the block-diagonal pivot permutation folded in, scatter back.
    std::vector<T> y(b.size());
    for (size_t p = 0; p < y.size(); ++p) y[p] = b[static_cast<size_t>(perm_[p])];
    for (index_t k = 0; k < nb_; ++k) swap_segment(k, y);

    for (index_t k = 0; k < nb_; ++k) {  // forward, unit lower
      auto seg = segment(k, y);
      for (const auto& [j, blk] : rows_[static_cast<size_t>(k)]) {
        if (j >= k) break;
        multiply_acc(blk, y.data() + static_cast<size_t>(j) * cfg_.block_size, seg);
      }
      store_segment(k, seg, y);
      DenseBlock<T> v = as_column(k, y);
      trsm_left_lower_unit(diag_block(k), v);
      from_column(k, v, y);
    }
    for (index_t k = nb_ - 1; k >= 0; --k) {  // backward, upper
      auto seg = segment(k, y);
      auto it = rows_[static_cast<size_t>(k)].upper_bound(k);
      for (; it != rows_[static_cast<size_t>(k)].end(); ++it)
        multiply_acc(it->second, y.data() + static_cast<size_t>(it->first) * cfg_.block_size, seg);
      store_segment(k, seg, y);
      DenseBlock<T> v = as_column(k, y);
      trsm_left_upper(diag_block(k), v);
      from_column(k, v, y);
    }

    std::vector<T> x(b.size());
    for (size_t p = 0; p < y.size(); ++p) x[static_cast<size_t>(perm_[p])] = y[p];
    return x;
  }

  double compression_ratio() const { return static_cast<double>(stored_fr_) / static_cast<double>(stored_blr_); }
  size_t stored_entries_blr() const { return stored_blr_; }
  size_t stored_entries_fr() const { return stored_fr_; }
  index_t block_count() const { return nb_; }

  struct BlockStat {
    index_t bi, bj;
    bool low_rank;
    index_t rows, cols, rank;  // rank == min(rows, cols) for dense blocks
    size_t entries;
  };

  std::vector<BlockStat> block_stats() const {
    std::vector<BlockStat> stats;
    for (index_t i = 0; i < nb_; ++i)
      for (const auto& [j, blk] : rows_[static_cast<size_t>(i)]) {
        if (const auto* d = std::get_if<DenseBlock<T>>(&blk))
          stats.push_back({i, j, false, d->rows, d->cols, std::min(d->rows, d->cols), d->entries()});
        else {
          const auto& lr = std::get<LowRankBlock<T>>(blk);
          stats.push_back({i, j, true, lr.left.rows, lr.right.cols, lr.rank(), lr.entries()});
        }
      }
    return stats;
  }

 private:
  index_t block_begin(index_t b) const { return b * cfg_.block_size; }
  index_t block_size_of(index_t b) const { return std::min(cfg_.block_size, n_ - b * cfg_.block_size); }

  DenseBlock<T>& dense_at(index_t bi, index_t bj) {
    auto& slot = rows_[static_cast<size_t>(bi)];
    auto it = slot.find(bj);
    if (it == slot.end())
      it = slot.emplace(bj, DenseBlock<T>(block_size_of(bi), block_size_of(bj))).first;
    return std::get<DenseBlock<T>>(it->second);
  }

  const DenseBlock<T>& diag_block(index_t k) const {
    return std::get<DenseBlock<T>>(rows_[static_cast<size_t>(k)].at(k));
  }

  // y_seg (length of block k) -= block * x_seg for dense or low-rank blocks.
  static void multiply_acc(const Block& blk, const T* x, std::vector<T>& y_seg) {
    if (const auto* d = std::get_if<DenseBlock<T>>(&blk)) {
      gemv_acc(T(-1), *d, x, y_seg.data());
    } else {
      const auto& lr = std::get<LowRankBlock<T>>(blk);
      if (lr.rank() == 0) return;
      std::vector<T> tmp(static_cast<size_t>(lr.rank()), T(0));
      gemv_acc(T(1), lr.right, x, tmp.data());
      gemv_acc(T(-1), lr.left, tmp.data(), y_seg.data());
    }
  }

  std::vector<T> segment(index_t k, const std::vector<T>& y) const {
    const index_t b = block_begin(k), m = block_size_of(k);
    return std::vector<T>(y.begin() + b, y.begin() + b + m);
  }
  void store_segment(index_t k, const std::vector<T>& seg, std::vector<T>& y) const {
    std::copy(seg.begin(), seg.end(), y.begin() + block_begin(k));
  }
  DenseBlock<T> as_column(index_t k, const std::vector<T>& y) const {
    const index_t m = block_size_of(k);
    DenseBlock<T> v(m, 1);
    std::copy(y.begin() + block_begin(k), y.begin() + block_begin(k) + m, v.data.begin());
    return v;
  }
  void from_column(index_t k, const DenseBlock<T>& v, std::vector<T>& y) const {
    std::copy(v.data.begin(), v.data.end(), y.begin() + block_begin(k));
  }
  void swap_segment(index_t k, std::vector<T>& y) const {
    const auto& piv = piv_[static_cast<size_t>(k)];
    T* seg = y.data() + block_begin(k);
    for (size_t s = 0; s < piv.size(); ++s)
      if (piv[s] != static_cast<index_t>(s)) std::swap(seg[s], seg[static_cast<size_t>(piv[s])]);
  }

  // Compress a finished off-diagonal factor block when profitable.
  void maybe_compress(Block& blk) {
    if (cfg_.epsilon == 0) return;
    auto* d = std::get_if<DenseBlock<T>>(&blk);
    if (!d) return;  // blocks arriving as low-rank stay low-rank
    auto lr = truncated_svd(*d, cfg_.epsilon);
    if (static_cast<size_t>(lr.rank()) * (static_cast<size_t>(d->rows) + static_cast<size_t>(d->cols)) <
        d->entries())
      blk = std::move(lr);
  }

  // acc -= left_blk * right_blk in whichever factored forms the operands use.
  void update_product(const Block& lb, const Block& rb, DenseBlock<T>& acc) {
    const auto* ld = std::get_if<DenseBlock<T>>(&lb);
    const auto* rd = std::get_if<DenseBlock<T>>(&rb);
    if (ld && rd) {
      gemm_acc(T(-1), *ld, *rd, acc);
    } else if (ld) {
      const auto& rlr = std::get<LowRankBlock<T>>(rb);
      if (rlr.rank() == 0) return;
      gemm_acc(T(-1), gemm(*ld, rlr.left), rlr.right, acc);
    } else if (rd) {
      const auto& llr = std::get<LowRankBlock<T>>(lb);
      if (llr.rank() == 0) return;
      gemm_acc(T(-1), llr.left, gemm(llr.right, *rd), acc);
    } else {
      const auto& llr = std::get<LowRankBlock<T>>(lb);
      const auto& rlr = std::get<LowRankBlock<T>>(rb);
      if (llr.rank() == 0 || rlr.rank() == 0) return;
      const auto mid = gemm(llr.right, rlr.left);  // r1 x r2
      gemm_acc(T(-1), gemm(llr.left, mid), rlr.right, acc);
    }
  }

  void factorize() {
    for (index_t k = 0; k < nb_; ++k) {
      auto& row_k = rows_[static_cast<size_t>(k)];
      auto dit = row_k.find(k);
      if (dit == row_k.end())
        throw SingularMatrixError("blr: diagonal block " + std::to_string(k) + " is structurally empty");
      auto& dk = std::get<DenseBlock<T>>(dit->second);
      try {
        lu_factor_inplace(dk, piv_[static_cast<size_t>(k)]);
      } catch (const SingularMatrixError& e) {
        throw SingularMatrixError("blr: diagonal block " + std::to_string(k) + " is singular (" + e.what() + ")");
      }
      const auto& piv = piv_[static_cast<size_t>(k)];

      // The block-confined pivoting swaps whole rows: propagate to every
      // other block in this block row, including finished L blocks.
      for (auto& [j, blk] : row_k) {
        if (j == k) continue;
        if (auto* d = std::get_if<DenseBlock<T>>(&blk)) apply_row_swaps(piv, *d);
        else apply_row_swaps(piv, std::get<LowRankBlock<T>>(blk).left);
      }

      // U row: U_kj = L_kk^{-1} A_kj, then compress.
      for (auto it = row_k.upper_bound(k); it != row_k.end(); ++it) {
        if (auto* d = std::get_if<DenseBlock<T>>(&it->second)) trsm_left_lower_unit(dk, *d);
        else trsm_left_lower_unit(dk, std::get<LowRankBlock<T>>(it->second).left);
        maybe_compress(it->second);
      }

      // L column: L_ik = A_ik U_kk^{-1}, then compress.
      std::vector<index_t> col_rows;
      for (index_t i = k + 1; i < nb_; ++i) {
        auto& row_i = rows_[static_cast<size_t>(i)];
        auto lit = row_i.find(k);
        if (lit == row_i.end()) continue;
        if (auto* d = std::get_if<DenseBlock<T>>(&lit->second)) trsm_right_upper(dk, *d);
        else trsm_right_upper(dk, std::get<LowRankBlock<T>>(lit->second).right);
        maybe_compress(lit->second);
        col_rows.push_back(i);
      }

      // Trailing update: A_ij -= L_ik U_kj for every stored pair.
      for (const index_t i : col_rows) {
        const Block& lik = rows_[static_cast<size_t>(i)].at(k);
        for (auto it = row_k.upper_bound(k); it != row_k.end(); ++it)
          update_product(lik, it->second, dense_at(i, it->first));
      }
    }
  }

  void count_storage() {
    stored_fr_ = 0;
    stored_blr_ = 0;
    for (index_t i = 0; i < nb_; ++i)
      for (const auto& [j, blk] : rows_[static_cast<size_t>(i)]) {
        size_t full;
        size_t now;
        if (const auto* d = std::get_if<DenseBlock<T>>(&blk)) {
          full = d->entries();
          now = d->entries();
        } else {
          const auto& lr = std::get<LowRankBlock<T>>(blk);
          full = static_cast<size_t>(lr.left.rows) * static_cast<size_t>(lr.right.cols);
          now = lr.entries();
        }
        stored_fr_ += full;
        stored_blr_ += now;
      }
  }

  BlrConfig cfg_;
  index_t n_ = 0;
  index_t nb_ = 0;
  std::vector<index_t> perm_;
  std::vector<std::map<index_t, Block>> rows_;
  std::vector<std::vector<index_t>> piv_;
  size_t stored_fr_ = 0;
  size_t stored_blr_ = 0;
};

template <class T>
struct BlrSolveResult {
  std::vector<T> x;
  SolveReport report;
  double compression_ratio = 1.0;
};

// FGMRES with the compressed factorization as the right preconditioner.
template <class T>
BlrSolveResult<T> blr_preconditioned_solve(const CsrMatrix<T>& a, const std::vector<T>& b, const BlrConfig& cfg,
                                           const KrylovOptions& kopt) {
  BlrFactor<T> factor(a, cfg);
  LinearOperator<T> prec{a.rows, [&factor](const std::vector<T>& v, std::vector<T>& y) { y = factor.solve(v); }};
  BlrSolveResult<T> result;
  auto op = make_operator(a);
  result.report = fgmres(op, b, result.x, kopt, &prec);
  result.compression_ratio = factor.compression_ratio();
  return result;
}

}  // namespace maxlab
