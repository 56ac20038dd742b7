#include "maxlab/hx.hpp"

#include <string>
#include <utility>

#include "maxlab/systems.hpp"

namespace {

using namespace maxlab;

// The scalar auxiliary matrices; grounding removes the first free vertex.
CsrMatrix<double> drop_first_vertex(const CsrMatrix<double>& a) {
  std::vector<index_t> map(static_cast<size_t>(a.rows));
  map[0] = -1;
  for (index_t i = 1; i < a.rows; ++i) map[static_cast<size_t>(i)] = i - 1;
  return extract_submatrix(a, map, a.rows - 1, map, a.cols - 1);
}

SkylineCholesky factor_named(const CsrMatrix<double>& a, const char* name) {
  try {
    return SkylineCholesky(a);
  } catch (const NotSpdError& e) {
    throw NotSpdError(std::string("hx setup: ") + name + " is not positive definite (" + e.what() + ")");
  }
}

}  // namespace

namespace maxlab {

HxOperator::HxOperator(const Mesh& mesh, const MaxwellOperators& ops)
    : k2_(ops.options.k * ops.options.k),
      n_vertices_(ops.n_free_vertices),
      // No eliminated vertex means no Dirichlet boundary: the Laplacian then
      // has the constants in its kernel and needs grounding.
      pinned_(ops.n_free_vertices == static_cast<index_t>(ops.vertex_free_map.size())),
      block_(shifted_real_operator(ops)),
      g_(ops.G),
      gt_(transpose(ops.G)),
      pcurl_(nodal_to_edge_interpolation(mesh, ops)),
      pcurlt_(transpose(pcurl_)),
      chol_beta_(factor_named(add(1.0, ops.lap_scalar, k2_, ops.mass_scalar), "the vector auxiliary matrix")),
      chol_scalar_(pinned_ ? factor_named(drop_first_vertex(ops.lap_scalar), "the grounded scalar Laplacian")
                           : factor_named(ops.lap_scalar, "the scalar Laplacian")) {}

std::vector<double> HxOperator::smoother_apply(const std::vector<double>& r) const {
  const index_t n = block_.rows;
  const auto diag = block_.diagonal();
  std::vector<double> x(static_cast<size_t>(n), 0.0);
  for (int sweep = 0; sweep < smoother_sweeps; ++sweep) {
    // One symmetric Gauss-Seidel iteration on (C+M+B) x = r; with the zero
    // start this is the classic (D+U)^{-1} D (D+L)^{-1} application, which
    // keeps the smoother a symmetric operator.
    for (index_t i = 0; i < n; ++i) {
      double s = r[static_cast<size_t>(i)];
      for (index_t e = block_.row_ptr[static_cast<size_t>(i)]; e < block_.row_ptr[static_cast<size_t>(i) + 1]; ++e) {
        const index_t j = block_.col_idx[static_cast<size_t>(e)];
        if (j != i) s -= block_.values[static_cast<size_t>(e)] * x[static_cast<size_t>(j)];
      }
      x[static_cast<size_t>(i)] = s / diag[static_cast<size_t>(i)];
    }
    for (index_t i = n - 1; i >= 0; --i) {
      double s = r[static_cast<size_t>(i)];
      for (index_t e = block_.row_ptr[static_cast<size_t>(i)]; e < block_.row_ptr[static_cast<size_t>(i) + 1]; ++e) {
        const index_t j = block_.col_idx[static_cast<size_t>(e)];
        if (j != i) s -= block_.values[static_cast<size_t>(e)] * x[static_cast<size_t>(j)];
      }
      x[static_cast<size_t>(i)] = s / diag[static_cast<size_t>(i)];
    }
  }
  return x;
}

std::vector<double> HxOperator::scalar_solve(const std::vector<double>& v) const {
  if (!pinned_) return chol_scalar_.solve(v);
  std::vector<double> reduced(v.begin() + 1, v.end());
  reduced = chol_scalar_.solve(std::move(reduced));
  std::vector<double> full(v.size());
  full[0] = 0.0;
  std::copy(reduced.begin(), reduced.end(), full.begin() + 1);
  return full;
}

std::vector<double> HxOperator::apply(const std::vector<double>& r) const {
  const index_t n = block_.rows;
  if (static_cast<index_t>(r.size()) != n) throw DimensionError("hx apply: vector length mismatch");
  std::vector<double> out(static_cast<size_t>(n), 0.0);

  if (use_smoother) {
    const auto s = smoother_apply(r);
    for (index_t i = 0; i < n; ++i) out[static_cast<size_t>(i)] += s[static_cast<size_t>(i)];
  }

  if (use_curl_term) {
    // P_curl (L + k^2 M)^{-1} P_curl^T r, three identical scalar blocks.
    std::vector<double> nodal(static_cast<size_t>(3) * static_cast<size_t>(n_vertices_));
    spmv(pcurlt_, r.data(), nodal.data());
    for (int c = 0; c < 3; ++c) {
      std::vector<double> comp(nodal.begin() + static_cast<size_t>(c) * n_vertices_,
                               nodal.begin() + static_cast<size_t>(c + 1) * n_vertices_);
      comp = chol_beta_.solve(std::move(comp));
      std::copy(comp.begin(), comp.end(), nodal.begin() + static_cast<size_t>(c) * n_vertices_);
    }
    std::vector<double> lifted(static_cast<size_t>(n));
    spmv(pcurl_, nodal.data(), lifted.data());
    for (index_t i = 0; i < n; ++i) out[static_cast<size_t>(i)] += lifted[static_cast<size_t>(i)];
  }

  if (use_gradient_term) {
    std::vector<double> pot(static_cast<size_t>(n_vertices_));
    spmv(gt_, r.data(), pot.data());
    pot = scalar_solve(pot);
    std::vector<double> lifted(static_cast<size_t>(n));
    spmv(g_, pot.data(), lifted.data());
    for (index_t i = 0; i < n; ++i) out[static_cast<size_t>(i)] += lifted[static_cast<size_t>(i)] / k2_;
  }
  return out;
}

HxBlockPrecond::HxBlockPrecond(const HxOperator& hx, Mode mode) : hx_(hx), mode_(mode) {
  inner.rtol = 1e-2;
  inner.max_iter = 20;
  inner.record_history = false;
}

std::vector<double> HxBlockPrecond::apply(const std::vector<double>& r) const {
  const index_t n = hx_.size();
  if (static_cast<index_t>(r.size()) != static_cast<index_t>(2) * n)
    throw DimensionError("hx block precond: vector length mismatch");
  std::vector<double> out(r.size());

  auto block_op = make_operator(hx_.block());
  LinearOperator<double> hx_op{n, [this](const std::vector<double>& v, std::vector<double>& y) { y = hx_.apply(v); }};

  for (int half = 0; half < 2; ++half) {
    std::vector<double> rh(r.begin() + static_cast<size_t>(half) * n, r.begin() + static_cast<size_t>(half + 1) * n);
    std::vector<double> xh;
    if (mode_ == Mode::precond) {
      auto rep = pcg(block_op, rh, xh, inner, &hx_op);
      (half == 0 ? inner_iterations_first : inner_iterations_second) += rep.iterations;
    } else {
      xh = hx_.apply(rh);
    }
    std::copy(xh.begin(), xh.end(), out.begin() + static_cast<size_t>(half) * n);
  }
  return out;
}

}  // namespace maxlab
