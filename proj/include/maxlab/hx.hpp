#pragma once

#include <vector>

#include "maxlab/assembly.hpp"
#include "maxlab/csr.hpp"
#include "maxlab/krylov.hpp"
#include "maxlab/mesh.hpp"
#include "maxlab/sparse_cholesky.hpp"
#include "maxlab/types.hpp"

namespace maxlab {

// Auxiliary-space operator for the positive-definite edge matrix C+M+B:
//
//   H r = S^{-1} r + P_curl (L_vec + k^2 M_vec)^{-1} P_curl^T r
//               + k^{-2} G (-Lap)^{-1} G^T r
//
// with S^{-1} a symmetric Gauss-Seidel sweep on C+M+B, both auxiliary nodal
// problems solved by exact sparse Cholesky, and P_curl / G the nodal-to-edge
// interpolation and discrete gradient. The vector auxiliary matrix decouples
// into three identical scalar blocks, so one factorization serves all
// components. Without a scatterer the scalar Laplacian is singular
// (constants); the first free vertex is grounded to restore definiteness.
class HxOperator {
 public:
  HxOperator(const Mesh& mesh, const MaxwellOperators& ops);

  std::vector<double> apply(const std::vector<double>& r) const;

  const CsrMatrix<double>& block() const { return block_; }  // C+M+B
  index_t size() const { return block_.rows; }
  bool grounded() const { return pinned_; }

  // Diagnostic switches for the three additive terms.
  bool use_smoother = true;
  bool use_curl_term = true;
  bool use_gradient_term = true;
  int smoother_sweeps = 1;

 private:
  std::vector<double> smoother_apply(const std::vector<double>& r) const;
  std::vector<double> scalar_solve(const std::vector<double>& v) const;

  double k2_ = 0;
  index_t n_vertices_ = 0;
  bool pinned_ = false;
  CsrMatrix<double> block_;            // C+M+B on free edges
  CsrMatrix<double> g_, gt_;           // discrete gradient and its transpose
  CsrMatrix<double> pcurl_, pcurlt_;   // nodal interpolation and transpose
  SkylineCholesky chol_beta_;          // lap_scalar + k^2 mass_scalar
  SkylineCholesky chol_scalar_;        // lap_scalar, possibly grounded
};

// The paper's block-diagonal wrapper P = diag(C+M+B, C+M+B) for the split
// system, applied either by an inner HX-preconditioned PCG per half
// ("precond", the operator then varies between outer iterations, so the
// outer solver must be FGMRES) or by a single HX application per half
// ("solver").
class HxBlockPrecond {
 public:
  enum class Mode { precond, solver };

  HxBlockPrecond(const HxOperator& hx, Mode mode);

  std::vector<double> apply(const std::vector<double>& r) const;

  // Valid only while this object and the HxOperator stay alive.
  LinearOperator<double> as_operator() const {
    return {2 * hx_.size(), [this](const std::vector<double>& r, std::vector<double>& y) { y = apply(r); }};
  }

  Mode mode() const { return mode_; }
  KrylovOptions inner;  // precond-mode PCG budget

  // Accumulated inner PCG iterations per half (zero in solver mode).
  mutable long long inner_iterations_first = 0;
  mutable long long inner_iterations_second = 0;

 private:
  const HxOperator& hx_;
  Mode mode_;
};

}  // namespace maxlab
