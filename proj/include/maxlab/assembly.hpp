#pragma once

#include <array>
#include <functional>
#include <vector>

#include "maxlab/csr.hpp"
#include "maxlab/mesh.hpp"
#include "maxlab/types.hpp"

namespace maxlab {

using Vec3 = std::array<double, 3>;

inline Vec3 operator-(const Vec3& a, const Vec3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
inline Vec3 operator+(const Vec3& a, const Vec3& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
inline Vec3 operator*(double s, const Vec3& a) { return {s * a[0], s * a[1], s * a[2]}; }
inline double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
inline Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}
inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }

using FieldFn = std::function<Vec3(const Vec3&)>;

// Data driving the right-hand side: an incident field (with its curl) feeding
// the absorbing boundary, plus an optional volume load, split into real and
// imaginary parts. Absent pieces are treated as zero.
struct SourceSpec {
  FieldFn einc_re, einc_im;
  FieldFn curl_einc_re, curl_einc_im;
  FieldFn f_re, f_im;
};

// Incident plane wave: polarization * exp(i k direction . x). The direction
// is normalized; the polarization must be orthogonal to it.
SourceSpec plane_wave_source(double k, Vec3 direction, Vec3 polarization);

struct AssemblyOptions {
  double k = 1.0;
  double mu_r = 1.0;
  double eps_r = 1.0;
  double lambda_imp = 1.0;
};

// Discrete operators on the free (non-eliminated) spaces. Edges on the
// scatterer surface and, for the nodal spaces, vertices on it carry the
// homogeneous essential condition and are removed from all operators.
struct MaxwellOperators {
  AssemblyOptions options;

  index_t n_free_edges = 0;
  index_t n_free_vertices = 0;

  CsrMatrix<double> C;  // curl-curl term, (1/mu_r) (curl u, curl v)
  CsrMatrix<double> M;  // k^2 eps_r (u, v)
  CsrMatrix<double> B;  // k lambda (u_T, v_T) on the absorbing boundary

  std::vector<double> s_re, s_im;  // right-hand side

  CsrMatrix<double> G;            // nodal gradient into the edge space
  CsrMatrix<double> lap_scalar;   // (grad p, grad q) on free vertices
  CsrMatrix<double> mass_scalar;  // (p, q) on free vertices

  std::vector<index_t> edge_free_map;    // mesh edge -> free index or -1
  std::vector<index_t> vertex_free_map;  // mesh vertex -> free index or -1
  std::vector<index_t> free_edges;       // free index -> mesh edge
  std::vector<index_t> free_vertices;    // free index -> mesh vertex
};

MaxwellOperators assemble_operators(const Mesh& mesh, const AssemblyOptions& opt,
                                    const SourceSpec* source = nullptr);

// Edge-interpolation of vector nodal fields (component-major columns:
// column c * n_free_vertices + v is component c of vertex v). Each row
// integrates the linear field along its edge.
CsrMatrix<double> nodal_to_edge_interpolation(const Mesh& mesh, const MaxwellOperators& ops);

// Edge degrees of freedom of an analytic field: integral of field . tangent
// along each free edge (two-point Gauss on the straight edge, exact for the
// linear fields used in interpolation checks).
std::vector<double> interpolate_to_edges(const Mesh& mesh, const MaxwellOperators& ops, const FieldFn& field);

// Energy-seminorm distance between an edge-coefficient field and an analytic
// field: sqrt of sum over tets of |curl_h u - curl_exact|^2 evaluated by
// quadrature. Used by convergence studies.
double curl_seminorm_error(const Mesh& mesh, const MaxwellOperators& ops, const std::vector<double>& coeff_re,
                           const std::vector<double>& coeff_im, const FieldFn& curl_re, const FieldFn& curl_im);

}  // namespace maxlab
