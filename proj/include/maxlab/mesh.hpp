#pragma once

#include <array>
#include <string>
#include <vector>

#include "maxlab/types.hpp"

namespace maxlab {

enum class FaceKind : char {
  scatterer,  // metallic surface, tangential field eliminated
  impedance   // outer absorbing boundary
};

struct BoundaryFace {
  std::array<index_t, 3> v;  // global vertex ids, ascending
  index_t tet = -1;          // owning tetrahedron
  index_t opposite = -1;     // the tet vertex not on the face
  FaceKind kind = FaceKind::impedance;
};

// Tetrahedral mesh of the cube [-s/2, s/2]^3 with the L-shaped obstacle
// removed. Each grid cell is cut into six tetrahedra around its main
// diagonal, so neighbouring cells share matching faces. The cell count per
// axis must be divisible by 4 so the obstacle walls coincide with grid planes.
struct Mesh {
  int n = 0;         // cells per axis
  double scale = 1;  // edge length of the cube
  bool has_scatterer = true;

  std::vector<std::array<double, 3>> vertices;
  std::vector<std::array<index_t, 4>> tets;           // positively oriented
  std::vector<std::array<index_t, 2>> edges;          // ascending pairs, sorted
  std::vector<std::array<index_t, 6>> tet_edges;      // local order 01 02 03 12 13 23
  std::vector<std::array<signed char, 6>> tet_edge_signs;
  std::vector<BoundaryFace> faces;

  std::vector<char> edge_on_gamma, edge_on_sigma;      // per edge
  std::vector<char> vertex_on_gamma, vertex_on_sigma;  // per vertex

  index_t removed_cells = 0;
  double removed_volume = 0;

  double h() const { return scale / n; }
  index_t num_vertices() const { return static_cast<index_t>(vertices.size()); }
  index_t num_tets() const { return static_cast<index_t>(tets.size()); }
  index_t num_edges() const { return static_cast<index_t>(edges.size()); }

  // Id of the edge {a, b}; throws if the pair is not a mesh edge.
  index_t edge_id(index_t a, index_t b) const;
};

struct MeshParams {
  int n = 4;
  double scale = 1.0;
  bool scatterer = true;
};

Mesh build_mesh(const MeshParams& p);

// Smallest cell count divisible by 4 that resolves wavenumber k with the
// requested points per wavelength on a cube of the given edge length.
int cells_for_wavelength(double k, double ppw, double scale = 1.0);

// Points per wavelength delivered by an n-cell grid at wavenumber k.
double points_per_wavelength(int n, double k, double scale = 1.0);

// Plain-text dump (vertices, tets, edges, boundary faces).
void write_mesh_text(const std::string& path, const Mesh& m);

}  // namespace maxlab
