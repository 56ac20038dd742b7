#include "maxlab/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>

namespace maxlab {

namespace {

constexpr int kPerms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};

int perm_sign(const int* p) {
  int inv = 0;
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j)
      if (p[i] > p[j]) ++inv;
  return inv % 2 == 0 ? 1 : -1;
}

// The L-shaped obstacle in cell coordinates: the centred half-width cube with
// the quadrant y < 0, z < 0 cut away. q = n/4 cells span a quarter edge.
bool cell_in_scatterer(int ix, int iy, int iz, int q) {
  const bool in_cube = ix >= q && ix < 3 * q && iy >= q && iy < 3 * q && iz >= q && iz < 3 * q;
  if (!in_cube) return false;
  const bool in_notch = iy >= q && iy < 2 * q && iz >= q && iz < 2 * q;
  return !in_notch;
}

double tet_signed_volume(const std::array<double, 3>& a, const std::array<double, 3>& b,
                         const std::array<double, 3>& c, const std::array<double, 3>& d) {
  const double u[3] = {b[0] - a[0], b[1] - a[1], b[2] - a[2]};
  const double v[3] = {c[0] - a[0], c[1] - a[1], c[2] - a[2]};
  const double w[3] = {d[0] - a[0], d[1] - a[1], d[2] - a[2]};
  return (u[0] * (v[1] * w[2] - v[2] * w[1]) - u[1] * (v[0] * w[2] - v[2] * w[0]) +
          u[2] * (v[0] * w[1] - v[1] * w[0])) /
         6.0;
}

}  // namespace

index_t Mesh::edge_id(index_t a, index_t b) const {
  std::array<index_t, 2> key{std::min(a, b), std::max(a, b)};
  const auto it = std::lower_bound(edges.begin(), edges.end(), key);
  if (it == edges.end() || *it != key)
    throw DimensionError("Mesh::edge_id: (" + std::to_string(a) + ", " + std::to_string(b) + ") is not an edge");
  return static_cast<index_t>(it - edges.begin());
}

Mesh build_mesh(const MeshParams& p) {
  if (p.n < 4 || p.n % 4 != 0)
    throw DimensionError("build_mesh: cell count must be a positive multiple of 4, got " + std::to_string(p.n));
  if (p.scale <= 0) throw DimensionError("build_mesh: scale must be positive");

  Mesh m;
  m.n = p.n;
  m.scale = p.scale;
  m.has_scatterer = p.scatterer;

  const int n = p.n;
  const int np = n + 1;
  const int q = n / 4;
  const double h = p.scale / n;

  // Lattice vertex ids, x fastest; compacted after unused ones are known.
  auto lattice_id = [np](int ix, int iy, int iz) { return (iz * np + iy) * np + ix; };

  std::vector<char> vertex_used(static_cast<size_t>(np) * np * np, 0);
  std::vector<std::array<int, 4>> tet_lattice;  // lattice ids per tet

  for (int iz = 0; iz < n; ++iz)
    for (int iy = 0; iy < n; ++iy)
      for (int ix = 0; ix < n; ++ix) {
        if (p.scatterer && cell_in_scatterer(ix, iy, iz, q)) {
          ++m.removed_cells;
          continue;
        }
        for (const auto& perm : kPerms) {
          // Walk from the cell origin to the far corner one axis at a time.
          int corner[4][3] = {{ix, iy, iz}, {ix, iy, iz}, {ix, iy, iz}, {ix, iy, iz}};
          for (int step = 0; step < 3; ++step)
            for (int later = step + 1; later <= 3; ++later) ++corner[later][perm[step]];
          std::array<int, 4> ids;
          for (int v = 0; v < 4; ++v) ids[static_cast<size_t>(v)] = lattice_id(corner[v][0], corner[v][1], corner[v][2]);
          if (perm_sign(perm) < 0) std::swap(ids[2], ids[3]);  // restore positive orientation
          tet_lattice.push_back(ids);
          for (int id : ids) vertex_used[static_cast<size_t>(id)] = 1;
        }
      }
  m.removed_volume = static_cast<double>(m.removed_cells) * h * h * h;

  // Compact vertex numbering, lattice order preserved.
  std::vector<index_t> compact(vertex_used.size(), -1);
  for (int iz = 0; iz <= n; ++iz)
    for (int iy = 0; iy <= n; ++iy)
      for (int ix = 0; ix <= n; ++ix) {
        const int lid = lattice_id(ix, iy, iz);
        if (!vertex_used[static_cast<size_t>(lid)]) continue;
        compact[static_cast<size_t>(lid)] = m.num_vertices();
        m.vertices.push_back({-0.5 * p.scale + ix * h, -0.5 * p.scale + iy * h, -0.5 * p.scale + iz * h});
      }

  m.tets.reserve(tet_lattice.size());
  for (const auto& t : tet_lattice) {
    std::array<index_t, 4> v;
    for (int i = 0; i < 4; ++i) v[static_cast<size_t>(i)] = compact[static_cast<size_t>(t[static_cast<size_t>(i)])];
    m.tets.push_back(v);
  }

  // Unique edge list: ascending pairs in lexicographic order.
  constexpr int kLocalEdges[6][2] = {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}};
  std::vector<std::array<index_t, 2>> pairs;
  pairs.reserve(m.tets.size() * 6);
  for (const auto& t : m.tets)
    for (const auto& le : kLocalEdges) {
      const index_t a = t[static_cast<size_t>(le[0])], b = t[static_cast<size_t>(le[1])];
      pairs.push_back({std::min(a, b), std::max(a, b)});
    }
  std::sort(pairs.begin(), pairs.end());
  pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
  m.edges = std::move(pairs);

  m.tet_edges.resize(m.tets.size());
  m.tet_edge_signs.resize(m.tets.size());
  for (size_t t = 0; t < m.tets.size(); ++t)
    for (int e = 0; e < 6; ++e) {
      const index_t a = m.tets[t][static_cast<size_t>(kLocalEdges[e][0])];
      const index_t b = m.tets[t][static_cast<size_t>(kLocalEdges[e][1])];
      m.tet_edges[t][static_cast<size_t>(e)] = m.edge_id(a, b);
      // Global direction runs from the lower vertex id to the higher.
      m.tet_edge_signs[t][static_cast<size_t>(e)] = static_cast<signed char>(a < b ? 1 : -1);
    }

  // Boundary faces appear in exactly one tet.
  std::map<std::array<index_t, 3>, std::pair<index_t, index_t>> face_count;  // face -> (tet, opposite), erased when shared
  constexpr int kLocalFaces[4][3] = {{1, 2, 3}, {0, 2, 3}, {0, 1, 3}, {0, 1, 2}};
  for (size_t t = 0; t < m.tets.size(); ++t)
    for (int f = 0; f < 4; ++f) {
      std::array<index_t, 3> key{m.tets[t][static_cast<size_t>(kLocalFaces[f][0])],
                                 m.tets[t][static_cast<size_t>(kLocalFaces[f][1])],
                                 m.tets[t][static_cast<size_t>(kLocalFaces[f][2])]};
      std::sort(key.begin(), key.end());
      const auto it = face_count.find(key);
      if (it == face_count.end())
        face_count.emplace(key, std::make_pair(static_cast<index_t>(t), m.tets[t][static_cast<size_t>(f)]));
      else
        face_count.erase(it);
    }

  const double half = 0.5 * p.scale;
  const double tol = 1e-12 * p.scale;
  auto on_outer_plane = [&](const std::array<index_t, 3>& v) {
    for (int axis = 0; axis < 3; ++axis)
      for (double plane : {-half, half}) {
        bool all = true;
        for (index_t vid : v)
          if (std::abs(m.vertices[static_cast<size_t>(vid)][static_cast<size_t>(axis)] - plane) > tol) {
            all = false;
            break;
          }
        if (all) return true;
      }
    return false;
  };

  m.faces.reserve(face_count.size());
  for (const auto& [key, owner] : face_count) {
    BoundaryFace bf;
    bf.v = key;
    bf.tet = owner.first;
    bf.opposite = owner.second;
    bf.kind = on_outer_plane(key) ? FaceKind::impedance : FaceKind::scatterer;
    m.faces.push_back(bf);
  }

  // Boundary tags: an edge or vertex is on a boundary piece when some face of
  // that piece contains it.
  m.edge_on_gamma.assign(static_cast<size_t>(m.num_edges()), 0);
  m.edge_on_sigma.assign(static_cast<size_t>(m.num_edges()), 0);
  m.vertex_on_gamma.assign(static_cast<size_t>(m.num_vertices()), 0);
  m.vertex_on_sigma.assign(static_cast<size_t>(m.num_vertices()), 0);
  for (const auto& bf : m.faces) {
    auto& edge_tag = bf.kind == FaceKind::scatterer ? m.edge_on_gamma : m.edge_on_sigma;
    auto& vertex_tag = bf.kind == FaceKind::scatterer ? m.vertex_on_gamma : m.vertex_on_sigma;
    const index_t fe[3][2] = {{bf.v[0], bf.v[1]}, {bf.v[0], bf.v[2]}, {bf.v[1], bf.v[2]}};
    for (const auto& e : fe) edge_tag[static_cast<size_t>(m.edge_id(e[0], e[1]))] = 1;
    for (index_t vid : bf.v) vertex_tag[static_cast<size_t>(vid)] = 1;
  }

  // All tets must be positively oriented; the permutation fix above
  // guarantees it, so treat violations as construction bugs.
  for (const auto& t : m.tets)
    if (tet_signed_volume(m.vertices[static_cast<size_t>(t[0])], m.vertices[static_cast<size_t>(t[1])],
                          m.vertices[static_cast<size_t>(t[2])], m.vertices[static_cast<size_t>(t[3])]) <= 0)
      throw std::logic_error("build_mesh: negatively oriented tetrahedron");

  return m;
}

int cells_for_wavelength(double k, double ppw, double scale) {
  if (k <= 0 || ppw <= 0 || scale <= 0) throw DimensionError("cells_for_wavelength: k, ppw, scale must be positive");
  const double exact = ppw * k * scale / (2.0 * M_PI);
  int n = static_cast<int>(std::ceil(exact));
  n = ((n + 3) / 4) * 4;
  return std::max(n, 4);
}

double points_per_wavelength(int n, double k, double scale) {
  return 2.0 * M_PI * n / (k * scale);
}

void write_mesh_text(const std::string& path, const Mesh& m) {
  std::ofstream out(path);
  if (!out) throw IoError(path + ": cannot open for writing");
  out << "# tetrahedral mesh n=" << m.n << " scale=" << m.scale << " scatterer=" << (m.has_scatterer ? 1 : 0) << "\n";
  out << "vertices " << m.num_vertices() << "\n";
  char buf[128];
  for (const auto& v : m.vertices) {
    std::snprintf(buf, sizeof(buf), "%.17g %.17g %.17g\n", v[0], v[1], v[2]);
    out << buf;
  }
  out << "tets " << m.num_tets() << "\n";
  for (const auto& t : m.tets) out << t[0] << " " << t[1] << " " << t[2] << " " << t[3] << "\n";
  out << "edges " << m.num_edges() << "\n";
  for (const auto& e : m.edges) out << e[0] << " " << e[1] << "\n";
  out << "faces " << m.faces.size() << "\n";
  for (const auto& f : m.faces)
    out << (f.kind == FaceKind::scatterer ? "scatterer" : "impedance") << " " << f.v[0] << " " << f.v[1] << " "
        << f.v[2] << "\n";
  if (!out) throw IoError(path + ": write failed");
}

}  // namespace maxlab
