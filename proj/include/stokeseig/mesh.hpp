// SPDX-License-Identifier: MIT
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace stokeseig {

enum class Domain { square, lshape, disk };

inline const char* domain_name(Domain d) {
  switch (d) {
    case Domain::square: return "square";
    case Domain::lshape: return "lshape";
    default: return "disk";
  }
}

// Conforming triangulation with oriented edge topology.
// Cells are counterclockwise vertex triples.  Edges store the lower vertex
// index first and are numbered in lexicographic order of their vertex pair.
// Local edge i of a cell is the edge opposite local vertex i.
struct Mesh {
  std::vector<std::array<double, 2>> vertices;
  std::vector<std::array<int, 3>> cells;
  std::vector<std::array<int, 2>> edges;
  // per cell: (edge index, orientation sign) for local edges 0,1,2.
  // sign is +1 when the CCW boundary traversal of the cell walks the edge
  // from its lower to its higher global vertex index.
  std::vector<std::array<std::pair<int, int>, 3>> cell_edges;
  std::vector<int> boundary_edges;        // sorted edge indices
  std::vector<std::uint8_t> edge_on_boundary;
  Domain domain_tag = Domain::square;
  int resolution = 0;

  int num_vertices() const { return static_cast<int>(vertices.size()); }
  int num_cells() const { return static_cast<int>(cells.size()); }
  int num_edges() const { return static_cast<int>(edges.size()); }

  std::array<std::array<double, 2>, 3> cell_coords(int c) const {
    const auto& t = cells[c];
    return {vertices[t[0]], vertices[t[1]], vertices[t[2]]};
  }
};

// Local edge i (opposite vertex i) as its pair of local vertex indices,
// lower local index first.
inline constexpr std::array<std::array<int, 2>, 3> local_edge_vertices = {
    {{1, 2}, {0, 2}, {0, 1}}};

inline double signed_area(const std::array<std::array<double, 2>, 3>& p) {
  return 0.5 * ((p[1][0] - p[0][0]) * (p[2][1] - p[0][1]) -
                (p[2][0] - p[0][0]) * (p[1][1] - p[0][1]));
}

// Populates edges, cell_edges and boundary data from the cell list.
// Edge numbering is deterministic: sorted lexicographically by vertex pair.
inline void build_edge_topology(Mesh& mesh) {
  const int nc = mesh.num_cells();
  for (int c = 0; c < nc; ++c) {
    const auto& t = mesh.cells[c];
    if (t[0] == t[1] || t[1] == t[2] || t[0] == t[2])
      throw std::invalid_argument("cell " + std::to_string(c) +
                                  " has repeated vertices");
    for (int v : t)
      if (v < 0 || v >= mesh.num_vertices())
        throw std::invalid_argument("cell " + std::to_string(c) +
                                    " references vertex out of range");
    if (signed_area(mesh.cell_coords(c)) <= 0.0)
      throw std::invalid_argument("cell " + std::to_string(c) +
                                  " is not counterclockwise");
  }

  std::map<std::array<int, 2>, int> index_of;
  for (const auto& t : mesh.cells)
    for (const auto& le : local_edge_vertices) {
      int a = t[le[0]], b = t[le[1]];
      index_of.emplace(std::array<int, 2>{std::min(a, b), std::max(a, b)}, 0);
    }

  mesh.edges.clear();
  mesh.edges.reserve(index_of.size());
  for (auto& [pair, idx] : index_of) {
    idx = static_cast<int>(mesh.edges.size());
    mesh.edges.push_back(pair);
  }

  std::vector<int> incident(mesh.edges.size(), 0);
  mesh.cell_edges.assign(nc, {});
  for (int c = 0; c < nc; ++c) {
    const auto& t = mesh.cells[c];
    for (int i = 0; i < 3; ++i) {
      int a = t[local_edge_vertices[i][0]], b = t[local_edge_vertices[i][1]];
      int e = index_of.at({std::min(a, b), std::max(a, b)});
      if (++incident[e] > 2)
        throw std::invalid_argument("non-conforming mesh: edge (" +
                                    std::to_string(mesh.edges[e][0]) + "," +
                                    std::to_string(mesh.edges[e][1]) +
                                    ") shared by more than two cells");
      // CCW traversal walks local edge i as v1->v2, v2->v0 or v0->v1.
      int from = t[(i + 1) % 3], to = t[(i + 2) % 3];
      mesh.cell_edges[c][i] = {e, from < to ? +1 : -1};
    }
  }

  mesh.edge_on_boundary.assign(mesh.edges.size(), 0);
  mesh.boundary_edges.clear();
  for (int e = 0; e < mesh.num_edges(); ++e)
    if (incident[e] == 1) {
      mesh.edge_on_boundary[e] = 1;
      mesh.boundary_edges.push_back(e);
    }
}

namespace detail {

inline void require_positive(int N) {
  if (N < 1) throw std::invalid_argument("mesh resolution N must be >= 1");
}

}  // namespace detail

// Structured mesh of the square (-1,1)^2: N x N grid of squares, each split
// by the diagonal running from its lower-left to its upper-right corner.
inline Mesh unit_square_mesh(int N) {
  detail::require_positive(N);
  Mesh mesh;
  mesh.domain_tag = Domain::square;
  mesh.resolution = N;
  const double step = 2.0 / N;
  for (int j = 0; j <= N; ++j)
    for (int i = 0; i <= N; ++i)
      mesh.vertices.push_back({-1.0 + step * i, -1.0 + step * j});
  auto vid = [N](int i, int j) { return j * (N + 1) + i; };
  for (int j = 0; j < N; ++j)
    for (int i = 0; i < N; ++i) {
      int v00 = vid(i, j), v10 = vid(i + 1, j);
      int v01 = vid(i, j + 1), v11 = vid(i + 1, j + 1);
      mesh.cells.push_back({v00, v10, v11});
      mesh.cells.push_back({v00, v11, v01});
    }
  build_edge_topology(mesh);
  return mesh;
}

// L-shaped domain (-1,1)^2 minus [-1,0]x[-1,0]: its three unit squares each
// carry an N x N structured grid with all diagonals in the same direction.
// The reentrant corner (0,0) is a mesh vertex.
inline Mesh lshape_mesh(int N) {
  detail::require_positive(N);
  Mesh mesh;
  mesh.domain_tag = Domain::lshape;
  mesh.resolution = N;

  // enumerate lattice points of the three squares on the integer grid
  // (ix,iy) in [-N..N]^2, scanning rows bottom to top
  std::map<std::array<int, 2>, int> vid;
  auto inside = [N](int ix, int iy) {
    bool q1 = ix >= 0 && iy >= 0;
    bool q2 = ix <= 0 && iy >= 0;
    bool q4 = ix >= 0 && iy <= 0;
    return (q1 || q2 || q4) && std::abs(ix) <= N && std::abs(iy) <= N;
  };
  for (int iy = -N; iy <= N; ++iy)
    for (int ix = -N; ix <= N; ++ix)
      if (inside(ix, iy)) {
        vid[{ix, iy}] = static_cast<int>(mesh.vertices.size());
        mesh.vertices.push_back(
            {static_cast<double>(ix) / N, static_cast<double>(iy) / N});
      }

  auto add_square = [&](int x0, int y0) {
    for (int j = 0; j < N; ++j)
      for (int i = 0; i < N; ++i) {
        int v00 = vid.at({x0 + i, y0 + j});
        int v10 = vid.at({x0 + i + 1, y0 + j});
        int v01 = vid.at({x0 + i, y0 + j + 1});
        int v11 = vid.at({x0 + i + 1, y0 + j + 1});
        mesh.cells.push_back({v00, v10, v11});
        mesh.cells.push_back({v00, v11, v01});
      }
  };
  add_square(-N, 0);  // upper-left square
  add_square(0, 0);   // upper-right square
  add_square(0, -N);  // lower-right square

  build_edge_topology(mesh);
  return mesh;
}

// Concentric-ring triangulation of the inscribed polygon of the unit disk:
// ring i (i=1..N) holds 6(2i-1) triangles, 6N^2 in total; all vertices of
// ring i sit at radius i/N, so the outermost ring lies on the unit circle.
inline Mesh disk_mesh(int N) {
  detail::require_positive(N);
  Mesh mesh;
  mesh.domain_tag = Domain::disk;
  mesh.resolution = N;

  // vertex 0 is the center; ring i contributes 6i equally spaced vertices
  mesh.vertices.push_back({0.0, 0.0});
  std::vector<int> ring_start(N + 1, 0);
  for (int i = 1; i <= N; ++i) {
    ring_start[i] = static_cast<int>(mesh.vertices.size());
    const double r = static_cast<double>(i) / N;
    for (int j = 0; j < 6 * i; ++j) {
      const double a = 2.0 * M_PI * j / (6 * i);
      mesh.vertices.push_back({r * std::cos(a), r * std::sin(a)});
    }
  }

  for (int s = 0; s < 6; ++s)
    mesh.cells.push_back(
        {0, ring_start[1] + s, ring_start[1] + (s + 1) % 6});
  for (int i = 2; i <= N; ++i) {
    auto outer = [&](int j) { return ring_start[i] + j % (6 * i); };
    auto inner = [&](int j) { return ring_start[i - 1] + j % (6 * (i - 1)); };
    for (int s = 0; s < 6; ++s)
      for (int j = 0; j < i; ++j) {
        int o0 = outer(s * i + j), o1 = outer(s * i + j + 1);
        int n0 = inner(s * (i - 1) + j);
        mesh.cells.push_back({o0, o1, n0});
        if (j + 1 < i) {
          int n1 = inner(s * (i - 1) + j + 1);
          mesh.cells.push_back({n0, o1, n1});
        }
      }
  }

  build_edge_topology(mesh);
  return mesh;
}

// One header line "nv nc ne", then vertex lines "x y", cell lines
// "v0 v1 v2" and edge lines "v0 v1 b" with boundary flag b.
inline void write_ascii(const Mesh& mesh, std::ostream& out) {
  out << mesh.num_vertices() << ' ' << mesh.num_cells() << ' '
      << mesh.num_edges() << '\n';
  out.precision(17);
  for (const auto& v : mesh.vertices) out << v[0] << ' ' << v[1] << '\n';
  for (const auto& t : mesh.cells)
    out << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
  for (int e = 0; e < mesh.num_edges(); ++e)
    out << mesh.edges[e][0] << ' ' << mesh.edges[e][1] << ' '
        << int(mesh.edge_on_boundary[e]) << '\n';
}

}  // namespace stokeseig
