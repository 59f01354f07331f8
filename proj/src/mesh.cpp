#include "mpet/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <stdexcept>
#include <string>

namespace mpet {

Mesh Mesh::structured(int n) {
  if (n < 1) throw std::invalid_argument("Mesh::structured: N must be >= 1");
  Mesh m;
  m.n_ = n;
  const int nv = n + 1;
  m.vertices_.reserve(static_cast<std::size_t>(nv) * nv);
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i)
      m.vertices_.emplace_back(static_cast<double>(i) / n, static_cast<double>(j) / n);

  auto vid = [nv](int i, int j) { return j * nv + i; };
  m.cells_.reserve(2 * static_cast<std::size_t>(n) * n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const int ll = vid(i, j), lr = vid(i + 1, j), ur = vid(i + 1, j + 1), ul = vid(i, j + 1);
      m.cells_.push_back({ll, lr, ur});
      m.cells_.push_back({ll, ur, ul});
    }
  }

  // Edges numbered by sorted (lower, higher) vertex pair.
  std::map<std::pair<int, int>, int> edge_id;
  for (const auto& c : m.cells_)
    for (int k = 0; k < 3; ++k) {
      const int a = c[(k + 1) % 3], b = c[(k + 2) % 3];
      edge_id.emplace(std::minmax(a, b), 0);
    }
  int next = 0;
  for (auto& [key, id] : edge_id) {
    id = next++;
    m.edges_.push_back({key.first, key.second});
  }

  const int ne = static_cast<int>(m.edges_.size());
  m.edge_cells_.assign(ne, {-1, -1});
  m.edge_normals_.resize(ne);
  m.edge_lengths_.resize(ne);
  for (int e = 0; e < ne; ++e) {
    const Vec2 t = m.vertices_[m.edges_[e][1]] - m.vertices_[m.edges_[e][0]];
    m.edge_lengths_[e] = t.norm();
    m.edge_normals_[e] = Vec2(t.y(), -t.x()) / m.edge_lengths_[e];
  }

  const int nc = static_cast<int>(m.cells_.size());
  m.cell_edges_.resize(nc);
  m.cell_edge_signs_.resize(nc);
  m.cell_areas_.resize(nc);
  for (int c = 0; c < nc; ++c) {
    const auto& v = m.cells_[c];
    const Vec2 d1 = m.vertices_[v[1]] - m.vertices_[v[0]];
    const Vec2 d2 = m.vertices_[v[2]] - m.vertices_[v[0]];
    m.cell_areas_[c] = 0.5 * (d1.x() * d2.y() - d1.y() * d2.x());
    for (int k = 0; k < 3; ++k) {
      const int a = v[(k + 1) % 3], b = v[(k + 2) % 3];
      const int e = edge_id.at(std::minmax(a, b));
      m.cell_edges_[c][k] = e;
      // Counterclockwise traversal a -> b has outward normal rot(-90)(b - a);
      // it agrees with the global normal iff a is the lower vertex.
      m.cell_edge_signs_[c][k] = a < b ? 1 : -1;
      auto& ec = m.edge_cells_[e];
      (ec[0] < 0 ? ec[0] : ec[1]) = c;
    }
  }

  m.boundary_tags_.assign(ne, -1);
  for (int e = 0; e < ne; ++e) {
    if (m.edge_cells_[e][1] < 0) {
      m.boundary_edges_.push_back(e);
      const Vec2 mid = m.edge_midpoint(e);
      constexpr double tol = 1e-12;
      BoundarySegment s;
      if (std::abs(mid.y()) < tol)
        s = BoundarySegment::Bottom;
      else if (std::abs(mid.x() - 1.0) < tol)
        s = BoundarySegment::Right;
      else if (std::abs(mid.y() - 1.0) < tol)
        s = BoundarySegment::Top;
      else
        s = BoundarySegment::Left;
      m.boundary_tags_[e] = static_cast<std::int8_t>(s);
    } else {
      m.interior_edges_.push_back(e);
    }
  }
  return m;
}

Vec2 Mesh::edge_midpoint(int e) const {
  return 0.5 * (vertices_[edges_[e][0]] + vertices_[edges_[e][1]]);
}

Vec2 Mesh::edge_point(int e, double s) const {
  return (1.0 - s) * vertices_[edges_[e][0]] + s * vertices_[edges_[e][1]];
}

BoundarySegment Mesh::boundary_segment(int e) const {
  if (e < 0 || e >= num_edges() || boundary_tags_[e] < 0)
    throw std::invalid_argument("Mesh::boundary_segment: edge " + std::to_string(e) +
                                " is not a boundary edge");
  return static_cast<BoundarySegment>(boundary_tags_[e]);
}

int Mesh::local_edge_index(int c, int e) const {
  const auto& ce = cell_edges_[c];
  for (int k = 0; k < 3; ++k)
    if (ce[k] == e) return k;
  throw std::invalid_argument("Mesh::local_edge_index: edge not in cell");
}

void Mesh::write_text(std::ostream& os) const {
  os << "vertices " << num_vertices() << '\n';
  for (const auto& v : vertices_) os << v.x() << ' ' << v.y() << '\n';
  os << "cells " << num_cells() << '\n';
  for (const auto& c : cells_) os << c[0] << ' ' << c[1] << ' ' << c[2] << '\n';
}

}  // namespace mpet
