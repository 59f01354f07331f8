#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace mpet {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

/// Sides of the unit square: Gamma_1 bottom, Gamma_2 right, Gamma_3 top,
/// Gamma_4 left.
enum class BoundarySegment : std::uint8_t { Bottom = 0, Right = 1, Top = 2, Left = 3 };

inline constexpr int kNumSegments = 4;

/// Structured triangulation of [0,1]^2 into 2N^2 triangles. Each grid square
/// is cut by its lower-left to upper-right diagonal.
///
/// Cells are counterclockwise. Local edge k of a cell joins local vertices
/// k+1 and k+2 (mod 3), i.e. it is opposite vertex k. Every edge carries a
/// global unit normal obtained by rotating the tangent from its lower to its
/// higher vertex index clockwise; `cell_edge_signs` stores
/// (outward normal of the cell) . (global normal) = +-1.
class Mesh {
 public:
  static Mesh structured(int n);

  [[nodiscard]] int subdivisions() const { return n_; }
  [[nodiscard]] double h() const { return 1.0 / n_; }

  [[nodiscard]] int num_vertices() const { return static_cast<int>(vertices_.size()); }
  [[nodiscard]] int num_cells() const { return static_cast<int>(cells_.size()); }
  [[nodiscard]] int num_edges() const { return static_cast<int>(edges_.size()); }

  [[nodiscard]] const Vec2& vertex(int v) const { return vertices_[v]; }
  [[nodiscard]] const std::array<int, 3>& cell_vertices(int c) const { return cells_[c]; }
  [[nodiscard]] const std::array<int, 3>& cell_edges(int c) const { return cell_edges_[c]; }
  [[nodiscard]] const std::array<int, 3>& cell_edge_signs(int c) const { return cell_edge_signs_[c]; }
  [[nodiscard]] double cell_area(int c) const { return cell_areas_[c]; }

  [[nodiscard]] const std::array<int, 2>& edge_vertices(int e) const { return edges_[e]; }
  /// Adjacent cells; the second entry is -1 on the boundary.
  [[nodiscard]] const std::array<int, 2>& edge_cells(int e) const { return edge_cells_[e]; }
  [[nodiscard]] const Vec2& edge_normal(int e) const { return edge_normals_[e]; }
  [[nodiscard]] double edge_length(int e) const { return edge_lengths_[e]; }
  [[nodiscard]] Vec2 edge_midpoint(int e) const;
  /// Point at arc-length fraction s in [0,1], measured from the lower vertex.
  [[nodiscard]] Vec2 edge_point(int e, double s) const;
  [[nodiscard]] bool is_boundary_edge(int e) const { return edge_cells_[e][1] < 0; }

  [[nodiscard]] std::span<const int> interior_edges() const { return interior_edges_; }
  [[nodiscard]] std::span<const int> boundary_edges() const { return boundary_edges_; }

  /// Geometric side containing the edge midpoint; throws for interior edges.
  [[nodiscard]] BoundarySegment boundary_segment(int e) const;
  /// Position of `c` in edge_cells(e): 0 or 1.
  [[nodiscard]] int local_side(int e, int c) const { return edge_cells_[e][0] == c ? 0 : 1; }
  /// Local index (0..2) of edge e within cell c.
  [[nodiscard]] int local_edge_index(int c, int e) const;

  /// Plain-text dump: vertex count and coordinates, then cells.
  void write_text(std::ostream& os) const;

 private:
  int n_ = 0;
  std::vector<Vec2> vertices_;
  std::vector<std::array<int, 3>> cells_;
  std::vector<std::array<int, 3>> cell_edges_;
  std::vector<std::array<int, 3>> cell_edge_signs_;
  std::vector<double> cell_areas_;
  std::vector<std::array<int, 2>> edges_;
  std::vector<std::array<int, 2>> edge_cells_;
  std::vector<Vec2> edge_normals_;
  std::vector<double> edge_lengths_;
  std::vector<int> interior_edges_;
  std::vector<int> boundary_edges_;
  std::vector<std::int8_t> boundary_tags_;
};

inline Mesh build_structured_mesh(int n) { return Mesh::structured(n); }

}  // namespace mpet
