#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace hexmask {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  Vec2& operator+=(Vec2 o) { x += o.x; y += o.y; return *this; }
  double dot(Vec2 o) const { return x * o.x + y * o.y; }
  double cross(Vec2 o) const { return x * o.y - y * o.x; }
  double norm() const { return std::hypot(x, y); }
};

inline double distance(Vec2 a, Vec2 b) { return (a - b).norm(); }

struct Box {
  double xmin = 0.0, ymin = 0.0, xmax = 0.0, ymax = 0.0;
  double width() const { return xmax - xmin; }
  double height() const { return ymax - ymin; }
};

inline constexpr int kNoCell = -1;

// Ring slots, counter-clockwise from east.
enum Direction : int { kEast = 0, kNorthEast, kNorthWest, kWest, kSouthWest, kSouthEast };

struct HexCell {
  int id = 0;
  int row = 0;
  int col = 0;
  Vec2 centroid;
  // node k sits at angle 30 + 60k degrees; it is shared with ring slots k and k+1.
  std::array<int, 6> node_ids{};
};

// Pointy-top honeycomb, offset rows (odd rows shifted right by half a pitch).
class HexGrid {
 public:
  static HexGrid build(int n_cols, int n_rows, double cs);

  int n_cols() const { return n_cols_; }
  int n_rows() const { return n_rows_; }
  double cs() const { return cs_; }
  double pitch() const { return std::sqrt(3.0) * cs_; }
  int num_cells() const { return static_cast<int>(cells_.size()); }
  int num_nodes() const { return static_cast<int>(nodes_.size()); }
  int num_dofs() const { return 2 * num_nodes(); }

  const HexCell& cell(int id) const;
  std::span<const HexCell> cells() const { return cells_; }
  Vec2 centroid(int id) const { return cell(id).centroid; }
  Vec2 node(int n) const;
  std::span<const Vec2> nodes() const { return nodes_; }

  // Throws std::out_of_range when (row, col) is outside the grid.
  int cell_id(int row, int col) const;
  bool contains(int row, int col) const {
    return row >= 0 && row < n_rows_ && col >= 0 && col < n_cols_;
  }

  // Six slots in cyclic order, kNoCell where the neighbor is missing.
  const std::array<int, 6>& ring(int id) const;
  std::vector<int> neighbors(int id) const;
  int neighbor_count(int id) const;
  bool is_interior(int id) const { return neighbor_count(id) == 6; }

  // Cells touching a node (1 to 3 of them), kNoCell padded.
  const std::array<int, 3>& node_cells(int n) const;
  bool is_boundary_node(int n) const;

  Box bounds() const { return bounds_; }
  std::array<Vec2, 6> cell_polygon(int id) const;

 private:
  int n_cols_ = 0;
  int n_rows_ = 0;
  double cs_ = 0.0;
  std::vector<HexCell> cells_;
  std::vector<Vec2> nodes_;
  std::vector<std::array<int, 6>> rings_;
  std::vector<std::array<int, 3>> node_cells_;
  Box bounds_;
};

// Vertex offsets of a hexagon with circumradius cs, counter-clockwise from 30 degrees.
std::array<Vec2, 6> hexagon_offsets(double cs);

}  // namespace hexmask
