#include "hexmask/hexgrid.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>
#include <unordered_map>

namespace hexmask {

namespace {

// Node positions live on an integer lattice with spacing (sqrt(3) cs / 2, cs / 2),
// which makes deduplication exact.
constexpr std::array<int, 6> kLatticeDx{1, 0, -1, -1, 0, 1};
constexpr std::array<int, 6> kLatticeDy{1, 2, 1, -1, -2, -1};

struct RowColStep {
  int dr, dc;
};

// Offsets for E, NE, NW, W, SW, SE on even and odd rows.
constexpr std::array<RowColStep, 6> kEvenSteps{{{0, 1}, {1, 0}, {1, -1}, {0, -1}, {-1, -1}, {-1, 0}}};
constexpr std::array<RowColStep, 6> kOddSteps{{{0, 1}, {1, 1}, {1, 0}, {0, -1}, {-1, 0}, {-1, 1}}};

}  // namespace

std::array<Vec2, 6> hexagon_offsets(double cs) {
  std::array<Vec2, 6> v;
  const double hx = 0.5 * std::sqrt(3.0) * cs;
  const double hy = 0.5 * cs;
  for (int k = 0; k < 6; ++k) v[k] = {kLatticeDx[k] * hx, kLatticeDy[k] * hy};
  return v;
}

HexGrid HexGrid::build(int n_cols, int n_rows, double cs) {
  if (n_cols < 1 || n_rows < 1) throw std::invalid_argument("hex grid needs at least one row and one column");
  if (!(cs > 0.0) || !std::isfinite(cs)) throw std::invalid_argument("cell size must be positive");

  HexGrid g;
  g.n_cols_ = n_cols;
  g.n_rows_ = n_rows;
  g.cs_ = cs;

  const double hx = 0.5 * std::sqrt(3.0) * cs;
  const double hy = 0.5 * cs;
  const std::size_t ncells = static_cast<std::size_t>(n_cols) * static_cast<std::size_t>(n_rows);
  g.cells_.reserve(ncells);
  g.rings_.reserve(ncells);

  std::unordered_map<long long, int> lattice;
  lattice.reserve(ncells * 2 + 8);
  const long long stride = 4LL * n_cols + 16;

  for (int r = 0; r < n_rows; ++r) {
    for (int c = 0; c < n_cols; ++c) {
      HexCell cell;
      cell.id = static_cast<int>(g.cells_.size());
      cell.row = r;
      cell.col = c;
      const int cx = 2 * c + (r & 1) + 1;
      const int cy = 3 * r + 2;
      Vec2 sum;
      for (int k = 0; k < 6; ++k) {
        const int ix = cx + kLatticeDx[k];
        const int iy = cy + kLatticeDy[k];
        const long long key = static_cast<long long>(iy) * stride + ix;
        auto [it, inserted] = lattice.try_emplace(key, g.num_nodes());
        if (inserted) {
          g.nodes_.push_back({ix * hx, iy * hy});
          g.node_cells_.push_back({kNoCell, kNoCell, kNoCell});
        }
        cell.node_ids[k] = it->second;
        sum += g.nodes_[it->second];
        auto& inc = g.node_cells_[it->second];
        for (auto& slot : inc) {
          if (slot == kNoCell) { slot = cell.id; break; }
        }
      }
      cell.centroid = sum * (1.0 / 6.0);
      g.cells_.push_back(cell);
    }
  }

  for (const auto& cell : g.cells_) {
    const auto& steps = (cell.row & 1) ? kOddSteps : kEvenSteps;
    std::array<int, 6> ring;
    for (int d = 0; d < 6; ++d) {
      const int rr = cell.row + steps[d].dr;
      const int cc = cell.col + steps[d].dc;
      ring[d] = g.contains(rr, cc) ? rr * n_cols + cc : kNoCell;
    }
    g.rings_.push_back(ring);
  }

  Box b{g.nodes_[0].x, g.nodes_[0].y, g.nodes_[0].x, g.nodes_[0].y};
  for (const auto& p : g.nodes_) {
    b.xmin = std::min(b.xmin, p.x);
    b.xmax = std::max(b.xmax, p.x);
    b.ymin = std::min(b.ymin, p.y);
    b.ymax = std::max(b.ymax, p.y);
  }
  g.bounds_ = b;
  return g;
}

const HexCell& HexGrid::cell(int id) const {
  if (id < 0 || id >= num_cells()) throw std::out_of_range("cell id " + std::to_string(id) + " out of range");
  return cells_[id];
}

Vec2 HexGrid::node(int n) const {
  if (n < 0 || n >= num_nodes()) throw std::out_of_range("node id " + std::to_string(n) + " out of range");
  return nodes_[n];
}

int HexGrid::cell_id(int row, int col) const {
  if (!contains(row, col))
    throw std::out_of_range("cell (" + std::to_string(row) + "," + std::to_string(col) + ") outside grid");
  return row * n_cols_ + col;
}

const std::array<int, 6>& HexGrid::ring(int id) const {
  if (id < 0 || id >= num_cells()) throw std::out_of_range("cell id " + std::to_string(id) + " out of range");
  return rings_[id];
}

std::vector<int> HexGrid::neighbors(int id) const {
  std::vector<int> out;
  out.reserve(6);
  for (int n : ring(id))
    if (n != kNoCell) out.push_back(n);
  return out;
}

int HexGrid::neighbor_count(int id) const {
  int k = 0;
  for (int n : ring(id)) k += (n != kNoCell);
  return k;
}

const std::array<int, 3>& HexGrid::node_cells(int n) const {
  if (n < 0 || n >= num_nodes()) throw std::out_of_range("node id " + std::to_string(n) + " out of range");
  return node_cells_[n];
}

bool HexGrid::is_boundary_node(int n) const { return node_cells(n)[2] == kNoCell; }

std::array<Vec2, 6> HexGrid::cell_polygon(int id) const {
  std::array<Vec2, 6> poly;
  const auto& c = cell(id);
  for (int k = 0; k < 6; ++k) poly[k] = nodes_[c.node_ids[k]];
  return poly;
}

}  // namespace hexmask
