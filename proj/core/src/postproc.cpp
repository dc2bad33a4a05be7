#include "hexmask/postproc.hpp"

#include <stdexcept>
#include <unordered_map>

namespace hexmask {

double bwi(const DensityField& field) {
  if (field.size() == 0) return 0.0;
  double s = 0.0;
  for (double r : field.rho) s += r * (1.0 - r);
  return 4.0 * s / static_cast<double>(field.size());
}

ProjectedDesign project_with_min_ls(const DensityField& field, const Regions& regions, double threshold) {
  if (regions.r_min.size() != field.size()) throw std::invalid_argument("regions and field sizes differ");
  ProjectedDesign d;
  d.binary.filled.resize(field.size());
  d.field.rho_min = field.rho_min;
  d.field.rho.resize(field.size());
  for (std::size_t i = 0; i < field.size(); ++i) {
    const bool solid = regions.r_min[i] || field.rho[i] > threshold;
    d.binary.filled[i] = solid;
    d.field.rho[i] = solid ? 1.0 : 0.0;
  }
  return d;
}

void reevaluate(ProjectedDesign& design, Analysis& analysis, ObjectiveKind kind, double S) {
  design.phi = analysis.objective(design.field, kind, S).phi;
  design.phi_evaluated = true;
}

std::vector<Polyline> extract_boundary(const HexGrid& grid, const BinaryField& field) {
  if (field.size() != static_cast<std::size_t>(grid.num_cells())) throw std::invalid_argument("field size mismatch");
  // At most one outgoing interface edge leaves any node.
  std::unordered_map<int, int> next;
  std::vector<int> starts;
  for (int c = 0; c < grid.num_cells(); ++c) {
    if (!field.filled[c]) continue;
    const auto& ring = grid.ring(c);
    const auto& nodes = grid.cell(c).node_ids;
    for (int d = 0; d < 6; ++d) {
      const int nb = ring[d];
      if (nb != kNoCell && field.filled[nb]) continue;
      const int from = nodes[(d + 5) % 6], to = nodes[d];
      next[from] = to;
      starts.push_back(from);
    }
  }
  std::vector<Polyline> loops;
  std::unordered_map<int, bool> used;
  for (int s : starts) {
    if (used[s]) continue;
    Polyline pl;
    pl.closed = true;
    int v = s;
    do {
      used[v] = true;
      pl.points.push_back(grid.node(v));
      pl.pinned.push_back(grid.is_boundary_node(v));
      v = next.at(v);
    } while (v != s);
    loops.push_back(std::move(pl));
  }
  return loops;
}

void smooth_polyline(Polyline& line, int steps) {
  const std::size_t n = line.points.size();
  if (line.pinned.size() != n) line.pinned.resize(n, 0);
  if (n < 3) return;
  std::vector<Vec2> tmp(n);
  for (int s = 0; s < steps; ++s) {
    for (std::size_t i = 0; i < n; ++i) {
      const bool end = !line.closed && (i == 0 || i + 1 == n);
      if (end || line.pinned[i]) {
        tmp[i] = line.points[i];
        continue;
      }
      const Vec2 a = line.points[(i + n - 1) % n], b = line.points[(i + 1) % n];
      tmp[i] = (a + line.points[i] * 2.0 + b) * 0.25;
    }
    line.points.swap(tmp);
  }
}

std::vector<Polyline> smooth_boundary(const HexGrid& grid, const ProjectedDesign& design, int steps) {
  auto loops = extract_boundary(grid, design.binary);
  for (auto& l : loops) smooth_polyline(l, steps);
  return loops;
}

}  // namespace hexmask
