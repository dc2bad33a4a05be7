#pragma once

#include <vector>

#include "hexmask/hexfem.hpp"
#include "hexmask/hexgrid.hpp"
#include "hexmask/lengthscale.hpp"
#include "hexmask/maskfield.hpp"
#include "hexmask/skeleton.hpp"

namespace hexmask {

// 4 sum rho (1 - rho) / N
double bwi(const DensityField& field);

struct Polyline {
  std::vector<Vec2> points;
  std::vector<std::uint8_t> pinned;
  bool closed = false;
};

struct ProjectedDesign {
  BinaryField binary;
  DensityField field;  // rho in {0, 1}; stiffness still floored by rho_min
  std::vector<Polyline> boundary;
  double phi = 0.0;
  bool phi_evaluated = false;
};

// R_min cells forced solid, everything else thresholded.
ProjectedDesign project_with_min_ls(const DensityField& field, const Regions& regions, double threshold = 0.5);

void reevaluate(ProjectedDesign& design, Analysis& analysis, ObjectiveKind kind, double S);

// Closed solid/void interface loops over hex edges, solid on the left.
// Nodes on the grid boundary are pinned.
std::vector<Polyline> extract_boundary(const HexGrid& grid, const BinaryField& field);

// Jacobi (v[i-1] + 2 v[i] + v[i+1]) / 4 on unpinned interior vertices.
void smooth_polyline(Polyline& line, int steps);

std::vector<Polyline> smooth_boundary(const HexGrid& grid, const ProjectedDesign& design, int steps = 20);

}  // namespace hexmask
