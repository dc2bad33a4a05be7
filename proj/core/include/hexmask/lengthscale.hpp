#pragma once

#include <cstdint>
#include <vector>

#include "hexmask/hexgrid.hpp"
#include "hexmask/maskfield.hpp"
#include "hexmask/skeleton.hpp"

namespace hexmask {

struct LengthScaleSpec {
  double min_ls = 1.0;
  double max_ls = 2.0;
  int p = 1;

  void validate() const;
};

struct Regions {
  std::vector<std::uint8_t> r_min;  // per-cell flags
  std::vector<std::uint8_t> r_max;

  std::vector<int> min_ids() const;
  std::vector<int> max_ids() const;
};

Regions build_regions(const HexGrid& grid, const std::vector<int>& skeleton_cells, const LengthScaleSpec& spec);
Regions build_regions(const HexGrid& grid, const SkeletonResult& skeleton, const LengthScaleSpec& spec);

double g_min(const DensityField& field, const Regions& regions, const LengthScaleSpec& spec);
double g_max(const DensityField& field, const Regions& regions, const LengthScaleSpec& spec);

// d g / d rho_i with the regions held fixed.
std::vector<double> g_min_drho(const DensityField& field, const Regions& regions, const LengthScaleSpec& spec);
std::vector<double> g_max_drho(const DensityField& field, const Regions& regions, const LengthScaleSpec& spec);

struct LengthScaleGradient {
  std::vector<double> g_min;
  std::vector<double> g_max;
};
LengthScaleGradient lengthscale_gradient(const HexGrid& grid, const DensityField& field, const Regions& regions,
                                         const LengthScaleSpec& spec, const MaskSet& masks);

// Cells breaking the imposed scales: R_min cells that are void, R_max cells that are solid.
struct Violations {
  std::vector<int> min_side;
  std::vector<int> max_side;
};
Violations violations(const DensityField& field, const Regions& regions, double threshold = 0.5);

}  // namespace hexmask
