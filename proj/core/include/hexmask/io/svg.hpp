#pragma once

#include <string>
#include <vector>

#include "hexmask/hexgrid.hpp"
#include "hexmask/lengthscale.hpp"
#include "hexmask/maskfield.hpp"
#include "hexmask/postproc.hpp"

namespace hexmask::io {

struct SvgLayers {
  const MaskSet* masks = nullptr;
  const std::vector<int>* skeleton = nullptr;
  // Violation markers: blue squares on void R_min cells, red circles on solid R_max cells.
  const Regions* regions = nullptr;
  const std::vector<Polyline>* boundary = nullptr;
  // Inset circles of radius min_ls and max_ls in the top-right corner.
  const LengthScaleSpec* spec = nullptr;
  std::string title;
  double px_per_unit = 10.0;
};

// SVG 1.1, one hexagon per cell filled with gray level 1 - rho. Output depends only on the inputs.
std::string render_svg(const HexGrid& grid, const DensityField& field, const SvgLayers& layers = {});

}  // namespace hexmask::io
