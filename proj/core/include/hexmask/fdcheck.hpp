#pragma once

#include <string>
#include <vector>

#include "hexmask/hexfem.hpp"
#include "hexmask/lengthscale.hpp"
#include "hexmask/maskfield.hpp"

namespace hexmask {

struct FdEntry {
  std::string name;
  double max_rel_error = 0.0;
  int worst_index = -1;
  double analytic = 0.0;  // at worst_index
  double numeric = 0.0;
};

// Fourth-order central differences on every packed design variable, step h * max(1, |psi_k|).
// Error per component: |analytic - fd| / max(|fd|, 1e-3 * max_k |fd_k|).
// Length-scale terms use the given regions held fixed.
std::vector<FdEntry> fd_check(Analysis& analysis, const MaskSet& masks, ObjectiveKind kind, double S,
                              const Regions* regions = nullptr, const LengthScaleSpec* spec = nullptr,
                              double rho_min = kDefaultRhoMin, double h = 1e-4);

}  // namespace hexmask
