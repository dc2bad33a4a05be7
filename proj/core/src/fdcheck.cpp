#include "hexmask/fdcheck.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace hexmask {

namespace {

FdEntry compare(const std::string& name, const std::vector<double>& a, const std::vector<double>& fd) {
  FdEntry e;
  e.name = name;
  double scale = 0.0;
  for (double v : fd) scale = std::max(scale, std::abs(v));
  const double floor = std::max(1e-3 * scale, 1e-300);
  for (std::size_t k = 0; k < fd.size(); ++k) {
    const double err = std::abs(a[k] - fd[k]) / std::max(std::abs(fd[k]), floor);
    if (err > e.max_rel_error || e.worst_index < 0) {
      e.max_rel_error = err;
      e.worst_index = static_cast<int>(k);
      e.analytic = a[k];
      e.numeric = fd[k];
    }
  }
  return e;
}

}  // namespace

std::vector<FdEntry> fd_check(Analysis& an, const MaskSet& masks, ObjectiveKind kind, double S, const Regions* regions,
                              const LengthScaleSpec* spec, double rho_min, double h) {
  const HexGrid& grid = an.grid();
  const auto psi0 = pack_design(masks);
  const std::size_t n = psi0.size();

  std::vector<std::pair<std::string, std::function<double(const DensityField&)>>> scalars;
  scalars.emplace_back("volume", [](const DensityField& f) { return f.volume(); });
  if (regions && spec) {
    scalars.emplace_back("g_min", [&](const DensityField& f) { return g_min(f, *regions, *spec); });
    scalars.emplace_back("g_max", [&](const DensityField& f) { return g_max(f, *regions, *spec); });
  }

  // analytic
  const auto og = objective_and_gradient(an, masks, kind, S, rho_min);
  std::vector<std::vector<double>> analytic;
  analytic.push_back(og.grad);
  analytic.push_back(pullback(grid, masks, std::vector<double>(grid.num_cells(), 1.0)));
  if (regions && spec) {
    analytic.push_back(pullback(grid, masks, g_min_drho(og.field, *regions, *spec)));
    analytic.push_back(pullback(grid, masks, g_max_drho(og.field, *regions, *spec)));
  }

  std::vector<std::vector<double>> fd(analytic.size(), std::vector<double>(n, 0.0));
  MaskSet work = masks;
  auto eval_all = [&](const std::vector<double>& psi, std::vector<double>& out) {
    unpack_design(psi, work);
    const DensityField f = evaluate_field(grid, work, rho_min);
    out.clear();
    out.push_back(an.objective(f, kind, S).phi);
    for (auto& s : scalars) out.push_back(s.second(f));
  };
  std::vector<double> fp, fm, fp2, fm2;
  for (std::size_t k = 0; k < n; ++k) {
    const double step = h * std::max(1.0, std::abs(psi0[k]));
    auto at = [&](double t, std::vector<double>& out) {
      auto q = psi0;
      q[k] += t;
      eval_all(q, out);
    };
    at(step, fp);
    at(-step, fm);
    at(2 * step, fp2);
    at(-2 * step, fm2);
    // fourth-order stencil
    for (std::size_t q = 0; q < fd.size(); ++q)
      fd[q][k] = (8.0 * (fp[q] - fm[q]) - (fp2[q] - fm2[q])) / (12.0 * step);
  }

  std::vector<FdEntry> out;
  out.push_back(compare("objective", analytic[0], fd[0]));
  for (std::size_t q = 0; q < scalars.size(); ++q) out.push_back(compare(scalars[q].first, analytic[q + 1], fd[q + 1]));
  return out;
}

}  // namespace hexmask
