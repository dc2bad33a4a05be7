#include "hexmask/lengthscale.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hexmask {

void LengthScaleSpec::validate() const {
  if (!(min_ls > 0.0)) throw std::invalid_argument("min_ls must be positive");
  if (max_ls < min_ls) throw std::invalid_argument("max_ls must not be smaller than min_ls");
  if (p < 1) throw std::invalid_argument("length-scale exponent p must be >= 1");
}

std::vector<int> Regions::min_ids() const {
  std::vector<int> out;
  for (std::size_t i = 0; i < r_min.size(); ++i)
    if (r_min[i]) out.push_back(static_cast<int>(i));
  return out;
}

std::vector<int> Regions::max_ids() const {
  std::vector<int> out;
  for (std::size_t i = 0; i < r_max.size(); ++i)
    if (r_max[i]) out.push_back(static_cast<int>(i));
  return out;
}

Regions build_regions(const HexGrid& grid, const std::vector<int>& skeleton_cells, const LengthScaleSpec& spec) {
  spec.validate();
  const int n = grid.num_cells();
  Regions r;
  r.r_min.assign(n, 0);
  r.r_max.assign(n, 1);
  if (skeleton_cells.empty()) return r;

  // Bucket skeleton centroids on a coarse grid of width max_ls.
  const Box box = grid.bounds();
  const double tol = 1e-9 * grid.cs();
  const double h = spec.max_ls + 2.0 * tol;
  const int bx = std::max(1, static_cast<int>(std::ceil(box.width() / h)) + 1);
  const int by = std::max(1, static_cast<int>(std::ceil(box.height() / h)) + 1);
  std::vector<std::vector<Vec2>> buckets(static_cast<std::size_t>(bx) * by);
  auto bucket_of = [&](Vec2 p, int& ix, int& iy) {
    ix = std::clamp(static_cast<int>((p.x - box.xmin) / h), 0, bx - 1);
    iy = std::clamp(static_cast<int>((p.y - box.ymin) / h), 0, by - 1);
  };
  for (int s : skeleton_cells) {
    int ix, iy;
    const Vec2 c = grid.centroid(s);
    bucket_of(c, ix, iy);
    buckets[static_cast<std::size_t>(iy) * bx + ix].push_back(c);
  }

  const double rmin2 = (spec.min_ls + tol) * (spec.min_ls + tol);
  const double rmax2 = (spec.max_ls + tol) * (spec.max_ls + tol);
  for (int i = 0; i < n; ++i) {
    const Vec2 c = grid.centroid(i);
    int ix, iy;
    bucket_of(c, ix, iy);
    double best = INFINITY;
    for (int jy = std::max(0, iy - 1); jy <= std::min(by - 1, iy + 1); ++jy)
      for (int jx = std::max(0, ix - 1); jx <= std::min(bx - 1, ix + 1); ++jx)
        for (const Vec2& s : buckets[static_cast<std::size_t>(jy) * bx + jx]) {
          const Vec2 d = c - s;
          best = std::min(best, d.dot(d));
        }
    r.r_min[i] = best <= rmin2;
    r.r_max[i] = best > rmax2;
  }
  return r;
}

Regions build_regions(const HexGrid& grid, const SkeletonResult& skeleton, const LengthScaleSpec& spec) {
  return build_regions(grid, skeleton.skeleton_cells, spec);
}

namespace {

double clamped_pow(double v, int p) { return v <= 0.0 ? 0.0 : std::pow(v, p); }

void check_sizes(const DensityField& field, const Regions& r) {
  if (field.size() != r.r_min.size() || field.size() != r.r_max.size())
    throw std::invalid_argument("density field and regions have different sizes");
}

}  // namespace

double g_min(const DensityField& field, const Regions& regions, const LengthScaleSpec& spec) {
  check_sizes(field, regions);
  double s = 0.0;
  for (std::size_t i = 0; i < field.size(); ++i)
    if (regions.r_min[i]) s += clamped_pow(1.0 - field.rho[i], spec.p);
  return s;
}

double g_max(const DensityField& field, const Regions& regions, const LengthScaleSpec& spec) {
  check_sizes(field, regions);
  double s = 0.0;
  for (std::size_t i = 0; i < field.size(); ++i)
    if (regions.r_max[i]) s += clamped_pow(field.rho[i] - field.rho_min, spec.p);
  return s;
}

std::vector<double> g_min_drho(const DensityField& field, const Regions& regions, const LengthScaleSpec& spec) {
  check_sizes(field, regions);
  std::vector<double> d(field.size(), 0.0);
  for (std::size_t i = 0; i < field.size(); ++i) {
    if (!regions.r_min[i]) continue;
    const double v = 1.0 - field.rho[i];
    if (v <= 0.0) continue;
    d[i] = -spec.p * std::pow(v, spec.p - 1);
  }
  return d;
}

std::vector<double> g_max_drho(const DensityField& field, const Regions& regions, const LengthScaleSpec& spec) {
  check_sizes(field, regions);
  std::vector<double> d(field.size(), 0.0);
  for (std::size_t i = 0; i < field.size(); ++i) {
    if (!regions.r_max[i]) continue;
    const double v = field.rho[i] - field.rho_min;
    if (v <= 0.0) continue;
    d[i] = spec.p * std::pow(v, spec.p - 1);
  }
  return d;
}

LengthScaleGradient lengthscale_gradient(const HexGrid& grid, const DensityField& field, const Regions& regions,
                                         const LengthScaleSpec& spec, const MaskSet& masks) {
  LengthScaleGradient g;
  g.g_min = pullback(grid, masks, g_min_drho(field, regions, spec));
  g.g_max = pullback(grid, masks, g_max_drho(field, regions, spec));
  return g;
}

Violations violations(const DensityField& field, const Regions& regions, double threshold) {
  check_sizes(field, regions);
  Violations v;
  for (std::size_t i = 0; i < field.size(); ++i) {
    if (regions.r_min[i] && field.rho[i] < threshold) v.min_side.push_back(static_cast<int>(i));
    if (regions.r_max[i] && field.rho[i] > threshold) v.max_side.push_back(static_cast<int>(i));
  }
  return v;
}

}  // namespace hexmask
