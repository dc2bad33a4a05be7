#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "hexmask/hexgrid.hpp"

namespace hexmask {

inline constexpr double kDefaultRhoMin = 1e-3;
inline constexpr double kMaxSemiAxis = 10.0;  // mR
inline constexpr double kPositiveMinAxis = 1e-2;

struct EllipticalMask {
  double x = 0.0;
  double y = 0.0;
  double a = 1.0;
  double b = 1.0;
  double theta = 0.0;
};

enum class Polarity { negative, positive };
enum class MaskShape { elliptical, circular };

std::string to_string(Polarity p);
Polarity parse_polarity(const std::string& s);

struct MaskSet {
  std::vector<EllipticalMask> masks;
  Polarity polarity = Polarity::negative;
  MaskShape shape = MaskShape::elliptical;
  double alpha = 6.0;
  double eta = 3.0;

  std::size_t size() const { return masks.size(); }
  // Throws std::invalid_argument on alpha <= 0, eta < 1 or non-positive axes.
  void validate() const;
};

struct DensityField {
  std::vector<double> rho;
  double rho_min = kDefaultRhoMin;

  std::size_t size() const { return rho.size(); }
  double stiffness_factor(std::size_t i) const { return rho_min + rho[i] * (1.0 - rho_min); }
  double volume() const;
};

// Overflow-free 1 / (1 + exp(-t)).
double logistic(double t);
// log of the logistic, accurate for large |t|.
double log_logistic(double t);

double signed_measure(const EllipticalMask& m, Vec2 p);

struct MeasurePartials {
  double d = 0.0;
  // d(d)/d{x, y, a, b, theta}
  std::array<double, 5> grad{};
};
MeasurePartials signed_measure_partials(const EllipticalMask& m, Vec2 p, MaskShape shape = MaskShape::elliptical);

double density_negative(const MaskSet& masks, Vec2 p);
double density_positive(const MaskSet& masks, Vec2 p);
double density(const MaskSet& masks, Vec2 p);

// d rho(p) / d{x_j, y_j, a_j, b_j, theta_j}. For circular masks the a-slot carries the
// radius derivative and the b and theta slots are zero.
std::array<double, 5> density_gradient(const MaskSet& masks, Vec2 p, std::size_t j);

DensityField evaluate_field(const HexGrid& grid, const MaskSet& masks, double rho_min = kDefaultRhoMin);

// Chain rule: given dPhi/drho_i per cell, returns dPhi/dpsi in packed design order.
std::vector<double> pullback(const HexGrid& grid, const MaskSet& masks, std::span<const double> dphi_drho);

// Design vector packing: 5 entries per elliptical mask (x, y, a, b, theta),
// 3 per circular mask (x, y, r).
int vars_per_mask(MaskShape shape);
std::vector<double> pack_design(const MaskSet& masks);
void unpack_design(std::span<const double> psi, MaskSet& masks);

struct DesignBounds {
  std::vector<double> lower;
  std::vector<double> upper;
};
DesignBounds design_bounds(const MaskSet& masks, const Box& domain, double min_axis, double max_axis = kMaxSemiAxis);

// Lower semi-axis bound used by the optimizer: min_ls for negative masks, 1e-2 for positive.
double default_min_axis(Polarity p, double min_ls);

int masks_along(double length);
MaskSet even_layout(const Box& domain, int nx, int ny, Polarity polarity, MaskShape shape, double alpha, double eta,
                    double initial_axis);

double wrap_angle(double theta);

}  // namespace hexmask
