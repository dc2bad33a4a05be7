#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "hexmask/optimizer.hpp"

namespace hexmask::truss {

// Load/geometry constant of the three-bar example.
inline const double C = 1.0 / (2.0 * 1.4142135623730951);

enum class Layout { three_member, two_member };

struct TrussSpec {
  int p = 2;
  double v_star = 2.0;
  double x_m = 0.5;
  double eps1 = 0.5;
  Layout layout = Layout::three_member;

  void validate() const;
};

// SE = C (x1 + x2 + x3) / (x1 x2 + x1 x3). Throws std::domain_error without a load path.
double strain_energy(double x1, double x2, double x3);
std::array<double, 3> strain_energy_gradient(double x1, double x2, double x3);

// g2 = sum over members of (x_m - x_i)^p - eps1 (members of the layout only).
double length_scale_constraint(const TrussSpec& spec, const std::array<double, 3>& x);

enum class KktCase { I, II, III };
std::string to_string(KktCase c);

struct KktSolution {
  KktCase active = KktCase::I;
  std::array<double, 3> x{};
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  bool feasible = false;
  bool multipliers_unique = true;
  double strain_energy = 0.0;
  // V* interval on which this case yields a feasible point (when the case applies).
  double v_lo = 0.0;
  double v_hi = 0.0;
  std::string note;
};

struct KktReport {
  std::vector<KktSolution> cases;
  int best = -1;  // index of the feasible case with least SE, or -1
  bool any_feasible() const { return best >= 0; }
};

KktReport kkt_solve(const TrussSpec& spec);

// Exact feasibility of {x >= 0, sum x <= V*, g2 <= 0}.
bool problem_feasible(const TrussSpec& spec);

struct CrossCheck {
  NlpResult numeric;
  std::optional<KktSolution> reference;
  double x_error = 0.0;
  double objective_gap = 0.0;
  double g2 = 0.0;
};

CrossCheck numeric_cross_check(const TrussSpec& spec, int eval_budget = 4000);

}  // namespace hexmask::truss
