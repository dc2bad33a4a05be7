#include "hexmask/truss_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace hexmask::truss {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kTiny = 1e-12;

int members(Layout l) { return l == Layout::three_member ? 3 : 2; }

std::array<double, 3> widths_from(const TrussSpec& s, const std::vector<double>& v) {
  if (s.layout == Layout::three_member) return {v[0], v[1], v[2]};
  return {v[0], 0.0, v[1]};
}

// Smallest delta >= 0 with delta (x_m + delta)^2 = k.
double solve_shift(double x_m, double k) {
  double lo = 0.0, hi = std::max(1.0, std::cbrt(k));
  while (hi * (x_m + hi) * (x_m + hi) < k) hi *= 2.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (mid * (x_m + mid) * (x_m + mid) < k ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

void finalize(KktSolution& s) {
  const bool nonneg = s.x[0] >= 0.0 && s.x[1] >= 0.0 && s.x[2] >= 0.0;
  const bool duals = s.lambda1 >= -kTiny && s.lambda2 >= -kTiny;
  s.feasible = s.feasible && nonneg && duals;
  if (s.x[0] > 0.0 && s.x[1] + s.x[2] > 0.0) s.strain_energy = strain_energy(s.x[0], s.x[1], s.x[2]);
}

std::vector<KktSolution> three_member_p1(const TrussSpec& s) {
  std::vector<KktSolution> out;
  const double V = s.v_star, xm = s.x_m, e = s.eps1;

  KktSolution c1;
  c1.active = KktCase::I;
  c1.x = {V / 2, V / 4, V / 4};
  c1.lambda1 = 4.0 * C / (V * V);
  c1.v_lo = 3.0 * xm - e;
  c1.v_hi = kInf;
  c1.feasible = 3.0 * xm <= V + e + kTiny;
  c1.note = "x2 + x3 = V*/2; any split is optimal, the symmetric one is reported";
  out.push_back(c1);

  KktSolution c2;
  c2.active = KktCase::II;
  c2.feasible = false;
  c2.note = "rejected: stationarity gives lambda2 = -C/x1^2 < 0";
  out.push_back(c2);

  KktSolution c3;
  c3.active = KktCase::III;
  c3.x = {V / 2, V / 4, V / 4};
  c3.lambda1 = 4.0 * C / (V * V);
  c3.lambda2 = 0.0;
  c3.multipliers_unique = false;
  c3.v_lo = c3.v_hi = 3.0 * xm - e;
  c3.feasible = std::abs(V - (3.0 * xm - e)) <= kTiny * std::max(1.0, V);
  c3.note = "requires V* = 3 x_m - eps1; only lambda1 - lambda2 = 4C/V*^2 is determined";
  out.push_back(c3);
  return out;
}

std::vector<KktSolution> two_member_p1(const TrussSpec& s) {
  std::vector<KktSolution> out;
  const double V = s.v_star, xm = s.x_m, e = s.eps1;

  KktSolution c1;
  c1.active = KktCase::I;
  c1.x = {V / 2, 0.0, V / 2};
  c1.lambda1 = 4.0 * C / (V * V);
  c1.v_lo = 2.0 * xm - e;
  c1.v_hi = kInf;
  c1.feasible = 2.0 * xm <= V + e + kTiny;
  out.push_back(c1);

  KktSolution c2;
  c2.active = KktCase::II;
  c2.feasible = false;
  c2.note = "rejected: stationarity gives lambda2 = -C/x1^2 < 0";
  out.push_back(c2);

  KktSolution c3;
  c3.active = KktCase::III;
  c3.x = {V / 2, 0.0, V / 2};
  c3.lambda1 = 4.0 * C / (V * V);
  c3.multipliers_unique = false;
  c3.v_lo = c3.v_hi = 2.0 * xm - e;
  c3.feasible = std::abs(V - (2.0 * xm - e)) <= kTiny * std::max(1.0, V);
  c3.note = "requires V* = 2 x_m - eps1";
  out.push_back(c3);
  return out;
}

std::vector<KktSolution> three_member_p2(const TrussSpec& s) {
  std::vector<KktSolution> out;
  const double V = s.v_star, xm = s.x_m, e = s.eps1;

  KktSolution c1;
  c1.active = KktCase::I;
  c1.x = {V / 2, V / 4, V / 4};
  c1.lambda1 = 4.0 * C / (V * V);
  const double disc1 = 6.0 * e - 2.0 * xm * xm;
  if (disc1 >= 0.0) {
    c1.v_lo = 8.0 * xm / 3.0 - (2.0 / 3.0) * std::sqrt(disc1);
    c1.v_hi = 8.0 * xm / 3.0 + (2.0 / 3.0) * std::sqrt(disc1);
    c1.feasible = V >= c1.v_lo - kTiny && V <= c1.v_hi + kTiny;
  } else {
    c1.v_lo = kInf;
    c1.v_hi = -kInf;
    c1.feasible = false;
    c1.note = "needs eps1 > x_m^2/3";
  }
  out.push_back(c1);

  KktSolution c2;
  c2.active = KktCase::II;
  if (e > 0.0) {
    // kappa = C / (2 lambda2); widths grow as kappa grows.
    auto excess = [&](double k) {
      const double d1 = solve_shift(xm, k), d2 = solve_shift(xm, k / 4.0);
      return d1 * d1 + 2.0 * d2 * d2 - e;
    };
    double lo = 0.0, hi = 1.0;
    while (excess(hi) < 0.0) hi *= 2.0;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      (excess(mid) < 0.0 ? lo : hi) = mid;
    }
    const double k = 0.5 * (lo + hi);
    const double d1 = solve_shift(xm, k), d2 = solve_shift(xm, k / 4.0);
    c2.x = {xm + d1, xm + d2, xm + d2};
    c2.lambda2 = C / (2.0 * k);
    c2.v_lo = 3.0 * xm + d1 + 2.0 * d2;
    c2.v_hi = kInf;
    c2.feasible = V >= c2.v_lo - kTiny;
  } else {
    c2.feasible = false;
    c2.note = "needs eps1 > 0";
  }
  out.push_back(c2);

  const double ee = xm - V / 3.0;
  const double disc3 = e - 3.0 * ee * ee;
  for (double sign : {+1.0, -1.0}) {
    KktSolution c3;
    c3.active = KktCase::III;
    c3.v_lo = 3.0 * xm - std::sqrt(3.0 * e);
    c3.v_hi = 3.0 * xm + std::sqrt(3.0 * e);
    if (disc3 < 0.0) {
      c3.feasible = false;
      c3.note = "no real root: V* outside 3 x_m +- sqrt(3 eps1)";
      out.push_back(c3);
      break;
    }
    const double d = sign * std::sqrt(disc3 / 6.0);
    const double x2 = V / 3.0 + d, x1 = V - 2.0 * x2;
    c3.x = {x1, x2, x2};
    if (std::abs(d) < 1e-10 || x1 <= 0.0 || x2 <= 0.0) {
      c3.feasible = false;
      c3.note = "degenerate root";
    } else {
      c3.lambda2 = (C / (x1 * x1) - C / (4.0 * x2 * x2)) / (2.0 * (x1 - x2));
      c3.lambda1 = C / (4.0 * x2 * x2) + 2.0 * c3.lambda2 * (xm - x2);
      c3.feasible = true;
      c3.note = sign > 0 ? "x2 = V*/3 + delta3" : "x2 = V*/3 - delta3";
    }
    out.push_back(c3);
  }
  return out;
}

std::vector<KktSolution> two_member_p2(const TrussSpec& s) {
  std::vector<KktSolution> out;
  const double V = s.v_star, xm = s.x_m, e = s.eps1;

  KktSolution c1;
  c1.active = KktCase::I;
  c1.x = {V / 2, 0.0, V / 2};
  c1.lambda1 = 4.0 * C / (V * V);
  c1.v_lo = 2.0 * (xm - std::sqrt(e / 2.0));
  c1.v_hi = 2.0 * (xm + std::sqrt(e / 2.0));
  c1.feasible = V >= c1.v_lo - kTiny && V <= c1.v_hi + kTiny;
  out.push_back(c1);

  KktSolution c2;
  c2.active = KktCase::II;
  if (e > 0.0) {
    const double x = xm + std::sqrt(e / 2.0);
    c2.x = {x, 0.0, x};
    c2.lambda2 = C / (2.0 * x * x * std::sqrt(e / 2.0));
    c2.v_lo = 2.0 * x;
    c2.v_hi = kInf;
    c2.feasible = V >= c2.v_lo - kTiny;
  } else {
    c2.feasible = false;
    c2.note = "needs eps1 > 0";
  }
  out.push_back(c2);

  const double disc = 2.0 * e - (V - 2.0 * xm) * (V - 2.0 * xm);
  for (double sign : {+1.0, -1.0}) {
    KktSolution c3;
    c3.active = KktCase::III;
    c3.v_lo = 2.0 * xm - std::sqrt(2.0 * e);
    c3.v_hi = 2.0 * xm + std::sqrt(2.0 * e);
    if (disc < 0.0) {
      c3.feasible = false;
      c3.note = "no real root: V* outside 2 x_m +- sqrt(2 eps1)";
      out.push_back(c3);
      break;
    }
    const double d = sign * 0.5 * std::sqrt(disc);
    const double x3 = V / 2.0 + d, x1 = V / 2.0 - d;
    c3.x = {x1, 0.0, x3};
    if (std::abs(d) < 1e-10 || x1 <= 0.0 || x3 <= 0.0) {
      c3.feasible = false;
      c3.note = "degenerate root";
    } else {
      // lambda1 - 2 (x_m - x_i) lambda2 = C / x_i^2 for i = 1, 3.
      const double a1 = -2.0 * (xm - x1), a3 = -2.0 * (xm - x3);
      const double r1 = C / (x1 * x1), r3 = C / (x3 * x3);
      c3.lambda2 = (r1 - r3) / (a1 - a3);
      c3.lambda1 = r1 - a1 * c3.lambda2;
      c3.feasible = true;
    }
    out.push_back(c3);
  }
  return out;
}

}  // namespace

void TrussSpec::validate() const {
  if (p != 1 && p != 2) throw std::invalid_argument("truss oracle supports p = 1 or p = 2");
  if (!(v_star > 0.0)) throw std::invalid_argument("V* must be positive");
  if (!(x_m > 0.0)) throw std::invalid_argument("x_m must be positive");
  if (!(eps1 >= 0.0)) throw std::invalid_argument("eps1 must be non-negative");
}

double strain_energy(double x1, double x2, double x3) {
  if (!(x1 > 0.0) || !(x2 + x3 > 0.0)) throw std::domain_error("no load path: x1 and x2 + x3 must be positive");
  return C * (x1 + x2 + x3) / (x1 * x2 + x1 * x3);
}

std::array<double, 3> strain_energy_gradient(double x1, double x2, double x3) {
  if (!(x1 > 0.0) || !(x2 + x3 > 0.0)) throw std::domain_error("no load path: x1 and x2 + x3 must be positive");
  // SE = C / x1 + C / (x2 + x3)
  const double s = x2 + x3;
  return {-C / (x1 * x1), -C / (s * s), -C / (s * s)};
}

double length_scale_constraint(const TrussSpec& spec, const std::array<double, 3>& x) {
  double g = -spec.eps1;
  for (int i = 0; i < 3; ++i) {
    if (spec.layout == Layout::two_member && i == 1) continue;
    g += std::pow(spec.x_m - x[i], spec.p);
  }
  return g;
}

std::string to_string(KktCase c) {
  switch (c) {
    case KktCase::I: return "I";
    case KktCase::II: return "II";
    case KktCase::III: return "III";
  }
  return "?";
}

KktReport kkt_solve(const TrussSpec& spec) {
  spec.validate();
  KktReport r;
  if (spec.layout == Layout::three_member)
    r.cases = spec.p == 1 ? three_member_p1(spec) : three_member_p2(spec);
  else
    r.cases = spec.p == 1 ? two_member_p1(spec) : two_member_p2(spec);
  for (auto& c : r.cases) {
    if (c.feasible) {
      // Primal feasibility of the reported widths.
      const double vol = c.x[0] + c.x[1] + c.x[2];
      c.feasible = vol <= spec.v_star * (1.0 + 1e-9) + kTiny &&
                   length_scale_constraint(spec, c.x) <= 1e-9 * std::max(1.0, spec.eps1);
    }
    finalize(c);
  }
  for (std::size_t i = 0; i < r.cases.size(); ++i) {
    if (!r.cases[i].feasible) continue;
    if (r.best < 0 || r.cases[i].strain_energy < r.cases[r.best].strain_energy) r.best = static_cast<int>(i);
  }
  return r;
}

bool problem_feasible(const TrussSpec& spec) {
  spec.validate();
  const int n = members(spec.layout);
  const double V = spec.v_star, xm = spec.x_m;
  if (spec.p == 1) return V >= n * xm - spec.eps1;
  if (V >= n * xm) return true;
  const double gap = xm - V / n;
  return n * gap * gap <= spec.eps1;
}

CrossCheck numeric_cross_check(const TrussSpec& spec, int eval_budget) {
  spec.validate();
  const int n = members(spec.layout);
  NlpProblem prob;
  prob.dim = n;
  prob.lower.assign(n, 1e-3);
  prob.upper.assign(n, spec.v_star);
  prob.x0.assign(n, spec.v_star / (2.0 * n));
  prob.eval_budget = eval_budget;
  prob.objective = [&spec, n](std::span<const double> v, std::span<double> g) {
    const auto x = widths_from(spec, std::vector<double>(v.begin(), v.end()));
    const auto d = strain_energy_gradient(x[0], x[1], x[2]);
    if (n == 3) {
      g[0] = d[0], g[1] = d[1], g[2] = d[2];
    } else {
      g[0] = d[0], g[1] = d[2];
    }
    return strain_energy(x[0], x[1], x[2]);
  };
  prob.constraints.push_back([&spec](std::span<const double> v, std::span<double> g) {
    double s = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
      s += v[i];
      g[i] = 1.0;
    }
    return s - spec.v_star;
  });
  prob.constraints.push_back([&spec](std::span<const double> v, std::span<double> g) {
    double s = -spec.eps1;
    for (std::size_t i = 0; i < v.size(); ++i) {
      s += std::pow(spec.x_m - v[i], spec.p);
      g[i] = -spec.p * std::pow(spec.x_m - v[i], spec.p - 1);
    }
    return s;
  });
  prob.constraint_scales = {1.0, 1.0};

  NlpOptions opt;
  opt.first_order_tol = 1e-7;
  opt.feas_tol = 1e-9;

  CrossCheck cc;
  cc.numeric = minimize(prob, opt);
  const auto rep = kkt_solve(spec);
  const auto x = widths_from(spec, cc.numeric.x_star);
  cc.g2 = length_scale_constraint(spec, x);
  if (rep.any_feasible()) {
    cc.reference = rep.cases[rep.best];
    // For p = 1 only x2 + x3 is determined, so the side members are compared through their mean.
    const auto& xr = cc.reference->x;
    cc.x_error = std::max({std::abs(x[0] - xr[0]), std::abs(0.5 * (x[1] + x[2]) - 0.5 * (xr[1] + xr[2])),
                           spec.p == 2 ? std::max(std::abs(x[1] - xr[1]), std::abs(x[2] - xr[2])) : 0.0});
    cc.objective_gap = std::abs(cc.numeric.f_star - cc.reference->strain_energy);
  }
  return cc;
}

}  // namespace hexmask::truss
