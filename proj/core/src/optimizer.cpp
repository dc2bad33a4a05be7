#include "hexmask/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <stdexcept>

namespace hexmask {

std::string to_string(NlpStatus s) {
  switch (s) {
    case NlpStatus::converged: return "converged";
    case NlpStatus::budget_exhausted: return "budget-exhausted";
    case NlpStatus::stalled: return "stalled";
  }
  return "?";
}

void NlpProblem::validate() const {
  if (dim < 1) throw std::invalid_argument("problem dimension must be positive");
  if (!objective) throw std::invalid_argument("objective callback missing");
  for (const auto& c : constraints)
    if (!c) throw std::invalid_argument("constraint callback missing");
  if (lower.size() != static_cast<std::size_t>(dim) || upper.size() != static_cast<std::size_t>(dim) ||
      x0.size() != static_cast<std::size_t>(dim))
    throw std::invalid_argument("bounds or start point have the wrong size");
  for (int i = 0; i < dim; ++i) {
    if (!std::isfinite(lower[i]) || !std::isfinite(upper[i])) throw std::invalid_argument("bounds must be finite");
    if (lower[i] > upper[i]) throw std::invalid_argument("lower bound exceeds upper bound");
  }
  if (!constraint_scales.empty() && constraint_scales.size() != constraints.size())
    throw std::invalid_argument("constraint_scales must match the constraint count");
  if (eval_budget < 1) throw std::invalid_argument("evaluation budget must be positive");
}

namespace {

struct Point {
  std::vector<double> z;
  double F = 0.0;
  std::vector<double> dF;
  std::vector<double> G;
  std::vector<std::vector<double>> dG;
  double f_raw = 0.0;
  std::vector<double> g_raw;
};

enum class Inner { tolerance, cap, budget, failure, small_step, stalled };

class Solver {
 public:
  Solver(const NlpProblem& p, const NlpOptions& o) : P_(p), O_(o), n_(p.dim), m_(static_cast<int>(p.constraints.size())) {
    lo_ = P_.lower;
    width_.resize(n_);
    for (int i = 0; i < n_; ++i) width_[i] = P_.upper[i] - P_.lower[i];
    lambda_.assign(m_, 0.0);
    mu_ = O_.mu0;
    gs_.assign(m_, 0.0);
  }

  NlpResult run() {
    NlpResult res;
    std::vector<double> z0(n_, 0.0);
    for (int i = 0; i < n_; ++i)
      z0[i] = width_[i] > 0.0 ? std::clamp((P_.x0[i] - lo_[i]) / width_[i], 0.0, 1.0) : 0.0;

    Point cur;
    if (!evaluate(z0, cur)) return finish(res, nullptr, NlpStatus::stalled, "initial evaluation failed");

    const int cap = O_.inner_evals > 0 ? O_.inner_evals : std::max(10, P_.eval_budget / 5);
    double omega = 1e-1;
    double prev_viol = violation(cur);
    bool prev_stalled = false;
    NlpStatus status = NlpStatus::stalled;
    std::string message = "outer iteration limit";

    for (int outer = 0; outer < O_.max_outer; ++outer) {
      res.outer_iterations = outer + 1;
      if (outer > 0 && P_.on_outer_iteration) {
        P_.on_outer_iteration(to_x(cur.z));
        have_best_ = false;
        if (evals_ >= P_.eval_budget) {
          status = NlpStatus::budget_exhausted;
          message = "evaluation budget used";
          break;
        }
        Point fresh;
        if (!evaluate(cur.z, fresh)) {
          status = NlpStatus::stalled;
          message = "callback failure";
          break;
        }
        cur = std::move(fresh);
      }

      const Inner r = inner(cur, omega, cap);

      std::vector<double> grad = al_gradient(cur);
      const double pg = projected_norm(cur.z, grad);
      for (int k = 0; k < m_; ++k) lambda_[k] = std::max(0.0, lambda_[k] + mu_ * cur.G[k]);
      const double viol = violation(cur);
      double compl_gap = 0.0;
      for (int k = 0; k < m_; ++k) compl_gap = std::max(compl_gap, std::abs(std::min(-cur.G[k], lambda_[k])));

      if (viol <= O_.feas_tol && pg <= O_.first_order_tol && compl_gap <= O_.feas_tol) {
        status = NlpStatus::converged;
        message = "first-order conditions met";
        break;
      }
      if (r == Inner::budget || evals_ >= P_.eval_budget) {
        status = NlpStatus::budget_exhausted;
        message = "evaluation budget used";
        break;
      }
      if (r == Inner::failure) {
        status = NlpStatus::stalled;
        message = "callback failure";
        break;
      }
      if (r == Inner::small_step && viol <= O_.feas_tol && compl_gap <= O_.feas_tol) {
        status = NlpStatus::converged;
        message = "step below tolerance";
        break;
      }
      if (r == Inner::stalled || r == Inner::small_step) {
        if (prev_stalled && viol <= prev_viol) {
          status = NlpStatus::stalled;
          message = "no further descent possible";
          break;
        }
        prev_stalled = true;
      } else {
        prev_stalled = false;
      }
      if (viol > 0.25 * prev_viol) mu_ = std::min(mu_ * O_.mu_growth, O_.mu_max);
      prev_viol = viol;
      omega = std::max(omega * 0.1, O_.first_order_tol);
    }

    const Point* chosen = &cur;
    if (violation(cur) > O_.feas_tol && have_best_) chosen = &best_;
    return finish(res, chosen, status, message);
  }

 private:
  std::vector<double> to_x(const std::vector<double>& z) const {
    std::vector<double> x(n_);
    for (int i = 0; i < n_; ++i) x[i] = std::clamp(lo_[i] + width_[i] * z[i], P_.lower[i], P_.upper[i]);
    return x;
  }

  bool evaluate(const std::vector<double>& z, Point& out) {
    if (evals_ >= P_.eval_budget) return false;
    const std::vector<double> x = to_x(z);
    std::vector<double> grad(n_, 0.0);
    out.z = z;
    out.g_raw.assign(m_, 0.0);
    std::vector<std::vector<double>> cgrad(m_, std::vector<double>(n_, 0.0));
    try {
      out.f_raw = P_.objective(x, grad);
      for (int k = 0; k < m_; ++k) out.g_raw[k] = P_.constraints[k](x, cgrad[k]);
    } catch (const std::exception&) {
      failed_ = true;
      return false;
    }
    ++evals_;
    bool finite = std::isfinite(out.f_raw);
    for (int k = 0; k < m_; ++k) finite = finite && std::isfinite(out.g_raw[k]);
    if (!finite) {
      failed_ = true;
      return false;
    }

    if (!scaled_) {
      fs_ = P_.objective_scale > 0.0 ? P_.objective_scale : (std::abs(out.f_raw) > 1e-12 ? std::abs(out.f_raw) : 1.0);
      for (int k = 0; k < m_; ++k) {
        const double given = P_.constraint_scales.empty() ? 0.0 : P_.constraint_scales[k];
        gs_[k] = given > 0.0 ? given : std::max(1.0, std::abs(out.g_raw[k]));
      }
      scaled_ = true;
    }

    out.F = out.f_raw / fs_;
    out.dF.resize(n_);
    for (int i = 0; i < n_; ++i) out.dF[i] = grad[i] * width_[i] / fs_;
    out.G.resize(m_);
    out.dG.assign(m_, std::vector<double>(n_, 0.0));
    for (int k = 0; k < m_; ++k) {
      out.G[k] = out.g_raw[k] / gs_[k];
      for (int i = 0; i < n_; ++i) out.dG[k][i] = cgrad[k][i] * width_[i] / gs_[k];
    }

    if (P_.on_evaluation) P_.on_evaluation({evals_, x, out.f_raw, out.g_raw});
    if (violation(out) <= O_.feas_tol && (!have_best_ || out.F < best_.F)) {
      best_ = out;
      have_best_ = true;
    }
    return true;
  }

  double violation(const Point& p) const {
    double v = 0.0;
    for (double g : p.G) v = std::max(v, g);
    return v;
  }

  double al_value(const Point& p) const {
    double L = p.F;
    for (int k = 0; k < m_; ++k) {
      const double t = std::max(0.0, lambda_[k] + mu_ * p.G[k]);
      L += (t * t - lambda_[k] * lambda_[k]) / (2.0 * mu_);
    }
    return L;
  }

  std::vector<double> al_gradient(const Point& p) const {
    std::vector<double> g = p.dF;
    for (int k = 0; k < m_; ++k) {
      const double t = std::max(0.0, lambda_[k] + mu_ * p.G[k]);
      if (t == 0.0) continue;
      for (int i = 0; i < n_; ++i) g[i] += t * p.dG[k][i];
    }
    for (int i = 0; i < n_; ++i)
      if (width_[i] <= 0.0) g[i] = 0.0;
    return g;
  }

  double projected_norm(const std::vector<double>& z, const std::vector<double>& g) const {
    double r = 0.0;
    for (int i = 0; i < n_; ++i) {
      if (width_[i] <= 0.0) continue;
      r = std::max(r, std::abs(z[i] - std::clamp(z[i] - g[i], 0.0, 1.0)));
    }
    return r;
  }

  Inner inner(Point& cur, double omega, int cap) {
    std::deque<std::pair<std::vector<double>, std::vector<double>>> mem;
    int used = 0;
    std::vector<double> g = al_gradient(cur);
    double L = al_value(cur);
    for (;;) {
      if (projected_norm(cur.z, g) <= omega) return Inner::tolerance;
      if (used >= cap) return Inner::cap;
      if (evals_ >= P_.eval_budget) return Inner::budget;

      std::vector<char> free(n_, 1);
      for (int i = 0; i < n_; ++i) {
        if (width_[i] <= 0.0) free[i] = 0;
        else if (cur.z[i] <= 0.0 && g[i] > 0.0) free[i] = 0;
        else if (cur.z[i] >= 1.0 && g[i] < 0.0) free[i] = 0;
      }
      auto fdot = [&](const std::vector<double>& a, const std::vector<double>& b) {
        double s = 0.0;
        for (int i = 0; i < n_; ++i)
          if (free[i]) s += a[i] * b[i];
        return s;
      };

      std::vector<double> d = lbfgs_direction(mem, g, free, fdot);
      double gd = fdot(g, d);
      double dnorm = 0.0, gnorm = 0.0;
      for (int i = 0; i < n_; ++i) {
        dnorm = std::max(dnorm, std::abs(d[i]));
        gnorm = std::max(gnorm, free[i] ? std::abs(g[i]) : 0.0);
      }
      if (!(gd < 0.0) || dnorm == 0.0) {
        mem.clear();
        for (int i = 0; i < n_; ++i) d[i] = free[i] ? -g[i] : 0.0;
        gd = fdot(g, d);
        dnorm = gnorm;
        if (dnorm == 0.0) return Inner::tolerance;
      }

      double t = mem.empty() ? std::min(1.0, 0.2 / dnorm) : 1.0;
      bool accepted = false, tiny = false;
      Point trial;
      for (int ls = 0; ls < 30; ++ls) {
        std::vector<double> zt(n_);
        double smax = 0.0, gs = 0.0;
        for (int i = 0; i < n_; ++i) {
          zt[i] = std::clamp(cur.z[i] + t * d[i], 0.0, 1.0);
          const double s = zt[i] - cur.z[i];
          smax = std::max(smax, std::abs(s));
          gs += g[i] * s;
        }
        if (smax < O_.step_tol) {
          tiny = true;
          break;
        }
        if (evals_ >= P_.eval_budget) return Inner::budget;
        if (!evaluate(zt, trial)) return failed_ ? Inner::failure : Inner::budget;
        ++used;
        const double Lt = al_value(trial);
        if (Lt <= L + 1e-4 * gs) {
          accepted = true;
          break;
        }
        // Safeguarded quadratic backtrack along the (unprojected) direction.
        const double slope = gd * t;
        const double denom = 2.0 * (Lt - L - slope);
        double tn = denom > 0.0 ? -slope * t / denom : 0.5 * t;
        t = std::clamp(tn, 0.1 * t, 0.5 * t);
      }
      if (!accepted) {
        if (!mem.empty()) {
          mem.clear();
          continue;
        }
        return tiny ? Inner::small_step : Inner::stalled;
      }

      std::vector<double> gt = al_gradient(trial);
      std::vector<double> s(n_), y(n_);
      double sy = 0.0, ss = 0.0, yy = 0.0;
      for (int i = 0; i < n_; ++i) {
        s[i] = trial.z[i] - cur.z[i];
        y[i] = gt[i] - g[i];
        sy += s[i] * y[i];
        ss += s[i] * s[i];
        yy += y[i] * y[i];
      }
      if (sy > 1e-10 * std::sqrt(ss * yy)) {
        mem.emplace_back(std::move(s), std::move(y));
        if (static_cast<int>(mem.size()) > O_.lbfgs_memory) mem.pop_front();
      }
      cur = std::move(trial);
      g = std::move(gt);
      L = al_value(cur);
    }
  }

  template <class Dot>
  std::vector<double> lbfgs_direction(const std::deque<std::pair<std::vector<double>, std::vector<double>>>& mem,
                                      const std::vector<double>& g, const std::vector<char>& free, Dot fdot) const {
    std::vector<double> q(n_);
    for (int i = 0; i < n_; ++i) q[i] = free[i] ? g[i] : 0.0;
    const int k = static_cast<int>(mem.size());
    std::vector<double> alpha(k), rho(k);
    for (int j = k - 1; j >= 0; --j) {
      const auto& [s, y] = mem[j];
      const double sy = fdot(s, y);
      rho[j] = sy > 0.0 ? 1.0 / sy : 0.0;
      alpha[j] = rho[j] * fdot(s, q);
      for (int i = 0; i < n_; ++i)
        if (free[i]) q[i] -= alpha[j] * y[i];
    }
    double gamma = 1.0;
    if (k > 0) {
      const auto& [s, y] = mem.back();
      const double yy = fdot(y, y);
      const double sy = fdot(s, y);
      if (yy > 0.0 && sy > 0.0) gamma = sy / yy;
    }
    for (double& v : q) v *= gamma;
    for (int j = 0; j < k; ++j) {
      const auto& [s, y] = mem[j];
      const double b = rho[j] * fdot(y, q);
      for (int i = 0; i < n_; ++i)
        if (free[i]) q[i] += (alpha[j] - b) * s[i];
    }
    for (int i = 0; i < n_; ++i) q[i] = free[i] ? -q[i] : 0.0;
    return q;
  }

  NlpResult& finish(NlpResult& res, const Point* p, NlpStatus status, std::string message) {
    res.status = status;
    res.message = std::move(message);
    res.evals_used = evals_;
    if (!p) {
      res.x_star.resize(n_);
      for (int i = 0; i < n_; ++i) res.x_star[i] = std::clamp(P_.x0[i], P_.lower[i], P_.upper[i]);
      return res;
    }
    res.x_star = to_x(p->z);
    res.f_star = p->f_raw;
    res.constraint_values = p->g_raw;
    res.feasible = violation(*p) <= O_.feas_tol;
    res.multipliers.resize(m_);
    for (int k = 0; k < m_; ++k) res.multipliers[k] = lambda_[k] * fs_ / gs_[k];
    if (res.status == NlpStatus::converged && !res.feasible) res.status = NlpStatus::stalled;
    return res;
  }

  const NlpProblem& P_;
  const NlpOptions& O_;
  int n_, m_;
  std::vector<double> lo_, width_;
  std::vector<double> lambda_;
  double mu_ = 10.0;
  double fs_ = 1.0;
  std::vector<double> gs_;
  bool scaled_ = false;
  int evals_ = 0;
  bool failed_ = false;
  bool have_best_ = false;
  Point best_;
};

}  // namespace

NlpResult minimize(const NlpProblem& problem, const NlpOptions& options) {
  problem.validate();
  Solver s(problem, options);
  return s.run();
}

}  // namespace hexmask
