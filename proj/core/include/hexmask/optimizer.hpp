#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace hexmask {

// Value plus gradient (written into grad, already sized to dim).
using NlpFunction = std::function<double(std::span<const double> x, std::span<double> grad)>;

struct NlpEvaluation {
  int index = 0;  // 1-based evaluation counter
  std::span<const double> x;
  double f = 0.0;
  std::span<const double> g;
};

struct NlpProblem {
  int dim = 0;
  NlpFunction objective;
  std::vector<NlpFunction> constraints;  // g_k(x) <= 0
  std::vector<double> lower;
  std::vector<double> upper;
  std::vector<double> x0;
  int eval_budget = 100;

  // Optional magnitudes used to normalize f and g_k (<= 0 means pick from the first evaluation).
  double objective_scale = 0.0;
  std::vector<double> constraint_scales;

  // Called before every outer iteration after the first; callbacks may change afterwards
  // (e.g. refreshed length-scale regions), so the current point is re-evaluated.
  std::function<void(std::span<const double> x)> on_outer_iteration;
  std::function<void(const NlpEvaluation&)> on_evaluation;

  void validate() const;
};

struct NlpOptions {
  double first_order_tol = 1e-6;
  double step_tol = 1e-10;
  double feas_tol = 1e-6;  // on normalized constraints
  int lbfgs_memory = 8;
  double mu0 = 10.0;
  double mu_growth = 10.0;
  double mu_max = 1e10;
  int inner_evals = 0;  // 0: derived from the budget
  int max_outer = 200;
};

enum class NlpStatus { converged, budget_exhausted, stalled };
std::string to_string(NlpStatus s);

struct NlpResult {
  std::vector<double> x_star;
  double f_star = 0.0;
  std::vector<double> constraint_values;
  std::vector<double> multipliers;  // in unscaled units: grad f + sum lambda_k grad g_k = 0 on free variables
  int evals_used = 0;
  int outer_iterations = 0;
  NlpStatus status = NlpStatus::stalled;
  bool feasible = false;
  std::string message;
};

NlpResult minimize(const NlpProblem& problem, const NlpOptions& options = {});

}  // namespace hexmask
