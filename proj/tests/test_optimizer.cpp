#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "hexmask/optimizer.hpp"

using namespace hexmask;

namespace {

// f = sum w_i (x_i - c_i)^2 + 0.1 sum x_i x_{i+1}
NlpProblem quadratic(int n) {
  NlpProblem p;
  p.dim = n;
  p.lower.assign(n, -10.0);
  p.upper.assign(n, 10.0);
  p.x0.assign(n, 0.0);
  p.eval_budget = 500;
  p.objective = [n](std::span<const double> x, std::span<double> g) {
    double f = 0.0;
    for (int i = 0; i < n; ++i) {
      const double w = 1.0 + i, c = 1.0 - 0.5 * i;
      f += w * (x[i] - c) * (x[i] - c);
      g[i] = 2.0 * w * (x[i] - c);
    }
    for (int i = 0; i + 1 < n; ++i) {
      f += 0.1 * x[i] * x[i + 1];
      g[i] += 0.1 * x[i + 1];
      g[i + 1] += 0.1 * x[i];
    }
    return f;
  };
  return p;
}

}  // namespace

TEST_SUITE("optimizer") {

TEST_CASE("unconstrained quadratic reaches the analytic minimizer") {
  const int n = 5;
  const auto p = quadratic(n);
  // The default first-order tolerance stops about 1e-7 away; tighten it for the 1e-8 check.
  NlpOptions opt;
  opt.first_order_tol = 1e-9;
  const auto r = minimize(p, opt);
  CHECK(r.status == NlpStatus::converged);
  // Stationarity of the quadratic is a tridiagonal system; check the residual directly.
  std::vector<double> g(n);
  p.objective(r.x_star, g);
  for (double v : g) CHECK(std::abs(v) < 1e-8);
  // Reference solution by Gauss-Seidel on the same system.
  std::vector<double> x(n, 0.0);
  for (int it = 0; it < 2000; ++it)
    for (int i = 0; i < n; ++i) {
      const double w = 1.0 + i, c = 1.0 - 0.5 * i;
      double off = 0.0;
      if (i > 0) off += 0.1 * x[i - 1];
      if (i + 1 < n) off += 0.1 * x[i + 1];
      x[i] = (2.0 * w * c - off) / (2.0 * w);
    }
  for (int i = 0; i < n; ++i) CHECK(r.x_star[i] == doctest::Approx(x[i]).epsilon(1e-8).scale(1.0));
}

TEST_CASE("active bounds") {
  auto p = quadratic(3);
  p.upper = {0.5, 10.0, 10.0};
  p.lower = {-10.0, -10.0, 0.2};
  const auto r = minimize(p);
  CHECK(r.x_star[0] == doctest::Approx(0.5));
  CHECK(r.x_star[2] == doctest::Approx(0.2));
}

TEST_CASE("linear constraint with a known multiplier") {
  // min x^2 + y^2 s.t. 1 - x - y <= 0: x = y = 1/2, lambda = 1.
  NlpProblem p;
  p.dim = 2;
  p.lower = {-5, -5};
  p.upper = {5, 5};
  p.x0 = {2, -1};
  p.eval_budget = 1000;
  p.objective = [](std::span<const double> x, std::span<double> g) {
    g[0] = 2 * x[0];
    g[1] = 2 * x[1];
    return x[0] * x[0] + x[1] * x[1];
  };
  p.constraints.push_back([](std::span<const double> x, std::span<double> g) {
    g[0] = -1;
    g[1] = -1;
    return 1 - x[0] - x[1];
  });
  const auto r = minimize(p);
  CHECK(r.feasible);
  CHECK(r.x_star[0] == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(r.x_star[1] == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(r.multipliers[0] == doctest::Approx(1.0).epsilon(1e-4));
}

TEST_CASE("infeasible problem is reported as such") {
  NlpProblem p;
  p.dim = 1;
  p.lower = {0};
  p.upper = {1};
  p.x0 = {0.5};
  p.eval_budget = 300;
  p.objective = [](std::span<const double> x, std::span<double> g) {
    g[0] = 1;
    return x[0];
  };
  p.constraints.push_back([](std::span<const double> x, std::span<double> g) {
    g[0] = -1;
    return 2 - x[0];
  });
  const auto r = minimize(p);
  CHECK_FALSE(r.feasible);
  CHECK(r.status != NlpStatus::converged);
  CHECK(r.constraint_values[0] > 0.0);
  CHECK(r.x_star[0] == doctest::Approx(1.0));
}

TEST_CASE("iterates stay in the box and the budget holds") {
  auto p = quadratic(4);
  p.lower.assign(4, -0.3);
  p.upper.assign(4, 0.3);
  p.eval_budget = 17;
  int seen = 0;
  bool inside = true;
  p.on_evaluation = [&](const NlpEvaluation& e) {
    ++seen;
    for (int i = 0; i < 4; ++i) inside = inside && e.x[i] >= -0.3 && e.x[i] <= 0.3;
  };
  const auto r = minimize(p);
  CHECK(inside);
  CHECK(r.evals_used <= 17);
  CHECK(seen == r.evals_used);
}

TEST_CASE("descent without constraints") {
  auto p = quadratic(5);
  std::vector<double> g(5);
  const double f0 = p.objective(p.x0, g);
  for (int budget : {2, 5, 10, 40}) {
    p.eval_budget = budget;
    CHECK(minimize(p).f_star <= f0 + 1e-12);
  }
}

TEST_CASE("deterministic") {
  auto p = quadratic(5);
  p.eval_budget = 30;
  const auto a = minimize(p), b = minimize(p);
  CHECK(a.x_star == b.x_star);
  CHECK(a.evals_used == b.evals_used);
}

TEST_CASE("callback failure stops the run") {
  auto p = quadratic(3);
  int calls = 0;
  auto inner = p.objective;
  p.objective = [&](std::span<const double> x, std::span<double> g) {
    if (++calls > 4) throw std::runtime_error("singular");
    return inner(x, g);
  };
  const auto r = minimize(p);
  CHECK(r.status == NlpStatus::stalled);
  for (int i = 0; i < 3; ++i) CHECK((r.x_star[i] >= -10.0 && r.x_star[i] <= 10.0));
}

TEST_CASE("outer hook sees every outer iteration") {
  NlpProblem p;
  p.dim = 2;
  p.lower = {-5, -5};
  p.upper = {5, 5};
  p.x0 = {2, -1};
  p.eval_budget = 400;
  p.objective = [](std::span<const double> x, std::span<double> g) {
    g[0] = 2 * x[0];
    g[1] = 2 * x[1];
    return x[0] * x[0] + x[1] * x[1];
  };
  p.constraints.push_back([](std::span<const double> x, std::span<double> g) {
    g[0] = -1;
    g[1] = -1;
    return 1 - x[0] - x[1];
  });
  int hooks = 0;
  p.on_outer_iteration = [&](std::span<const double>) { ++hooks; };
  const auto r = minimize(p);
  CHECK(hooks == r.outer_iterations - 1);
}

TEST_CASE("validation") {
  auto p = quadratic(2);
  p.lower = {1, 0};
  p.upper = {0, 1};
  CHECK_THROWS_AS(minimize(p), std::invalid_argument);
  p = quadratic(2);
  p.upper[0] = INFINITY;
  CHECK_THROWS_AS(minimize(p), std::invalid_argument);
  p = quadratic(2);
  p.eval_budget = 0;
  CHECK_THROWS_AS(minimize(p), std::invalid_argument);
  p = quadratic(2);
  p.constraint_scales = {1.0};
  CHECK_THROWS_AS(minimize(p), std::invalid_argument);
  CHECK(to_string(NlpStatus::budget_exhausted) == "budget-exhausted");
}

}  // TEST_SUITE
