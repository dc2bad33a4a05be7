#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "hexmask/hexgrid.hpp"
#include "hexmask/maskfield.hpp"

using namespace hexmask;

namespace {

MaskSet one_mask(Polarity pol, EllipticalMask m, double alpha = 6.0, double eta = 3.0,
                 MaskShape shape = MaskShape::elliptical) {
  MaskSet s;
  s.polarity = pol;
  s.shape = shape;
  s.alpha = alpha;
  s.eta = eta;
  s.masks.push_back(m);
  return s;
}

// Per-component error against a central difference, with the same small-component floor as fd_check.
double worst_rel_error(const std::array<double, 5>& a, const std::array<double, 5>& fd) {
  double scale = 0.0;
  for (double v : fd) scale = std::max(scale, std::abs(v));
  double worst = 0.0;
  for (int k = 0; k < 5; ++k) {
    const double den = std::max(std::abs(fd[k]), 1e-3 * scale);
    if (den == 0.0) continue;
    worst = std::max(worst, std::abs(a[k] - fd[k]) / den);
  }
  return worst;
}

std::array<double, 5> fd_gradient(MaskSet ms, Vec2 p, std::size_t j, double h) {
  std::array<double, 5> out{};
  const int nv = vars_per_mask(ms.shape);
  for (int k = 0; k < nv; ++k) {
    auto bump = [&](double s) {
      MaskSet t = ms;
      auto& m = t.masks[j];
      double* f[5] = {&m.x, &m.y, &m.a, &m.b, &m.theta};
      *f[k] += s;
      return density(t, p);
    };
    out[k] = (8.0 * (bump(h) - bump(-h)) - (bump(2 * h) - bump(-2 * h))) / (12.0 * h);
  }
  return out;
}

}  // namespace

TEST_SUITE("maskfield") {

TEST_CASE("signed measure") {
  const EllipticalMask m{0.0, 0.0, 2.0, 1.0, 0.0};
  CHECK(signed_measure(m, {2.0, 0.0}) == doctest::Approx(0.0));
  CHECK(signed_measure(m, {0.0, 0.0}) == doctest::Approx(-1.0));
  CHECK(signed_measure(m, {0.0, 1.0}) == doctest::Approx(0.0));
  CHECK(signed_measure(m, {4.0, 0.0}) == doctest::Approx(3.0));
  const EllipticalMask r{0.0, 0.0, 2.0, 1.0, std::numbers::pi / 2};
  CHECK(signed_measure(r, {0.0, 2.0}) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(std::abs(signed_measure(r, {0.0, 2.0})) < 1e-12);
}

TEST_CASE("negative density values") {
  // d = +10 far outside: logistic saturates.
  const EllipticalMask m{0.0, 0.0, 1.0, 1.0, 0.0};
  const auto s = one_mask(Polarity::negative, m);
  CHECK(density_negative(s, {std::sqrt(11.0), 0.0}) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(1.0 - density_negative(s, {std::sqrt(11.0), 0.0}) < 1e-12);
  CHECK(density_negative(s, {1.0, 0.0}) == doctest::Approx(0.125));
  // Centered circular mask: d = -1, (1 / (1 + e^6))^3.
  const auto c = one_mask(Polarity::negative, m, 6.0, 3.0, MaskShape::circular);
  const double want = std::pow(1.0 / (1.0 + std::exp(6.0)), 3.0);
  CHECK(want == doctest::Approx(1.5117e-8).epsilon(1e-4));
  CHECK(density_negative(c, {0.0, 0.0}) == doctest::Approx(want).epsilon(1e-12));
}

TEST_CASE("positive density values") {
  const EllipticalMask m{0.0, 0.0, 1.0, 1.0, 0.0};
  const auto s = one_mask(Polarity::positive, m);
  CHECK(density_positive(s, {30.0, 0.0}) < 1e-12);
  CHECK(density_positive(s, {1.0, 0.0}) == doctest::Approx(0.125));
  // d = -10 needs a = sqrt(11) times the distance scale; use a large mask around the point.
  EllipticalMask big{0.0, 0.0, 1.0, 1.0, 0.0};
  MaskSet deep = one_mask(Polarity::positive, big, 6.0, 3.0);
  // d = -1 at the center only; push alpha so alpha*d = -60.
  deep.alpha = 60.0;
  CHECK(1.0 - density_positive(deep, {0.0, 0.0}) < 1e-12);
}

TEST_CASE("empty mask sets") {
  const auto g = HexGrid::build(4, 3, 1.0);
  MaskSet neg;
  neg.polarity = Polarity::negative;
  MaskSet pos;
  pos.polarity = Polarity::positive;
  for (double r : evaluate_field(g, neg).rho) CHECK(r == 1.0);
  for (double r : evaluate_field(g, pos).rho) CHECK(r == 0.0);
}

TEST_CASE("logistic is safe for huge arguments") {
  CHECK(logistic(800.0) == 1.0);
  CHECK(logistic(-800.0) == 0.0);
  CHECK(std::isfinite(log_logistic(-800.0)));
  CHECK(log_logistic(-800.0) == doctest::Approx(-800.0));
  CHECK(log_logistic(0.0) == doctest::Approx(-std::log(2.0)));
}

TEST_CASE("axis-aligned center has zero theta partial") {
  const EllipticalMask m{1.0, 2.0, 3.0, 1.5, 0.0};
  const auto p = signed_measure_partials(m, {1.0, 2.0});
  CHECK(p.grad[4] == doctest::Approx(0.0));
  const auto g = density_gradient(one_mask(Polarity::negative, m), {1.0, 2.0}, 0);
  CHECK(std::abs(g[4]) < 1e-15);
}

TEST_CASE("saturated mask has vanishing gradient") {
  // Far outside a tiny mask sigma(-alpha d) underflows.
  const EllipticalMask m{0.0, 0.0, 0.01, 0.01, 0.3};
  const auto g = density_gradient(one_mask(Polarity::negative, m), {5.0, 5.0}, 0);
  for (double v : g) CHECK(std::abs(v) < 1e-100);
}

TEST_CASE("density gradient matches central differences") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  int checked = 0;
  for (Polarity pol : {Polarity::negative, Polarity::positive})
    for (MaskShape shape : {MaskShape::elliptical, MaskShape::circular})
      for (int trial = 0; trial < 100; ++trial) {
        MaskSet ms;
        ms.polarity = pol;
        ms.shape = shape;
        ms.alpha = 1.0 + 9.0 * U(rng);
        ms.eta = 1.0 + 3.0 * U(rng);
        for (int j = 0; j < 3; ++j)
          ms.masks.push_back({10.0 * U(rng), 10.0 * U(rng), 1.0 + 4.0 * U(rng), 1.0 + 4.0 * U(rng),
                              shape == MaskShape::circular ? 0.0 : (U(rng) - 0.5) * 6.0});
        const Vec2 p{10.0 * U(rng), 10.0 * U(rng)};
        const std::size_t j = trial % 3;
        const double d = shape == MaskShape::circular
                             ? signed_measure_partials(ms.masks[j], p, shape).d
                             : signed_measure(ms.masks[j], p);
        // Mask j far outside p, or the other masks saturating rho, leaves a slope
        // below what a difference quotient resolves.
        if (ms.alpha * d > 8.0 || ms.alpha * d < -20.0) continue;
        const auto fd = fd_gradient(ms, p, j, 1e-4);
        double big = 0.0;
        for (double v : fd) big = std::max(big, std::abs(v));
        if (big < 1e-6 * density(ms, p)) continue;
        const auto a = density_gradient(ms, p, j);
        CHECK(worst_rel_error(a, fd) < 1e-5);
        ++checked;
      }
  CHECK(checked > 100);
}

TEST_CASE("mask order does not matter") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  const auto g = HexGrid::build(10, 8, 1.0);
  for (Polarity pol : {Polarity::negative, Polarity::positive}) {
    MaskSet a;
    a.polarity = pol;
    for (int j = 0; j < 5; ++j)
      a.masks.push_back({15.0 * U(rng), 10.0 * U(rng), 1.0 + 2.0 * U(rng), 1.0 + 2.0 * U(rng), U(rng)});
    MaskSet b = a;
    std::reverse(b.masks.begin(), b.masks.end());
    const auto fa = evaluate_field(g, a), fb = evaluate_field(g, b);
    for (std::size_t i = 0; i < fa.size(); ++i) CHECK(fa.rho[i] == doctest::Approx(fb.rho[i]).epsilon(1e-13));
  }
}

TEST_CASE("negative density increases with d") {
  const auto s = one_mask(Polarity::negative, {0.0, 0.0, 2.0, 1.0, 0.4});
  double prev = -1.0;
  for (int k = 0; k <= 60; ++k) {
    const double r = 0.05 * k;
    const double rho = density(s, {r * std::cos(0.4), r * std::sin(0.4)});
    CHECK(rho > prev);
    CHECK(rho > 0.0);
    CHECK(rho < 1.0);
    prev = rho;
  }
}

TEST_CASE("evenly spread negative masks carve holes") {
  // 6 x 4 layout on a 60 x 30 domain: centers void, mask gaps solid.
  const auto g = HexGrid::build(36, 20, 1.0);
  const Box b = g.bounds();
  const auto ms = even_layout(b, 6, 4, Polarity::negative, MaskShape::elliptical, 6.0, 3.0, 2.5);
  CHECK(ms.size() == 24u);
  const auto f = evaluate_field(g, ms);
  int under = 0, between = 0;
  for (const auto& c : g.cells()) {
    double dmin = 1e9;
    for (const auto& m : ms.masks) dmin = std::min(dmin, signed_measure(m, c.centroid));
    if (dmin < -0.5) {
      CHECK(f.rho[c.id] < 0.05);
      ++under;
    } else if (dmin > 1.0) {
      CHECK(f.rho[c.id] > 0.95);
      ++between;
    }
  }
  CHECK(under > 0);
  CHECK(between > 0);
}

TEST_CASE("pack, unpack and bounds") {
  MaskSet ms;
  ms.masks = {{1, 2, 3, 4, 0.5}, {5, 6, 7, 8, -0.5}};
  const auto v = pack_design(ms);
  CHECK(v.size() == 10u);
  MaskSet back = ms;
  for (auto& m : back.masks) m = {};
  unpack_design(v, back);
  for (std::size_t j = 0; j < 2; ++j) {
    CHECK(back.masks[j].x == ms.masks[j].x);
    CHECK(back.masks[j].theta == ms.masks[j].theta);
  }
  MaskSet circ = ms;
  circ.shape = MaskShape::circular;
  CHECK(pack_design(circ).size() == 6u);
  const auto bnd = design_bounds(ms, {0, 0, 10, 5}, 0.5);
  CHECK(bnd.lower.size() == 10u);
  CHECK(bnd.lower[2] == 0.5);
  CHECK(bnd.upper[3] == kMaxSemiAxis);
  CHECK(bnd.upper[1] == 5.0);
  CHECK_THROWS_AS(design_bounds(ms, {0, 0, 10, 5}, 0.0), std::invalid_argument);
  CHECK(default_min_axis(Polarity::negative, 1.52) == 1.52);
  CHECK(default_min_axis(Polarity::positive, 1.52) == kPositiveMinAxis);
  CHECK(masks_along(98.7) == 20);
  CHECK(masks_along(45.6) == 9);
  CHECK(masks_along(1.0) == 1);
}

TEST_CASE("validation and angle wrapping") {
  MaskSet ms;
  ms.masks = {{0, 0, 1, 1, 0}};
  ms.alpha = 0.0;
  CHECK_THROWS_AS(ms.validate(), std::invalid_argument);
  ms.alpha = 6.0;
  ms.eta = 0.5;
  CHECK_THROWS_AS(ms.validate(), std::invalid_argument);
  ms.eta = 3.0;
  ms.masks[0].b = 0.0;
  CHECK_THROWS_AS(ms.validate(), std::invalid_argument);
  CHECK(wrap_angle(3.0 * std::numbers::pi / 2) == doctest::Approx(-std::numbers::pi / 2));
  CHECK(wrap_angle(-7.0) == doctest::Approx(-7.0 + 2.0 * std::numbers::pi));
  CHECK(wrap_angle(0.3) == doctest::Approx(0.3));
  CHECK(parse_polarity("positive") == Polarity::positive);
  CHECK_THROWS_AS(parse_polarity("both"), std::invalid_argument);
}

TEST_CASE("pullback is the transpose of the density Jacobian") {
  const auto g = HexGrid::build(8, 6, 1.0);
  MaskSet ms = even_layout(g.bounds(), 2, 2, Polarity::negative, MaskShape::elliptical, 6.0, 3.0, 2.0);
  ms.masks[1].theta = 0.7;
  ms.masks[2].b = 1.4;
  std::vector<double> w(g.num_cells());
  for (int i = 0; i < g.num_cells(); ++i) w[i] = std::sin(0.37 * i) + 0.2;
  const auto grad = pullback(g, ms, w);
  for (std::size_t j = 0; j < ms.size(); ++j) {
    std::array<double, 5> want{};
    for (const auto& c : g.cells()) {
      const auto d = density_gradient(ms, c.centroid, j);
      for (int k = 0; k < 5; ++k) want[k] += w[c.id] * d[k];
    }
    for (int k = 0; k < 5; ++k) CHECK(grad[5 * j + k] == doctest::Approx(want[k]).epsilon(1e-10));
  }
}

}  // TEST_SUITE
