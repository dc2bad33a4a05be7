#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "hexmask/postproc.hpp"

using namespace hexmask;

namespace {

double signed_area(const Polyline& l) {
  double a = 0.0;
  for (std::size_t i = 0; i < l.points.size(); ++i) a += l.points[i].cross(l.points[(i + 1) % l.points.size()]);
  return 0.5 * a;
}

DensityField filled(const BinaryField& b) {
  DensityField d;
  for (auto v : b.filled) d.rho.push_back(v ? 1.0 : 0.0);
  return d;
}

}  // namespace

TEST_SUITE("postproc") {

TEST_CASE("gray level index") {
  DensityField f;
  f.rho = {0, 1, 1, 0};
  CHECK(bwi(f) == 0.0);
  f.rho.assign(10, 0.5);
  CHECK(bwi(f) == doctest::Approx(1.0));
  f.rho = {0.9, 0.1, 0.9, 0.1};
  CHECK(bwi(f) == doctest::Approx(0.36));
  CHECK(bwi(DensityField{}) == 0.0);
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 100; ++t) {
    f.rho.resize(50);
    for (auto& r : f.rho) r = u(rng);
    const double b = bwi(f);
    CHECK(b > 0.0);
    CHECK(b <= 1.0);
  }
}

TEST_CASE("projection with imposed minimum length scale") {
  const auto g = HexGrid::build(10, 8, 1.0);
  const LengthScaleSpec spec{1.8, 4.0, 1};
  BinaryField bar;
  bar.filled.assign(g.num_cells(), 0);
  for (const auto& c : g.cells())
    if (c.row >= 3 && c.row <= 5) bar.filled[c.id] = 1;
  const auto field = filled(bar);
  const auto regions = build_regions(g, skeletonize(g, bar), spec);
  REQUIRE(g_min(field, regions, spec) == 0.0);

  const auto same = project_with_min_ls(field, regions);
  CHECK(same.binary == bar);
  CHECK(same.field.rho == field.rho);

  auto gray = field;
  const int id = regions.min_ids().front();
  gray.rho[id] = 0.3;
  const auto p = project_with_min_ls(gray, regions);
  CHECK(p.binary.filled[id]);
  CHECK(p.field.rho[id] == 1.0);
  for (double r : p.field.rho) CHECK((r == 0.0 || r == 1.0));

  // Idempotent.
  const auto q = project_with_min_ls(p.field, regions);
  CHECK(q.binary == p.binary);

  Regions wrong;
  wrong.r_min.assign(3, 0);
  CHECK_THROWS_AS(project_with_min_ls(field, wrong), std::invalid_argument);
}

TEST_CASE("re-evaluation uses the projected field") {
  auto g = std::make_shared<const HexGrid>(HexGrid::build(8, 6, 1.0));
  FEModel m = FEModel::make(g);
  for (int n = 0; n < g->num_nodes(); ++n)
    if (g->node(n).x < g->bounds().xmin + 0.6 * g->pitch()) m.fix(2 * n), m.fix(2 * n + 1);
  m.add_force(2 * (g->num_nodes() - 1) + 1, -1.0);
  Analysis an(m);
  DensityField f;
  f.rho.assign(g->num_cells(), 0.8);
  Regions r;
  r.r_min.assign(g->num_cells(), 0);
  r.r_max.assign(g->num_cells(), 0);
  auto p = project_with_min_ls(f, r);
  CHECK_FALSE(p.phi_evaluated);
  reevaluate(p, an, ObjectiveKind::compliance, 1.0);
  CHECK(p.phi_evaluated);
  DensityField solid;
  solid.rho.assign(g->num_cells(), 1.0);
  CHECK(p.phi == doctest::Approx(an.objective(solid, ObjectiveKind::compliance).phi));
}

TEST_CASE("boundary loops enclose the solid area") {
  const auto g = HexGrid::build(14, 12, 0.7);
  const double hex_area = 1.5 * std::sqrt(3.0) * 0.7 * 0.7;
  SUBCASE("single cell") {
    BinaryField b = BinaryField::from_ids(g.num_cells(), {g.cell_id(5, 5)});
    const auto loops = extract_boundary(g, b);
    REQUIRE(loops.size() == 1);
    CHECK(loops[0].closed);
    CHECK(loops[0].points.size() == 6);
    CHECK(signed_area(loops[0]) == doctest::Approx(hex_area));
  }
  SUBCASE("random fields") {
    std::mt19937_64 rng(8);
    for (int t = 0; t < 30; ++t) {
      BinaryField b;
      b.filled.resize(g.num_cells());
      for (auto& v : b.filled) v = rng() % 2;
      double total = 0.0;
      for (const auto& l : extract_boundary(g, b)) total += signed_area(l);
      CHECK(total == doctest::Approx(hex_area * b.count()));
    }
  }
  SUBCASE("ring has an outer and an inner loop") {
    BinaryField b;
    b.filled.assign(g.num_cells(), 0);
    for (int n : g.ring(g.cell_id(6, 6))) b.filled[n] = 1;
    const auto loops = extract_boundary(g, b);
    REQUIRE(loops.size() == 2);
    CHECK(signed_area(loops[0]) * signed_area(loops[1]) < 0.0);
  }
  SUBCASE("grid border nodes are pinned") {
    BinaryField b;
    b.filled.assign(g.num_cells(), 1);
    const auto loops = extract_boundary(g, b);
    REQUIRE(loops.size() == 1);
    for (auto p : loops[0].pinned) CHECK(p);
  }
}

TEST_CASE("smoothing") {
  SUBCASE("straight line is a fixed point") {
    Polyline l;
    for (int i = 0; i < 10; ++i) l.points.push_back({double(i), 2.0});
    l.pinned.assign(10, 0);
    const auto before = l.points;
    smooth_polyline(l, 20);
    for (int i = 0; i < 10; ++i) CHECK(distance(l.points[i], before[i]) < 1e-12);
  }
  SUBCASE("zig-zag distance to the chord shrinks every step") {
    Polyline l;
    for (int i = 0; i < 21; ++i) l.points.push_back({double(i), i % 2 ? 0.5 : -0.5});
    l.pinned.assign(21, 0);
    auto dev = [](const Polyline& p) {
      double m = 0.0;
      for (const auto& q : p.points) m += (q.y + 0.5) * (q.y + 0.5);
      return std::sqrt(m);
    };
    double prev = dev(l);
    for (int s = 0; s < 5; ++s) {
      smooth_polyline(l, 1);
      const double d = dev(l);
      CHECK(d < prev);
      prev = d;
    }
    CHECK(l.points.front().y == -0.5);
    CHECK(l.points.back().y == -0.5);
  }
  SUBCASE("steps = 0 returns the raw hex boundary") {
    const auto g = HexGrid::build(6, 6, 1.0);
    ProjectedDesign d;
    d.binary = BinaryField::from_ids(g.num_cells(), {14, 15});
    const auto raw = extract_boundary(g, d.binary);
    const auto same = smooth_boundary(g, d, 0);
    REQUIRE(raw.size() == same.size());
    for (std::size_t i = 0; i < raw.size(); ++i)
      for (std::size_t k = 0; k < raw[i].points.size(); ++k) CHECK(distance(raw[i].points[k], same[i].points[k]) == 0.0);
  }
  SUBCASE("pinned vertices and closure survive") {
    const auto g = HexGrid::build(8, 6, 1.0);
    ProjectedDesign d;
    d.binary.filled.assign(g.num_cells(), 0);
    for (const auto& c : g.cells())
      if (c.col <= 3) d.binary.filled[c.id] = 1;
    const auto raw = extract_boundary(g, d.binary);
    const auto sm = smooth_boundary(g, d, 20);
    REQUIRE(raw.size() == sm.size());
    for (std::size_t i = 0; i < raw.size(); ++i) {
      CHECK(sm[i].closed);
      CHECK(sm[i].points.size() == raw[i].points.size());
      for (std::size_t k = 0; k < raw[i].points.size(); ++k)
        if (raw[i].pinned[k]) CHECK(distance(raw[i].points[k], sm[i].points[k]) == 0.0);
    }
  }
}

}  // TEST_SUITE
