#include <doctest.h>

#include <algorithm>
#include <set>

#include "hexmask/hexgrid.hpp"

using namespace hexmask;

TEST_SUITE("hexgrid") {

TEST_CASE("benchmark I mesh spans the quoted domain") {
  const auto g = HexGrid::build(150, 80, 0.38);
  CHECK(g.num_cells() == 12000);
  const Box b = g.bounds();
  // Offset rows add half a pitch to the width and half a cell to the height.
  CHECK(b.width() == doctest::Approx(150.5 * std::sqrt(3.0) * 0.38).epsilon(1e-12));
  CHECK(b.height() == doctest::Approx((1.5 * 80 + 0.5) * 0.38).epsilon(1e-12));
  CHECK(b.width() == doctest::Approx(98.7).epsilon(0.01));
  CHECK(b.height() == doctest::Approx(45.6).epsilon(0.01));
}

TEST_CASE("single cell") {
  const auto g = HexGrid::build(1, 1, 1.0);
  CHECK(g.num_cells() == 1);
  CHECK(g.num_nodes() == 6);
  CHECK(g.neighbors(0).empty());
  for (int n = 0; n < 6; ++n) CHECK(g.is_boundary_node(n));
}

TEST_CASE("2x2 neighbor counts depend on row parity") {
  const auto g = HexGrid::build(2, 2, 1.0);
  // (0,0) sees (0,1) and (1,0); (0,1) sees (0,0), (1,0), (1,1); the odd row mirrors this.
  CHECK(g.neighbor_count(g.cell_id(0, 0)) == 2);
  CHECK(g.neighbor_count(g.cell_id(0, 1)) == 3);
  CHECK(g.neighbor_count(g.cell_id(1, 0)) == 3);
  CHECK(g.neighbor_count(g.cell_id(1, 1)) == 2);
}

TEST_CASE("bad dimensions") {
  CHECK_THROWS_AS(HexGrid::build(0, 3, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(HexGrid::build(3, -1, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(HexGrid::build(3, 3, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(HexGrid::build(3, 3, -2.0), std::invalid_argument);
}

TEST_CASE("interior and corner neighbors") {
  const auto g = HexGrid::build(10, 10, 1.0);
  CHECK(g.neighbors(g.cell_id(5, 5)).size() == 6);
  CHECK(g.neighbors(g.cell_id(0, 0)).size() < 6);
  CHECK(g.neighbors(g.cell_id(9, 9)).size() < 6);
  CHECK_THROWS_AS(g.neighbors(100), std::out_of_range);
  CHECK_THROWS_AS(g.neighbors(-1), std::out_of_range);
  CHECK_THROWS_AS(g.cell_id(10, 0), std::out_of_range);
}

TEST_CASE("adjacency is symmetric on 5x5") {
  const auto g = HexGrid::build(5, 5, 1.0);
  for (int i = 0; i < g.num_cells(); ++i)
    for (int j = 0; j < g.num_cells(); ++j) {
      const auto ni = g.neighbors(i), nj = g.neighbors(j);
      const bool a = std::find(ni.begin(), ni.end(), j) != ni.end();
      const bool b = std::find(nj.begin(), nj.end(), i) != nj.end();
      CHECK(a == b);
    }
}

TEST_CASE("ring slots point the right way") {
  const auto g = HexGrid::build(7, 6, 0.7);
  const double pitch = g.pitch();
  for (int id = 0; id < g.num_cells(); ++id) {
    const auto& ring = g.ring(id);
    for (int k = 0; k < 6; ++k) {
      if (ring[k] == kNoCell) continue;
      const Vec2 d = g.centroid(ring[k]) - g.centroid(id);
      CHECK(d.norm() == doctest::Approx(pitch).epsilon(1e-12));
      const double ang = std::atan2(d.y, d.x);
      const double want = k * M_PI / 3.0;
      CHECK(std::abs(std::remainder(ang - want, 2.0 * M_PI)) < 1e-9);
      // Opposite slot of the neighbor points back.
      CHECK(g.ring(ring[k])[(k + 3) % 6] == id);
    }
  }
}

TEST_CASE("shared nodes are deduplicated and centroids are node means") {
  const auto g = HexGrid::build(6, 4, 1.3);
  CHECK(g.num_nodes() < 6 * g.num_cells());
  // Closed form for offset-row honeycombs: 2 (c + 1) (r + 1) - 2 nodes when r >= 2.
  CHECK(g.num_nodes() == 2 * (6 + 1) * (4 + 1) - 2);
  for (const auto& c : g.cells()) {
    Vec2 s;
    for (int n : c.node_ids) s += g.node(n);
    CHECK(distance(s * (1.0 / 6.0), c.centroid) < 1e-12);
  }
  int degree_sum = 0;
  for (int id = 0; id < g.num_cells(); ++id) degree_sum += g.neighbor_count(id);
  CHECK(degree_sum % 2 == 0);
}

TEST_CASE("node incidence") {
  const auto g = HexGrid::build(4, 4, 1.0);
  for (int n = 0; n < g.num_nodes(); ++n) {
    const auto& inc = g.node_cells(n);
    CHECK(inc[0] != kNoCell);
    for (int c : inc) {
      if (c == kNoCell) continue;
      const auto& ids = g.cell(c).node_ids;
      CHECK(std::find(ids.begin(), ids.end(), n) != ids.end());
    }
  }
  // Node k of a cell is shared with ring slots k and k+1.
  for (int id = 0; id < g.num_cells(); ++id) {
    const auto& ring = g.ring(id);
    for (int k = 0; k < 6; ++k) {
      const int node = g.cell(id).node_ids[k];
      std::set<int> want{id};
      if (ring[k] != kNoCell) want.insert(ring[k]);
      if (ring[(k + 1) % 6] != kNoCell) want.insert(ring[(k + 1) % 6]);
      std::set<int> got;
      for (int c : g.node_cells(node))
        if (c != kNoCell) got.insert(c);
      CHECK(got == want);
    }
  }
}

}  // TEST_SUITE
