#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "hexmask/hexgrid.hpp"
#include "hexmask/maskfield.hpp"

namespace hexmask {

struct BinaryField {
  std::vector<std::uint8_t> filled;

  static BinaryField from_density(const DensityField& field, double threshold = 0.5);
  static BinaryField from_ids(int ncells, const std::vector<int>& ids);
  std::size_t size() const { return filled.size(); }
  int count() const;
  std::vector<int> ids() const;
  bool operator==(const BinaryField&) const = default;
};

// Membership flag per cell.
using ContourSet = std::vector<std::uint8_t>;

struct CharacterVector {
  std::array<int, 6> chi{};

  int sum() const;
  int nse() const { return (sum() - 6) / 2; }
  int ones() const;
};

enum class LocalCase { endpoint, IA, IB, IIA, IIB, IIC, IIIA, IIIBC, IV, enclosed };

std::string to_string(LocalCase c);
bool is_removable(LocalCase c);

ContourSet detect_contour(const HexGrid& grid, const BinaryField& field);

// chi[k] = contour cells (self included) incident to node k of the cell.
// Throws std::invalid_argument when id is not a contour cell.
CharacterVector character(const HexGrid& grid, const ContourSet& contour, int id);

// Throws std::logic_error when chi is not produced by any neighbor pattern.
LocalCase classify(const CharacterVector& chi);

// A filled cell is simple when its filled ring neighbors form exactly one run
// (missing neighbors count as void). Removing a simple cell keeps the number of
// solid and void components.
bool is_simple(const HexGrid& grid, const BinaryField& field, int id);

// Returns the number of cells removed.
int refine_contour(const HexGrid& grid, BinaryField& field, ContourSet& contour);

// Returns true when any cell was removed.
bool retention_step(const HexGrid& grid, BinaryField& field, ContourSet& contour);

struct SkeletonResult {
  std::vector<int> skeleton_cells;
  BinaryField field;
  int iterations = 0;
  bool special_case_triggered = false;
};

SkeletonResult skeletonize(const HexGrid& grid, const BinaryField& field);
SkeletonResult skeletonize(const HexGrid& grid, const DensityField& field, double threshold = 0.5);

// Connected components of the filled cells, and of the void cells plus one
// virtual void surrounding the grid.
int count_solid_components(const HexGrid& grid, const BinaryField& field);
int count_void_components(const HexGrid& grid, const BinaryField& field);

}  // namespace hexmask
