#include "hexmask/skeleton.hpp"

#include <stdexcept>

namespace hexmask {

BinaryField BinaryField::from_density(const DensityField& field, double threshold) {
  BinaryField b;
  b.filled.resize(field.size());
  for (std::size_t i = 0; i < field.size(); ++i) b.filled[i] = field.rho[i] > threshold ? 1 : 0;
  return b;
}

BinaryField BinaryField::from_ids(int ncells, const std::vector<int>& ids) {
  BinaryField b;
  b.filled.assign(ncells, 0);
  for (int id : ids) b.filled.at(id) = 1;
  return b;
}

int BinaryField::count() const {
  int n = 0;
  for (auto v : filled) n += v;
  return n;
}

std::vector<int> BinaryField::ids() const {
  std::vector<int> out;
  for (std::size_t i = 0; i < filled.size(); ++i)
    if (filled[i]) out.push_back(static_cast<int>(i));
  return out;
}

int CharacterVector::sum() const {
  int s = 0;
  for (int c : chi) s += c;
  return s;
}

int CharacterVector::ones() const {
  int n = 0;
  for (int c : chi) n += (c == 1);
  return n;
}

std::string to_string(LocalCase c) {
  switch (c) {
    case LocalCase::endpoint: return "endpoint";
    case LocalCase::IA: return "I-A";
    case LocalCase::IB: return "I-B";
    case LocalCase::IIA: return "II-A";
    case LocalCase::IIB: return "II-B";
    case LocalCase::IIC: return "II-C";
    case LocalCase::IIIA: return "III-A";
    case LocalCase::IIIBC: return "III-B/C";
    case LocalCase::IV: return "IV";
    case LocalCase::enclosed: return "enclosed";
  }
  return "?";
}

bool is_removable(LocalCase c) {
  return c == LocalCase::IA || c == LocalCase::IIA || c == LocalCase::IIIA || c == LocalCase::IV;
}

namespace {

bool is_filled(const BinaryField& f, int id) { return id != kNoCell && f.filled[id]; }
bool in_contour(const ContourSet& c, int id) { return id != kNoCell && c[id]; }

}  // namespace

ContourSet detect_contour(const HexGrid& grid, const BinaryField& field) {
  ContourSet contour(grid.num_cells(), 0);
  for (int id = 0; id < grid.num_cells(); ++id) {
    if (!field.filled[id]) continue;
    for (int n : grid.ring(id)) {
      if (n == kNoCell || !field.filled[n]) {
        contour[id] = 1;
        break;
      }
    }
  }
  return contour;
}

CharacterVector character(const HexGrid& grid, const ContourSet& contour, int id) {
  if (!in_contour(contour, id)) throw std::invalid_argument("character vector requested for a non-contour cell");
  const auto& ring = grid.ring(id);
  CharacterVector cv;
  for (int k = 0; k < 6; ++k) cv.chi[k] = 1 + in_contour(contour, ring[k]) + in_contour(contour, ring[(k + 1) % 6]);
  return cv;
}

LocalCase classify(const CharacterVector& cv) {
  for (int c : cv.chi)
    if (c < 1 || c > 3) throw std::logic_error("character vector entry outside [1,3]");
  // Recover the neighbor pattern: chi[k] - 1 = c_k + c_{k+1}.
  bool realizable = false;
  for (int c0 = 0; c0 <= 1 && !realizable; ++c0) {
    int c = c0;
    bool ok = true;
    for (int k = 0; k < 6 && ok; ++k) {
      const int next = cv.chi[k] - 1 - c;
      if (next < 0 || next > 1) ok = false;
      c = next;
    }
    realizable = ok && c == c0;
  }
  if (!realizable) throw std::logic_error("character vector is not produced by any neighbor pattern");

  const int nse = cv.nse();
  const int ones = cv.ones();
  switch (nse) {
    case 0:
    case 1: return LocalCase::endpoint;
    case 2:
      if (ones == 3) return LocalCase::IA;
      if (ones == 2) return LocalCase::IB;
      break;
    case 3:
      if (ones == 2) return LocalCase::IIA;
      if (ones == 1) return LocalCase::IIB;
      if (ones == 0) return LocalCase::IIC;
      break;
    case 4:
      if (ones == 1) return LocalCase::IIIA;
      if (ones == 0) return LocalCase::IIIBC;
      break;
    case 5: return LocalCase::IV;
    case 6: return LocalCase::enclosed;
    default: break;
  }
  throw std::logic_error("character vector with inconsistent ones count");
}

bool is_simple(const HexGrid& grid, const BinaryField& field, int id) {
  const auto& ring = grid.ring(id);
  int transitions = 0;
  for (int k = 0; k < 6; ++k) transitions += is_filled(field, ring[k]) != is_filled(field, ring[(k + 1) % 6]);
  return transitions == 2;
}

int refine_contour(const HexGrid& grid, BinaryField& field, ContourSet& contour) {
  int removed = 0;
  bool again = true;
  while (again) {
    again = false;
    for (int id = 0; id < grid.num_cells(); ++id) {
      if (!contour[id]) continue;
      if (!is_removable(classify(character(grid, contour, id)))) continue;
      if (!is_simple(grid, field, id)) continue;
      contour[id] = 0;
      field.filled[id] = 0;
      ++removed;
      again = true;
    }
  }
  return removed;
}

bool retention_step(const HexGrid& grid, BinaryField& field, ContourSet& contour) {
  std::vector<int> candidates;
  for (int id = 0; id < grid.num_cells(); ++id) {
    if (!contour[id]) continue;
    if (classify(character(grid, contour, id)) != LocalCase::IB) continue;
    // An I-B cell with only void off the contour separates two voids and stays.
    bool thick_side = false;
    for (int n : grid.ring(id))
      if (is_filled(field, n) && !contour[n]) thick_side = true;
    if (thick_side) candidates.push_back(id);
  }
  bool changed = false;
  for (int id : candidates) {
    if (!is_simple(grid, field, id)) continue;
    contour[id] = 0;
    field.filled[id] = 0;
    changed = true;
  }
  return changed;
}

SkeletonResult skeletonize(const HexGrid& grid, const BinaryField& input) {
  if (input.size() != static_cast<std::size_t>(grid.num_cells()))
    throw std::invalid_argument("binary field size does not match grid");
  SkeletonResult res;
  res.field = input;
  auto& field = res.field;

  for (;;) {
    // Thin until a whole detect/refine/retain pass leaves the field untouched.
    for (;;) {
      ++res.iterations;
      ContourSet contour = detect_contour(grid, field);
      const int removed = refine_contour(grid, field, contour);
      const bool retained_removed = retention_step(grid, field, contour);
      if (removed == 0 && !retained_removed) break;
    }
    const ContourSet contour = detect_contour(grid, field);
    bool leftovers = false;
    for (int id = 0; id < grid.num_cells() && !leftovers; ++id) leftovers = field.filled[id] && !contour[id];
    if (!leftovers) break;

    res.special_case_triggered = true;
    ContourSet forced(field.filled.begin(), field.filled.end());
    if (refine_contour(grid, field, forced) == 0) break;
  }

  res.skeleton_cells = field.ids();
  return res;
}

SkeletonResult skeletonize(const HexGrid& grid, const DensityField& field, double threshold) {
  return skeletonize(grid, BinaryField::from_density(field, threshold));
}

namespace {

int count_components(const HexGrid& grid, const std::vector<std::uint8_t>& member, bool merge_boundary) {
  const int n = grid.num_cells();
  std::vector<std::uint8_t> seen(n, 0);
  std::vector<int> stack;
  int comps = 0;
  for (int s = 0; s < n; ++s) {
    if (!member[s] || seen[s]) continue;
    bool touches = false;
    seen[s] = 1;
    stack.push_back(s);
    while (!stack.empty()) {
      const int c = stack.back();
      stack.pop_back();
      for (int nb : grid.ring(c)) {
        if (nb == kNoCell) {
          touches = true;
          continue;
        }
        if (member[nb] && !seen[nb]) {
          seen[nb] = 1;
          stack.push_back(nb);
        }
      }
    }
    if (!(merge_boundary && touches)) ++comps;
  }
  // The virtual outer void always exists and absorbs every void touching the grid edge.
  return merge_boundary ? comps + 1 : comps;
}

}  // namespace

int count_solid_components(const HexGrid& grid, const BinaryField& field) {
  return count_components(grid, field.filled, false);
}

int count_void_components(const HexGrid& grid, const BinaryField& field) {
  std::vector<std::uint8_t> voids(field.filled.size());
  for (std::size_t i = 0; i < voids.size(); ++i) voids[i] = !field.filled[i];
  return count_components(grid, voids, true);
}

}  // namespace hexmask
