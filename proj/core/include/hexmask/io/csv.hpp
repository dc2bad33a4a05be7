#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "hexmask/hexgrid.hpp"
#include "hexmask/maskfield.hpp"
#include "hexmask/sls.hpp"

namespace hexmask::io {

// Writes to a sibling temp file, then renames over the target.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);
std::string read_file(const std::filesystem::path& path);

// density.csv: row,col,density (6 significant digits)
std::string density_csv(const HexGrid& grid, const DensityField& field);

struct DensityTable {
  int n_cols = 0, n_rows = 0;
  DensityField field;
};
// Rows may come in any order; every (row, col) must appear exactly once.
DensityTable parse_density_csv(const std::string& text);

// masks.csv: id,polarity,x,y,a,b,theta
std::string masks_csv(const MaskSet& masks);
// alpha and eta are not stored and keep their defaults.
MaskSet parse_masks_csv(const std::string& text);

// history.csv: eval,phi,g1,gmin,gmax,vf,eps1,eps2,bwi
inline constexpr const char* kHistoryHeader = "eval,phi,g1,gmin,gmax,vf,eps1,eps2,bwi";
std::string history_csv(const std::vector<HistoryRow>& rows);
std::vector<HistoryRow> parse_history_csv(const std::string& text);

// row,col of each listed cell
std::string cells_csv(const HexGrid& grid, const std::vector<int>& ids);

}  // namespace hexmask::io
