#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "hexmask/hexfem.hpp"
#include "hexmask/hexgrid.hpp"
#include "hexmask/maskfield.hpp"
#include "hexmask/sls.hpp"

namespace hexmask::io {

class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& source, int line, const std::string& what);
  int line() const { return line_; }

 private:
  int line_;
};

struct IniEntry {
  std::string key;
  std::string value;
  int line = 0;
};

struct IniSection {
  std::string name;
  int line = 0;
  std::vector<IniEntry> entries;
};

// [section] headers, key = value lines, '#' or ';' comments. Keys may repeat.
struct IniDocument {
  std::string source;
  std::vector<IniSection> sections;

  static IniDocument parse(std::string_view text, std::string source = "<string>");
  static IniDocument load(const std::filesystem::path& path);

  const IniSection* section(std::string_view name) const;
  const IniEntry* find(std::string_view section, std::string_view key) const;
  std::vector<const IniEntry*> find_all(std::string_view section, std::string_view key) const;
};

// Node selectors:
//   edge:left|right|top|bottom   boundary nodes on that side
//   at:fx,fy                     node nearest to a point given relative to the domain box
//   near:x,y                     node nearest to an absolute point
//   box:x0,y0,x1,y1              every node inside an absolute box
struct Selector {
  enum class Kind { edge, at, near, box };
  Kind kind = Kind::at;
  std::string edge;
  std::vector<double> v;
  std::string text;
};

Selector parse_selector(const std::string& text);
std::vector<int> select_nodes(const HexGrid& grid, const Selector& sel);

struct FixSpec {
  Selector where;
  bool x = false, y = false;
  int line = 0;
};

struct LoadSpec {
  Selector where;
  double fx = 0.0, fy = 0.0;
  int line = 0;
};

struct PortSpec {
  Selector where;
  int component = 0;  // 0: x, 1: y
  double sign = 1.0;
  int line = 0;
};

struct RunConfig {
  std::string name = "run";
  int n_cols = 0, n_rows = 0;
  double cs = 0.0;
  Material material;

  std::vector<FixSpec> fixes;
  std::vector<LoadSpec> loads;
  std::optional<PortSpec> input;
  std::optional<PortSpec> output;
  double k_in = 0.0, k_out = 0.0;

  Polarity polarity = Polarity::negative;
  MaskShape shape = MaskShape::elliptical;
  int masks_x = 0, masks_y = 0;  // 0: one mask per 5 length units
  double initial_axis = kMaxSemiAxis / 4.0;

  double alpha = 6.0, eta = 3.0;
  SLSConfig sls;
  // Nonzero when the length was given as a multiple of cs; kept through scaled().
  double min_ls_cs = 0.0, max_ls_cs = 0.0;
  std::string outdir = "out";
  std::uint64_t seed = 0;  // reserved, the pipeline is deterministic

  void validate() const;
};

// Lengths in the [lengthscale] section accept an absolute value or a multiple of cs ("4cs").
RunConfig parse_run_config(const IniDocument& doc);
RunConfig load_run_config(const std::filesystem::path& path);

// Scales mesh and mask counts by f and rescales cs so the domain width is kept.
RunConfig scaled(const RunConfig& cfg, double f);

std::shared_ptr<const HexGrid> build_grid(const RunConfig& cfg);
FEModel build_model(const RunConfig& cfg, std::shared_ptr<const HexGrid> grid);
MaskSet initial_masks(const RunConfig& cfg, const HexGrid& grid);

}  // namespace hexmask::io
