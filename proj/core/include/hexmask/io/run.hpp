#pragma once

#include <filesystem>
#include <memory>
#include <string>

#include "hexmask/io/config.hpp"
#include "hexmask/postproc.hpp"
#include "hexmask/sls.hpp"

namespace hexmask::io {

struct RunSummary {
  RunConfig config;
  std::shared_ptr<const HexGrid> grid;
  SLSResult sls;
  ProjectedDesign projected;
  double phi_gray = 0.0;
  double phi_drift = 0.0;  // |phi_projected - phi_gray| / |phi_gray|
  double bwi = 0.0;
  bool load_path_connected = false;
};

// True when every loaded node (and the output port) touches a solid cell whose
// component also touches a supported node.
bool supports_connected_to_loads(const HexGrid& grid, const FEModel& model, const BinaryField& solid);

// Runs the SLS driver, projects the result and writes final.svg, skeleton.svg,
// history.csv, masks.csv, density.csv and report.txt into outdir (skipped when empty).
RunSummary run_pipeline(const RunConfig& cfg, const std::filesystem::path& outdir, const SlsProgress& progress = {});

// [report] section readable by IniDocument.
std::string report_text(const RunSummary& s);

// Re-renders final.svg-style output from a saved output directory.
std::string render_saved_state(const std::filesystem::path& dir);

}  // namespace hexmask::io
