#pragma once

#include <functional>
#include <string>
#include <vector>

#include "hexmask/hexfem.hpp"
#include "hexmask/lengthscale.hpp"
#include "hexmask/maskfield.hpp"
#include "hexmask/optimizer.hpp"
#include "hexmask/skeleton.hpp"

namespace hexmask {

enum class RegionRefresh { outer, step };

struct SLSConfig {
  double vf_init = 0.2;
  double vf_min = 0.1;
  double vf_max = 0.5;
  double tol_init = 1.0;
  double delta_eps = 10.0;
  double eps_int = 1.0;
  LengthScaleSpec spec;
  int stage_budget = 100;
  int total_budget = 4000;
  int max_stage1_passes = 5;
  std::vector<double> continuation;  // alpha values applied after the first accepted Stage II
  double sed_threshold = 1e-6;
  // Fraction of V* held back inside the optimizer so that g1 <= 0 holds exactly afterwards.
  double volume_backoff = 1e-2;
  // Magnitudes (in cells) normalizing the constraints inside the optimizer. The small
  // volume scale makes g1 the constraint restored first. 0 means max(1, N/100) for g1
  // and max(1, eps, N/100) for the length-scale constraints.
  double volume_scale = 1.0;
  double constraint_scale = 0.0;
  RegionRefresh refresh = RegionRefresh::outer;
  ObjectiveKind kind = ObjectiveKind::compliance;
  double S = 1.0;
  double rho_min = kDefaultRhoMin;
  double min_axis = 0.0;  // 0: default_min_axis(polarity, min_ls)
  double max_axis = kMaxSemiAxis;

  void validate() const;
};

enum class Stage { I, II };

struct HistoryRow {
  int eval = 0;
  double phi = 0.0, g1 = 0.0, gmin = 0.0, gmax = 0.0;
  double vf = 0.0, eps1 = 0.0, eps2 = 0.0, bwi = 0.0;
};

enum class Stage2Action { stop_accept, add_material, remove_material, relax, raise_volume };
std::string to_string(Stage2Action a);

struct StepRecord {
  Stage stage = Stage::I;
  double alpha = 0.0;
  double vf = 0.0, eps1 = 0.0, eps2 = 0.0;  // values used for the step
  double phi = 0.0, g1 = 0.0, gmin = 0.0, gmax = 0.0;
  int evals = 0;
  int masks = 0;
  NlpStatus optimizer = NlpStatus::stalled;
  std::string action;
};

enum class SlsStatus { accepted, budget_exhausted };
std::string to_string(SlsStatus s);

struct SLSState {
  Stage stage = Stage::I;
  double vf = 0.2;
  double eps1 = 1.0;
  double eps2 = 1.0;
  int evals_used = 0;
  bool stage1_exhausted = false;
  SlsStatus status = SlsStatus::budget_exhausted;
  MaskSet masks;
  std::vector<HistoryRow> history;
  std::vector<StepRecord> steps;
};

// vf <- max(vf_min, vf - gmax / N)
double stage1_update(double vf, double gmax, int ncells, double vf_min);

// Applies rules 1(a)-(d) and 2 to the state's vf and eps.
Stage2Action stage2_step(SLSState& state, const SLSConfig& cfg, int ncells, double g1, double gmin, double gmax);

// Removes positive masks whose enclosed cells all carry normalized SED below the
// threshold. Masks enclosing no cell count as deletable; one mask always survives.
MaskSet mask_deletion(const HexGrid& grid, const MaskSet& masks, const std::vector<double>& sed, double threshold);

struct SLSResult {
  SLSState state;
  DensityField field;
  SkeletonResult skeleton;
  Regions regions;
  double phi = 0.0, g1 = 0.0, gmin = 0.0, gmax = 0.0;
};

using SlsProgress = std::function<void(const StepRecord&)>;

SLSResult run_sls(Analysis& analysis, const SLSConfig& cfg, const MaskSet& initial, const SlsProgress& progress = {});

}  // namespace hexmask
