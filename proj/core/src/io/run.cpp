#include "hexmask/io/run.hpp"

#include <cmath>
#include <cstdio>
#include <queue>

#include "hexmask/io/csv.hpp"
#include "hexmask/io/svg.hpp"

namespace hexmask::io {

namespace {

std::string g17(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::vector<int> label_solid(const HexGrid& grid, const BinaryField& solid) {
  std::vector<int> label(grid.num_cells(), -1);
  int next = 0;
  for (int s = 0; s < grid.num_cells(); ++s) {
    if (!solid.filled[s] || label[s] >= 0) continue;
    std::queue<int> q;
    q.push(s);
    label[s] = next;
    while (!q.empty()) {
      const int c = q.front();
      q.pop();
      for (int nb : grid.ring(c))
        if (nb != kNoCell && solid.filled[nb] && label[nb] < 0) {
          label[nb] = next;
          q.push(nb);
        }
    }
    ++next;
  }
  return label;
}

}  // namespace

bool supports_connected_to_loads(const HexGrid& grid, const FEModel& model, const BinaryField& solid) {
  const auto label = label_solid(grid, solid);
  std::vector<char> supported(grid.num_cells() + 1, 0);
  for (int dof : model.fixed_dofs)
    for (int c : grid.node_cells(dof / 2))
      if (c != kNoCell && label[c] >= 0) supported[label[c]] = 1;

  std::vector<int> targets;
  for (int d = 0; d < model.num_dofs(); ++d)
    if (model.f[d] != 0.0) targets.push_back(d / 2);
  if (model.output) targets.push_back(model.output->dof / 2);
  if (targets.empty()) return false;
  for (int n : targets) {
    bool ok = false;
    for (int c : grid.node_cells(n))
      if (c != kNoCell && label[c] >= 0 && supported[label[c]]) ok = true;
    if (!ok) return false;
  }
  return true;
}

std::string report_text(const RunSummary& s) {
  const auto& st = s.sls.state;
  const auto& c = s.config;
  std::string o = "[report]\n";
  auto kv = [&](const std::string& k, const std::string& v) { o += k + " = " + v + "\n"; };
  kv("name", c.name);
  kv("status", to_string(st.status));
  kv("cols", std::to_string(c.n_cols));
  kv("rows", std::to_string(c.n_rows));
  kv("cs", g17(c.cs));
  kv("polarity", to_string(c.polarity));
  kv("alpha", g17(st.masks.alpha));
  kv("eta", g17(st.masks.eta));
  kv("min_ls", g17(c.sls.spec.min_ls));
  kv("max_ls", g17(c.sls.spec.max_ls));
  kv("p", std::to_string(c.sls.spec.p));
  kv("phi", g17(s.phi_gray));
  kv("phi_projected", g17(s.projected.phi));
  kv("phi_drift", g17(s.phi_drift));
  kv("vf", g17(st.vf));
  kv("g1", g17(s.sls.g1));
  kv("gmin", g17(s.sls.gmin));
  kv("gmax", g17(s.sls.gmax));
  kv("eps1", g17(st.eps1));
  kv("eps2", g17(st.eps2));
  kv("bwi", g17(s.bwi));
  kv("masks", std::to_string(st.masks.size()));
  kv("evals", std::to_string(st.evals_used));
  kv("steps", std::to_string(st.steps.size()));
  kv("stage1_exhausted", st.stage1_exhausted ? "true" : "false");
  kv("skeleton_cells", std::to_string(s.sls.skeleton.skeleton_cells.size()));
  kv("load_path_connected", s.load_path_connected ? "true" : "false");
  return o;
}

RunSummary run_pipeline(const RunConfig& cfg, const std::filesystem::path& outdir, const SlsProgress& progress) {
  cfg.validate();
  RunSummary s;
  s.config = cfg;
  s.grid = build_grid(cfg);
  Analysis an(build_model(cfg, s.grid));
  const MaskSet init = initial_masks(cfg, *s.grid);
  s.sls = run_sls(an, cfg.sls, init, progress);

  s.phi_gray = s.sls.phi;
  s.bwi = bwi(s.sls.field);
  s.projected = project_with_min_ls(s.sls.field, s.sls.regions);
  reevaluate(s.projected, an, cfg.sls.kind, cfg.sls.S);
  s.projected.boundary = smooth_boundary(*s.grid, s.projected, 20);
  s.phi_drift = std::abs(s.projected.phi - s.phi_gray) / std::max(std::abs(s.phi_gray), 1e-300);
  s.load_path_connected =
      supports_connected_to_loads(*s.grid, an.model(), BinaryField::from_density(s.sls.field));

  if (outdir.empty()) return s;
  const auto& grid = *s.grid;
  SvgLayers fin;
  fin.masks = &s.sls.state.masks;
  fin.regions = &s.sls.regions;
  fin.boundary = &s.projected.boundary;
  fin.spec = &cfg.sls.spec;
  fin.title = cfg.name + " final";
  write_file_atomic(outdir / "final.svg", render_svg(grid, s.sls.field, fin));

  SvgLayers sk;
  sk.skeleton = &s.sls.skeleton.skeleton_cells;
  sk.regions = &s.sls.regions;
  sk.spec = &cfg.sls.spec;
  sk.title = cfg.name + " skeleton";
  DensityField bin;
  bin.rho_min = s.sls.field.rho_min;
  for (auto f : BinaryField::from_density(s.sls.field).filled) bin.rho.push_back(f ? 1.0 : 0.0);
  write_file_atomic(outdir / "skeleton.svg", render_svg(grid, bin, sk));

  write_file_atomic(outdir / "history.csv", history_csv(s.sls.state.history));
  write_file_atomic(outdir / "masks.csv", masks_csv(s.sls.state.masks));
  write_file_atomic(outdir / "density.csv", density_csv(grid, s.sls.field));
  write_file_atomic(outdir / "report.txt", report_text(s));
  return s;
}

std::string render_saved_state(const std::filesystem::path& dir) {
  const auto rep = IniDocument::load(dir / "report.txt");
  auto get = [&](const char* key) -> std::string {
    const IniEntry* e = rep.find("report", key);
    if (!e) throw std::runtime_error((dir / "report.txt").string() + ": missing '" + key + "'");
    return e->value;
  };
  const int cols = std::stoi(get("cols")), rows = std::stoi(get("rows"));
  const double cs = std::stod(get("cs"));
  const auto table = parse_density_csv(read_file(dir / "density.csv"));
  if (table.n_cols != cols || table.n_rows != rows) throw std::runtime_error("density.csv does not match report.txt grid");
  const auto grid = HexGrid::build(cols, rows, cs);
  MaskSet masks;
  SvgLayers L;
  if (std::filesystem::exists(dir / "masks.csv")) {
    masks = parse_masks_csv(read_file(dir / "masks.csv"));
    L.masks = &masks;
  }
  L.title = get("name") + " final";
  return render_svg(grid, table.field, L);
}

}  // namespace hexmask::io
