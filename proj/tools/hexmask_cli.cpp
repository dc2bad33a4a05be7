#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>

#include "hexmask/fdcheck.hpp"
#include "hexmask/io/benchmarks.hpp"
#include "hexmask/io/config.hpp"
#include "hexmask/io/csv.hpp"
#include "hexmask/io/run.hpp"
#include "hexmask/io/svg.hpp"
#include "hexmask/skeleton.hpp"
#include "hexmask/truss_oracle.hpp"

namespace fs = std::filesystem;
using namespace hexmask;

namespace {

void print_step(const StepRecord& s) {
  std::printf("stage %-2s alpha %-5g vf %.4f eps %6.1f | phi %-12.6g g1 %-9.3g gmin %-9.3g gmax %-9.3g | %3d evals, %3d masks, %s -> %s\n",
              s.stage == Stage::I ? "I" : "II", s.alpha, s.vf, s.eps1, s.phi, s.g1, s.gmin, s.gmax, s.evals, s.masks,
              to_string(s.optimizer).c_str(), s.action.c_str());
  std::fflush(stdout);
}

int run_config(const io::RunConfig& cfg, const std::string& outdir, bool quiet) {
  const fs::path out = outdir.empty() ? fs::path(cfg.outdir) : fs::path(outdir);
  std::printf("%s: %dx%d cells, cs %g, %s masks, min_ls %g, max_ls %g, p %d\n", cfg.name.c_str(), cfg.n_cols, cfg.n_rows,
              cfg.cs, to_string(cfg.polarity).c_str(), cfg.sls.spec.min_ls, cfg.sls.spec.max_ls, cfg.sls.spec.p);
  const auto s = io::run_pipeline(cfg, out, quiet ? SlsProgress{} : SlsProgress{print_step});
  std::cout << io::report_text(s);
  std::printf("outputs written to %s\n", out.string().c_str());
  return 0;
}

int cmd_analytic(int p, double vstar, double xm, double eps, bool two, bool numeric) {
  truss::TrussSpec spec{p, vstar, xm, eps, two ? truss::Layout::two_member : truss::Layout::three_member};
  spec.validate();
  const auto rep = truss::kkt_solve(spec);
  std::printf("p=%d V*=%g x_m=%g eps1=%g layout=%s  (problem %s)\n", p, vstar, xm, eps, two ? "two-member" : "three-member",
              truss::problem_feasible(spec) ? "feasible" : "infeasible");
  std::printf("%-5s %-9s %-10s %-10s %-10s %-11s %-11s %-11s %s\n", "case", "feasible", "x1", "x2", "x3", "lambda1",
              "lambda2", "SE", "note");
  for (std::size_t i = 0; i < rep.cases.size(); ++i) {
    const auto& c = rep.cases[i];
    std::printf("%-5s %-9s %-10.6g %-10.6g %-10.6g %-11.6g %-11.6g %-11.6g %s%s\n", truss::to_string(c.active).c_str(),
                c.feasible ? "yes" : "no", c.x[0], c.x[1], c.x[2], c.lambda1, c.lambda2, c.strain_energy,
                c.note.c_str(), static_cast<int>(i) == rep.best ? " [best]" : "");
  }
  if (numeric) {
    const auto cc = truss::numeric_cross_check(spec);
    std::printf("optimizer: %s, x = (%.6g, %.6g, %.6g), SE %.8g, g2 %.3g, |x - x_kkt| %.3g\n",
                to_string(cc.numeric.status).c_str(), cc.numeric.x_star[0], cc.numeric.x_star[1], cc.numeric.x_star[2],
                cc.numeric.f_star, cc.g2, cc.x_error);
  }
  return 0;
}

int cmd_skeletonize(const std::string& path, const std::string& out, const std::string& svg, double thr) {
  const auto table = io::parse_density_csv(io::read_file(path));
  const auto grid = HexGrid::build(table.n_cols, table.n_rows, 1.0);
  const auto bin = BinaryField::from_density(table.field, thr);
  const auto sk = skeletonize(grid, bin);
  const auto skb = BinaryField::from_ids(grid.num_cells(), sk.skeleton_cells);
  std::printf("%dx%d grid, %d solid cells -> %zu skeleton cells in %d iterations%s\n", table.n_cols, table.n_rows,
              bin.count(), sk.skeleton_cells.size(), sk.iterations, sk.special_case_triggered ? " (special case)" : "");
  std::printf("solid components %d -> %d, void components %d -> %d\n", count_solid_components(grid, bin),
              count_solid_components(grid, skb), count_void_components(grid, bin), count_void_components(grid, skb));
  const std::string csv = io::cells_csv(grid, sk.skeleton_cells);
  if (out.empty()) std::cout << csv;
  else io::write_file_atomic(out, csv);
  if (!svg.empty()) {
    io::SvgLayers L;
    L.skeleton = &sk.skeleton_cells;
    L.title = "skeleton";
    io::write_file_atomic(svg, io::render_svg(grid, table.field, L));
  }
  return 0;
}

int cmd_fd(const io::RunConfig& cfg, double h) {
  auto grid = io::build_grid(cfg);
  Analysis an(io::build_model(cfg, grid));
  MaskSet masks = io::initial_masks(cfg, *grid);
  // Perturb the regular layout so that symmetric cancellations do not hide errors.
  for (std::size_t j = 0; j < masks.size(); ++j) {
    auto& m = masks.masks[j];
    m.a *= 1.1 + 0.07 * static_cast<double>(j % 3);
    m.b *= 1.0 + 0.05 * static_cast<double>(j % 2);
    m.theta = 0.3 * static_cast<double>(j % 5) - 0.6;
  }
  const auto field = evaluate_field(*grid, masks, cfg.sls.rho_min);
  const auto regions = build_regions(*grid, skeletonize(*grid, field), cfg.sls.spec);
  const auto rep = fd_check(an, masks, cfg.sls.kind, cfg.sls.S, &regions, &cfg.sls.spec, cfg.sls.rho_min, h);
  bool ok = true;
  for (const auto& e : rep) {
    std::printf("%-10s max rel error %.3e (var %d: analytic %.10g, fd %.10g)\n", e.name.c_str(), e.max_rel_error,
                e.worst_index, e.analytic, e.numeric);
    ok = ok && e.max_rel_error < 1e-4;
  }
  std::printf("%s\n", ok ? "PASS" : "FAIL");
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hexmask: honeycomb topology optimization with elliptical masks and explicit length scales"};
  app.require_subcommand(1);

  std::string config, outdir, density, skel_out, skel_svg, state, render_out, bench_id;
  double scale = 1.0, thr = 0.5, h = 1e-4;
  bool quiet = false;

  auto* opt = app.add_subcommand("optimize", "full SLS run from a config file");
  opt->add_option("config", config, "run config (.ini)")->required()->check(CLI::ExistingFile);
  opt->add_option("-o,--outdir", outdir, "output directory (default: [run] outdir)");
  opt->add_option("--scale", scale, "scale mesh and mask counts")->check(CLI::PositiveNumber);
  opt->add_flag("-q,--quiet", quiet, "no per-step progress");

  auto* sk = app.add_subcommand("skeletonize", "skeleton of a density.csv (threshold 0.5)");
  sk->add_option("density", density, "row,col,density CSV")->required()->check(CLI::ExistingFile);
  sk->add_option("-o,--out", skel_out, "skeleton row,col CSV (default: stdout)");
  sk->add_option("--svg", skel_svg, "also render an SVG");
  sk->add_option("--threshold", thr, "solid threshold")->check(CLI::Range(0.0, 1.0));

  int p = 2;
  double vstar = 2.0, xm = 0.5, eps = 0.5;
  bool two = false, numeric = false;
  auto* an = app.add_subcommand("analytic", "three-bar truss KKT case table");
  an->add_option("--p", p, "exponent (1 or 2)")->check(CLI::IsMember({1, 2}));
  an->add_option("--vstar", vstar, "volume bound V*");
  an->add_option("--xm", xm, "minimum width x_m");
  an->add_option("--eps", eps, "relaxation eps1");
  an->add_flag("--two-member", two, "two-member skeleton");
  an->add_flag("--numeric", numeric, "also run the optimizer and compare");

  auto* fd = app.add_subcommand("fd-check", "finite-difference gradient check at the initial layout");
  fd->add_option("config", config, "run config (.ini) or benchmark id I..IV")->required();
  fd->add_option("--scale", scale, "scale mesh and mask counts")->check(CLI::PositiveNumber);
  fd->add_option("--step", h, "relative step")->check(CLI::PositiveNumber);

  auto* rd = app.add_subcommand("render", "SVG from a saved output directory");
  rd->add_option("state", state, "directory with report.txt, density.csv, masks.csv")->required()->check(CLI::ExistingDirectory);
  rd->add_option("-o,--out", render_out, "SVG path (default: stdout)");

  auto* bn = app.add_subcommand("bench", "run a shipped benchmark");
  bn->add_option("id", bench_id, "I, II, III or IV")->required()->check(CLI::IsMember({"I", "II", "III", "IV"}));
  bn->add_option("--scale", scale, "scale mesh and mask counts")->check(CLI::PositiveNumber);
  bn->add_option("-o,--outdir", outdir, "output directory (default: out/bench_<id>)");
  bn->add_flag("-q,--quiet", quiet, "no per-step progress");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*opt) {
      auto cfg = io::load_run_config(config);
      if (scale != 1.0) cfg = io::scaled(cfg, scale);
      return run_config(cfg, outdir, quiet);
    }
    if (*sk) return cmd_skeletonize(density, skel_out, skel_svg, thr);
    if (*an) return cmd_analytic(p, vstar, xm, eps, two, numeric);
    if (*fd) {
      const bool is_bench = config == "I" || config == "II" || config == "III" || config == "IV";
      if (!is_bench && !fs::exists(config)) throw std::runtime_error("no such file: " + config);
      auto cfg = is_bench ? io::benchmark_config(config, scale) : io::load_run_config(config);
      if (!is_bench && scale != 1.0) cfg = io::scaled(cfg, scale);
      return cmd_fd(cfg, h);
    }
    if (*rd) {
      const auto svg = io::render_saved_state(state);
      if (render_out.empty()) std::cout << svg;
      else io::write_file_atomic(render_out, svg);
      return 0;
    }
    if (*bn) return run_config(io::benchmark_config(bench_id, scale), outdir, quiet);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
