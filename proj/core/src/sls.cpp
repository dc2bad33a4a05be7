#include "hexmask/sls.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "hexmask/postproc.hpp"

namespace hexmask {

void SLSConfig::validate() const {
  if (!(vf_min > 0.0) || vf_min > vf_max || vf_max > 1.0) throw std::invalid_argument("need 0 < vf_min <= vf_max <= 1");
  if (vf_init < vf_min || vf_init > vf_max) throw std::invalid_argument("vf_init must lie in [vf_min, vf_max]");
  if (!(delta_eps > 0.0)) throw std::invalid_argument("delta_eps must be positive");
  if (!(eps_int >= 0.0) || !(tol_init >= 0.0)) throw std::invalid_argument("tolerances must be non-negative");
  if (stage_budget < 2 || total_budget < 2) throw std::invalid_argument("evaluation budgets too small");
  if (!(constraint_scale >= 0.0) || !(volume_scale >= 0.0)) throw std::invalid_argument("bad constraint scales");
  if (!(volume_backoff >= 0.0) || volume_backoff >= 0.5) throw std::invalid_argument("volume_backoff must lie in [0, 0.5)");
  for (double a : continuation)
    if (!(a > 0.0)) throw std::invalid_argument("continuation alphas must be positive");
  spec.validate();
}

std::string to_string(Stage2Action a) {
  switch (a) {
    case Stage2Action::stop_accept: return "stop";
    case Stage2Action::add_material: return "1b: vf up, eps up";
    case Stage2Action::remove_material: return "1c: vf down, eps up";
    case Stage2Action::relax: return "1d: eps += delta_eps";
    case Stage2Action::raise_volume: return "2: vf up";
  }
  return "?";
}

std::string to_string(SlsStatus s) { return s == SlsStatus::accepted ? "accepted" : "budget-exhausted"; }

double stage1_update(double vf, double gmax, int ncells, double vf_min) {
  return std::max(vf_min, vf - gmax / static_cast<double>(ncells));
}

Stage2Action stage2_step(SLSState& st, const SLSConfig& cfg, int ncells, double g1, double gmin, double gmax) {
  const double n = static_cast<double>(ncells);
  // With vf already at vf_max rule 2 cannot act; the length-scale rules take over.
  if (g1 > 0.0 && st.vf < cfg.vf_max) {
    st.vf = std::min(cfg.vf_max, st.vf + std::max(g1, 1.0) / n);
    return Stage2Action::raise_volume;
  }
  if (g1 > 0.0) {
    st.eps1 += cfg.delta_eps;
    st.eps2 += cfg.delta_eps;
    return Stage2Action::relax;
  }
  const bool min_ok = gmin <= st.eps1;
  const bool max_ok = gmax <= st.eps2;
  if (min_ok && max_ok) return Stage2Action::stop_accept;
  if (!min_ok && max_ok) {
    // A vf pinned at its bound leaves only the tolerance to move, so it moves by delta_eps.
    const double step = st.vf >= cfg.vf_max ? cfg.delta_eps : cfg.eps_int;
    st.vf = std::clamp(st.vf + gmin / n, cfg.vf_min, cfg.vf_max);
    st.eps1 += step;
    st.eps2 += step;
    return Stage2Action::add_material;
  }
  if (min_ok && !max_ok) {
    const double step = st.vf <= cfg.vf_min ? cfg.delta_eps : cfg.eps_int;
    st.vf = std::clamp(st.vf - gmax / n, cfg.vf_min, cfg.vf_max);
    st.eps1 += step;
    st.eps2 += step;
    return Stage2Action::remove_material;
  }
  st.eps1 += cfg.delta_eps;
  st.eps2 += cfg.delta_eps;
  return Stage2Action::relax;
}

MaskSet mask_deletion(const HexGrid& grid, const MaskSet& masks, const std::vector<double>& sed, double threshold) {
  if (masks.polarity != Polarity::positive || masks.size() <= 1) return masks;
  if (sed.size() != static_cast<std::size_t>(grid.num_cells())) throw std::invalid_argument("SED size mismatch");
  std::vector<char> keep(masks.size(), 0);
  for (std::size_t j = 0; j < masks.size(); ++j) {
    const auto& m = masks.masks[j];
    for (const auto& c : grid.cells()) {
      const double d = masks.shape == MaskShape::circular
                           ? (distance(c.centroid, {m.x, m.y}) / m.a) * (distance(c.centroid, {m.x, m.y}) / m.a) - 1.0
                           : signed_measure(m, c.centroid);
      if (d < 0.0 && sed[c.id] >= threshold) {
        keep[j] = 1;
        break;
      }
    }
  }
  MaskSet out = masks;
  out.masks.clear();
  for (std::size_t j = 0; j < masks.size(); ++j)
    if (keep[j]) out.masks.push_back(masks.masks[j]);
  if (out.masks.empty()) out.masks.push_back(masks.masks.front());
  return out;
}

namespace {

struct PostEval {
  DensityField field;
  SkeletonResult skeleton;
  Regions regions;
  double g1 = 0.0, gmin = 0.0, gmax = 0.0;
};

class Driver {
 public:
  Driver(Analysis& an, const SLSConfig& cfg, const MaskSet& initial, const SlsProgress& progress)
      : an_(an), cfg_(cfg), grid_(an.grid()), N_(grid_.num_cells()), progress_(progress) {
    cfg_.validate();
    initial.validate();
    st_.masks = initial;
    st_.vf = cfg_.vf_init;
    st_.eps1 = st_.eps2 = cfg_.tol_init;
    min_axis_ = cfg_.min_axis > 0.0 ? cfg_.min_axis : default_min_axis(initial.polarity, cfg_.spec.min_ls);
    if (min_axis_ > cfg_.max_axis) throw std::invalid_argument("minimum semi-axis exceeds the maximum semi-axis");
    refresh(st_.masks);
  }

  SLSResult run() {
    stage1();
    bool accepted = stage2();
    for (double alpha : cfg_.continuation) {
      if (!budget_left()) break;
      st_.masks.alpha = alpha;
      accepted = stage2();
    }
    st_.status = accepted ? SlsStatus::accepted : SlsStatus::budget_exhausted;
    // Deletion may have followed the last step.
    post_ = post(st_.masks);
    last_phi_ = an_.objective(post_.field, cfg_.kind, cfg_.S).phi;

    SLSResult r;
    r.state = st_;
    r.field = post_.field;
    r.skeleton = post_.skeleton;
    r.regions = post_.regions;
    r.phi = last_phi_;
    r.g1 = post_.g1;
    r.gmin = post_.gmin;
    r.gmax = post_.gmax;
    return r;
  }

 private:
  bool budget_left() const { return cfg_.total_budget - st_.evals_used >= 2; }

  void refresh(const MaskSet& masks) {
    DensityField f = evaluate_field(grid_, masks, cfg_.rho_min);
    auto sk = skeletonize(grid_, f);
    regions_ = build_regions(grid_, sk, cfg_.spec);
  }

  PostEval post(const MaskSet& masks) const {
    PostEval p;
    p.field = evaluate_field(grid_, masks, cfg_.rho_min);
    p.skeleton = skeletonize(grid_, p.field);
    p.regions = build_regions(grid_, p.skeleton, cfg_.spec);
    p.g1 = p.field.volume() - st_.vf * N_;
    p.gmin = g_min(p.field, p.regions, cfg_.spec);
    p.gmax = g_max(p.field, p.regions, cfg_.spec);
    return p;
  }

  NlpResult optimize(bool with_ls, int budget) {
    MaskSet work = st_.masks;
    const Box box = grid_.bounds();
    const auto bnd = design_bounds(work, box, min_axis_, cfg_.max_axis);
    const double V = st_.vf * N_;
    const double V_opt = V * (1.0 - cfg_.volume_backoff);
    const double eps1 = st_.eps1, eps2 = st_.eps2;

    std::vector<double> cached_x;
    DensityField cached;
    double last_phi = 0.0;
    auto field_at = [&](std::span<const double> x) -> const DensityField& {
      if (cached_x.size() != x.size() || !std::equal(x.begin(), x.end(), cached_x.begin())) {
        unpack_design(x, work);
        cached = evaluate_field(grid_, work, cfg_.rho_min);
        cached_x.assign(x.begin(), x.end());
      }
      return cached;
    };
    auto copy_grad = [](const std::vector<double>& src, std::span<double> dst) {
      std::copy(src.begin(), src.end(), dst.begin());
    };

    NlpProblem prob;
    prob.dim = static_cast<int>(bnd.lower.size());
    prob.lower = bnd.lower;
    prob.upper = bnd.upper;
    prob.x0 = pack_design(st_.masks);
    prob.eval_budget = budget;
    prob.objective = [&](std::span<const double> x, std::span<double> g) {
      unpack_design(x, work);
      auto og = objective_and_gradient(an_, work, cfg_.kind, cfg_.S, cfg_.rho_min);
      cached = std::move(og.field);
      cached_x.assign(x.begin(), x.end());
      copy_grad(og.grad, g);
      last_phi = og.phi;
      return og.phi;
    };
    prob.constraints.push_back([&](std::span<const double> x, std::span<double> g) {
      const auto& f = field_at(x);
      copy_grad(pullback(grid_, work, std::vector<double>(N_, 1.0)), g);
      return f.volume() - V_opt;
    });
    const double ls_scale = cfg_.constraint_scale > 0.0 ? cfg_.constraint_scale : std::max({1.0, eps1, 0.01 * N_});
    prob.constraint_scales = {cfg_.volume_scale > 0.0 ? cfg_.volume_scale : std::max(1.0, 0.01 * N_)};
    if (with_ls) {
      prob.constraints.push_back([&](std::span<const double> x, std::span<double> g) {
        const auto& f = field_at(x);
        copy_grad(pullback(grid_, work, g_min_drho(f, regions_, cfg_.spec)), g);
        return g_min(f, regions_, cfg_.spec) - eps1;
      });
      prob.constraints.push_back([&](std::span<const double> x, std::span<double> g) {
        const auto& f = field_at(x);
        copy_grad(pullback(grid_, work, g_max_drho(f, regions_, cfg_.spec)), g);
        return g_max(f, regions_, cfg_.spec) - eps2;
      });
      prob.constraint_scales.push_back(ls_scale);
      prob.constraint_scales.push_back(ls_scale);
    }
    const int base = st_.evals_used;
    prob.on_evaluation = [&](const NlpEvaluation& e) {
      const auto& f = field_at(e.x);
      HistoryRow row;
      row.eval = base + e.index;
      row.phi = e.f;
      row.g1 = f.volume() - V;
      row.gmin = g_min(f, regions_, cfg_.spec);
      row.gmax = g_max(f, regions_, cfg_.spec);
      row.vf = st_.vf;
      row.eps1 = st_.eps1;
      row.eps2 = st_.eps2;
      row.bwi = bwi(f);
      st_.history.push_back(row);
    };
    if (cfg_.refresh == RegionRefresh::outer) {
      prob.on_outer_iteration = [&](std::span<const double> x) {
        MaskSet m = work;
        unpack_design(x, m);
        refresh(m);
      };
    }

    NlpResult res = minimize(prob);
    st_.evals_used += res.evals_used;
    unpack_design(res.x_star, st_.masks);
    for (auto& m : st_.masks.masks) m.theta = wrap_angle(m.theta);
    last_phi_ = res.evals_used > 0 ? res.f_star : last_phi;
    return res;
  }

  StepRecord record(const NlpResult& res, double vf, double e1, double e2) {
    StepRecord s;
    s.stage = st_.stage;
    s.alpha = st_.masks.alpha;
    s.vf = vf;
    s.eps1 = e1;
    s.eps2 = e2;
    s.phi = last_phi_;
    s.g1 = post_.g1;
    s.gmin = post_.gmin;
    s.gmax = post_.gmax;
    s.evals = res.evals_used;
    s.masks = static_cast<int>(st_.masks.size());
    s.optimizer = res.status;
    return s;
  }

  void delete_masks() {
    if (st_.masks.polarity != Polarity::positive) return;
    auto sol = an_.assemble_solve(post_.field);
    const auto sed = strain_energy_density(an_, sol, post_.field);
    st_.masks = mask_deletion(grid_, st_.masks, sed, cfg_.sed_threshold);
  }

  void finish_step(StepRecord& rec) {
    st_.steps.push_back(rec);
    if (progress_) progress_(rec);
  }

  void stage1() {
    st_.stage = Stage::I;
    for (int pass = 0; pass < cfg_.max_stage1_passes && budget_left(); ++pass) {
      if (cfg_.refresh == RegionRefresh::step || pass > 0) refresh(st_.masks);
      const double vf = st_.vf, e1 = st_.eps1, e2 = st_.eps2;
      const auto res = optimize(false, std::min(cfg_.stage_budget, cfg_.total_budget - st_.evals_used));
      post_ = post(st_.masks);
      auto rec = record(res, vf, e1, e2);
      if (post_.gmax <= st_.eps2) {
        rec.action = "max length scale met";
        finish_step(rec);
        delete_masks();
        return;
      }
      if (st_.vf <= cfg_.vf_min) {
        st_.stage1_exhausted = true;
        rec.action = "vf pinned at vf_min, max length scale still violated";
        finish_step(rec);
        delete_masks();
        return;
      }
      st_.vf = stage1_update(st_.vf, post_.gmax, N_, cfg_.vf_min);
      rec.action = "vf reduced";
      finish_step(rec);
      delete_masks();
    }
  }

  bool stage2() {
    st_.stage = Stage::II;
    while (budget_left()) {
      refresh(st_.masks);
      const double vf = st_.vf, e1 = st_.eps1, e2 = st_.eps2;
      const auto res = optimize(true, std::min(cfg_.stage_budget, cfg_.total_budget - st_.evals_used));
      post_ = post(st_.masks);
      const auto action = stage2_step(st_, cfg_, N_, post_.g1, post_.gmin, post_.gmax);
      auto rec = record(res, vf, e1, e2);
      rec.action = to_string(action);
      finish_step(rec);
      if (action == Stage2Action::stop_accept) return true;
      delete_masks();
    }
    return false;
  }

  Analysis& an_;
  SLSConfig cfg_;
  const HexGrid& grid_;
  int N_;
  SlsProgress progress_;
  SLSState st_;
  Regions regions_;
  PostEval post_;
  double min_axis_ = 0.0;
  double last_phi_ = 0.0;
};

}  // namespace

SLSResult run_sls(Analysis& analysis, const SLSConfig& cfg, const MaskSet& initial, const SlsProgress& progress) {
  Driver d(analysis, cfg, initial, progress);
  return d.run();
}

}  // namespace hexmask
