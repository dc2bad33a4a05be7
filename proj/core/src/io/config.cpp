#include "hexmask/io/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace hexmask::io {

ConfigError::ConfigError(const std::string& source, int line, const std::string& what)
    : std::runtime_error(source + ":" + std::to_string(line) + ": " + what), line_(line) {}

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_ws(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  for (std::string t; in >> t;) out.push_back(t);
  return out;
}

std::vector<std::string> split_on(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(trim(cur));
  return out;
}

bool to_double(const std::string& s, double& out) {
  const char* b = s.data();
  const char* e = b + s.size();
  auto [p, ec] = std::from_chars(b, e, out);
  return ec == std::errc() && p == e && std::isfinite(out);
}

bool to_int(const std::string& s, long long& out) {
  const char* b = s.data();
  const char* e = b + s.size();
  auto [p, ec] = std::from_chars(b, e, out);
  return ec == std::errc() && p == e;
}

}  // namespace

IniDocument IniDocument::parse(std::string_view text, std::string source) {
  IniDocument doc;
  doc.source = std::move(source);
  int lineno = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++lineno;
    const auto hash = raw.find_first_of("#;");
    std::string line = trim(raw.substr(0, hash));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(doc.source, lineno, "unterminated section header");
      const std::string name = trim(std::string_view(line).substr(1, line.size() - 2));
      if (name.empty()) throw ConfigError(doc.source, lineno, "empty section name");
      if (doc.section(name)) throw ConfigError(doc.source, lineno, "duplicate section [" + name + "]");
      doc.sections.push_back({name, lineno, {}});
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(doc.source, lineno, "expected 'key = value'");
    if (doc.sections.empty()) throw ConfigError(doc.source, lineno, "entry outside of a section");
    IniEntry e{trim(std::string_view(line).substr(0, eq)), trim(std::string_view(line).substr(eq + 1)), lineno};
    if (e.key.empty()) throw ConfigError(doc.source, lineno, "empty key");
    doc.sections.back().entries.push_back(std::move(e));
  }
  return doc;
}

IniDocument IniDocument::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path.string());
}

const IniSection* IniDocument::section(std::string_view name) const {
  for (const auto& s : sections)
    if (s.name == name) return &s;
  return nullptr;
}

const IniEntry* IniDocument::find(std::string_view sec, std::string_view key) const {
  const IniSection* s = section(sec);
  if (!s) return nullptr;
  const IniEntry* hit = nullptr;
  for (const auto& e : s->entries)
    if (e.key == key) hit = &e;
  return hit;
}

std::vector<const IniEntry*> IniDocument::find_all(std::string_view sec, std::string_view key) const {
  std::vector<const IniEntry*> out;
  if (const IniSection* s = section(sec))
    for (const auto& e : s->entries)
      if (e.key == key) out.push_back(&e);
  return out;
}

Selector parse_selector(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw std::invalid_argument("selector '" + text + "' lacks a kind prefix");
  const std::string kind = text.substr(0, colon);
  const std::string arg = text.substr(colon + 1);
  Selector s;
  s.text = text;
  std::size_t want = 0;
  if (kind == "edge") {
    s.kind = Selector::Kind::edge;
    if (arg != "left" && arg != "right" && arg != "top" && arg != "bottom")
      throw std::invalid_argument("unknown edge '" + arg + "'");
    s.edge = arg;
    return s;
  } else if (kind == "at") {
    s.kind = Selector::Kind::at;
    want = 2;
  } else if (kind == "near") {
    s.kind = Selector::Kind::near;
    want = 2;
  } else if (kind == "box") {
    s.kind = Selector::Kind::box;
    want = 4;
  } else {
    throw std::invalid_argument("unknown selector kind '" + kind + "'");
  }
  for (const auto& part : split_on(arg, ',')) {
    double v = 0.0;
    if (!to_double(part, v)) throw std::invalid_argument("bad number '" + part + "' in selector");
    s.v.push_back(v);
  }
  if (s.v.size() != want) throw std::invalid_argument("selector '" + text + "' expects " + std::to_string(want) + " numbers");
  return s;
}

std::vector<int> select_nodes(const HexGrid& grid, const Selector& sel) {
  const Box b = grid.bounds();
  const double tol = 1e-9 * grid.cs();
  std::vector<int> out;
  auto nearest = [&](Vec2 p) {
    int best = 0;
    double bd = std::numeric_limits<double>::infinity();
    for (int n = 0; n < grid.num_nodes(); ++n) {
      const double d = distance(grid.node(n), p);
      if (d < bd - tol) {
        bd = d;
        best = n;
      }
    }
    return best;
  };
  switch (sel.kind) {
    case Selector::Kind::edge: {
      // The boundary zig-zags by one lattice step.
      const double hx = 0.5 * grid.pitch() + tol, hy = 0.5 * grid.cs() + tol;
      for (int n = 0; n < grid.num_nodes(); ++n) {
        if (!grid.is_boundary_node(n)) continue;
        const Vec2 p = grid.node(n);
        const bool hit = (sel.edge == "left" && p.x <= b.xmin + hx) || (sel.edge == "right" && p.x >= b.xmax - hx) ||
                         (sel.edge == "bottom" && p.y <= b.ymin + hy) || (sel.edge == "top" && p.y >= b.ymax - hy);
        if (hit) out.push_back(n);
      }
      break;
    }
    case Selector::Kind::at:
      out.push_back(nearest({b.xmin + sel.v[0] * b.width(), b.ymin + sel.v[1] * b.height()}));
      break;
    case Selector::Kind::near:
      out.push_back(nearest({sel.v[0], sel.v[1]}));
      break;
    case Selector::Kind::box:
      for (int n = 0; n < grid.num_nodes(); ++n) {
        const Vec2 p = grid.node(n);
        if (p.x >= sel.v[0] - tol && p.x <= sel.v[2] + tol && p.y >= sel.v[1] - tol && p.y <= sel.v[3] + tol)
          out.push_back(n);
      }
      break;
  }
  return out;
}

void RunConfig::validate() const {
  if (n_cols < 1 || n_rows < 1 || !(cs > 0.0)) throw std::invalid_argument("grid needs cols, rows >= 1 and cs > 0");
  if (fixes.empty()) throw std::invalid_argument("no supports given");
  if (loads.empty()) throw std::invalid_argument("no loads given");
  if (sls.kind == ObjectiveKind::mechanism && !output) throw std::invalid_argument("mechanism objective needs an output port");
  if (masks_x < 0 || masks_y < 0) throw std::invalid_argument("mask counts must be non-negative");
  if (!(initial_axis > 0.0)) throw std::invalid_argument("initial_axis must be positive");
  if (!(alpha > 0.0) || eta < 1.0) throw std::invalid_argument("need alpha > 0 and eta >= 1");
  sls.validate();
}

namespace {

class Reader {
 public:
  explicit Reader(const IniDocument& doc) : doc_(doc) {}

  [[noreturn]] void fail(const IniEntry& e, const std::string& what) const { throw ConfigError(doc_.source, e.line, what); }
  [[noreturn]] void fail(int line, const std::string& what) const { throw ConfigError(doc_.source, line, what); }

  bool number(std::string_view sec, std::string_view key, double& out) const {
    const IniEntry* e = doc_.find(sec, key);
    if (!e) return false;
    if (!to_double(e->value, out)) fail(*e, std::string(key) + ": expected a number, got '" + e->value + "'");
    return true;
  }

  template <class Int>
  bool integer(std::string_view sec, std::string_view key, Int& out) const {
    const IniEntry* e = doc_.find(sec, key);
    if (!e) return false;
    long long v = 0;
    if (!to_int(e->value, v)) fail(*e, std::string(key) + ": expected an integer, got '" + e->value + "'");
    out = static_cast<Int>(v);
    return true;
  }

  bool text(std::string_view sec, std::string_view key, std::string& out) const {
    const IniEntry* e = doc_.find(sec, key);
    if (!e) return false;
    out = e->value;
    return true;
  }

  // "4cs" -> (4, true); "3.8" -> (3.8, false)
  bool length(std::string_view sec, std::string_view key, double& value, bool& in_cs) const {
    const IniEntry* e = doc_.find(sec, key);
    if (!e) return false;
    std::string v = e->value;
    in_cs = v.size() > 2 && v.compare(v.size() - 2, 2, "cs") == 0;
    if (in_cs) v = trim(v.substr(0, v.size() - 2));
    if (!to_double(v, value) || !(value > 0.0)) fail(*e, std::string(key) + ": expected a positive length, got '" + e->value + "'");
    return true;
  }

  Selector selector(const IniEntry& e, const std::string& s) const {
    try {
      return parse_selector(s);
    } catch (const std::invalid_argument& ex) {
      fail(e, ex.what());
    }
  }

  void check_known(const std::vector<std::pair<std::string, std::vector<std::string>>>& known) const {
    for (const auto& sec : doc_.sections) {
      auto it = std::find_if(known.begin(), known.end(), [&](const auto& k) { return k.first == sec.name; });
      if (it == known.end()) fail(sec.line, "unknown section [" + sec.name + "]");
      for (const auto& e : sec.entries)
        if (std::find(it->second.begin(), it->second.end(), e.key) == it->second.end())
          fail(e, "unknown key '" + e.key + "' in [" + sec.name + "]");
    }
  }

 private:
  const IniDocument& doc_;
};

PortSpec parse_port(const Reader& r, const IniEntry& e, bool with_sign) {
  const auto tok = split_ws(e.value);
  if (tok.size() != (with_sign ? 3u : 2u))
    r.fail(e, e.key + ": expected '<selector> <x|y>" + std::string(with_sign ? " <sign>'" : "'"));
  PortSpec p;
  p.line = e.line;
  p.where = r.selector(e, tok[0]);
  if (tok[1] == "x") p.component = 0;
  else if (tok[1] == "y") p.component = 1;
  else r.fail(e, e.key + ": component must be x or y");
  if (with_sign && (!to_double(tok[2], p.sign) || p.sign == 0.0)) r.fail(e, e.key + ": sign must be a nonzero number");
  return p;
}

}  // namespace

RunConfig parse_run_config(const IniDocument& doc) {
  Reader r(doc);
  r.check_known({
      {"run", {"name", "outdir", "seed"}},
      {"grid", {"cols", "rows", "cs"}},
      {"material", {"E", "nu", "thickness"}},
      {"supports", {"fix"}},
      {"loads", {"load"}},
      {"objective", {"kind", "S", "input", "output", "k_in", "k_out"}},
      {"masks", {"polarity", "shape", "nx", "ny", "initial_axis", "alpha", "eta", "continuation", "min_axis", "max_axis"}},
      {"lengthscale", {"min_ls", "max_ls", "p"}},
      {"sls",
       {"vf_init", "vf_min", "vf_max", "tol_init", "delta_eps", "eps_int", "stage_budget", "total_budget",
        "max_stage1_passes", "sed_threshold", "volume_backoff", "volume_scale", "constraint_scale", "refresh", "rho_min"}},
  });

  RunConfig c;
  r.text("run", "name", c.name);
  r.text("run", "outdir", c.outdir);
  r.integer("run", "seed", c.seed);

  const IniSection* grid = doc.section("grid");
  if (!grid) throw ConfigError(doc.source, 1, "missing [grid] section");
  if (!r.integer("grid", "cols", c.n_cols)) r.fail(grid->line, "[grid] needs cols");
  if (!r.integer("grid", "rows", c.n_rows)) r.fail(grid->line, "[grid] needs rows");
  if (!r.number("grid", "cs", c.cs)) r.fail(grid->line, "[grid] needs cs");
  if (c.n_cols < 1 || c.n_rows < 1 || !(c.cs > 0.0)) r.fail(grid->line, "grid dimensions must be positive");

  r.number("material", "E", c.material.E);
  r.number("material", "nu", c.material.nu);
  r.number("material", "thickness", c.material.thickness);

  for (const IniEntry* e : doc.find_all("supports", "fix")) {
    const auto tok = split_ws(e->value);
    if (tok.size() != 2) r.fail(*e, "fix: expected '<selector> <x|y|xy>'");
    FixSpec f;
    f.line = e->line;
    f.where = r.selector(*e, tok[0]);
    f.x = tok[1].find('x') != std::string::npos;
    f.y = tok[1].find('y') != std::string::npos;
    if ((!f.x && !f.y) || tok[1].find_first_not_of("xy") != std::string::npos) r.fail(*e, "fix: components must be x, y or xy");
    c.fixes.push_back(f);
  }
  for (const IniEntry* e : doc.find_all("loads", "load")) {
    const auto tok = split_ws(e->value);
    if (tok.size() != 3) r.fail(*e, "load: expected '<selector> <fx> <fy>'");
    LoadSpec l;
    l.line = e->line;
    l.where = r.selector(*e, tok[0]);
    if (!to_double(tok[1], l.fx) || !to_double(tok[2], l.fy)) r.fail(*e, "load: bad force component");
    c.loads.push_back(l);
  }

  std::string s;
  if (const IniEntry* e = doc.find("objective", "kind")) {
    if (e->value == "compliance") c.sls.kind = ObjectiveKind::compliance;
    else if (e->value == "mechanism") c.sls.kind = ObjectiveKind::mechanism;
    else r.fail(*e, "kind must be compliance or mechanism");
  }
  r.number("objective", "S", c.sls.S);
  if (const IniEntry* e = doc.find("objective", "input")) c.input = parse_port(r, *e, false);
  if (const IniEntry* e = doc.find("objective", "output")) c.output = parse_port(r, *e, true);
  r.number("objective", "k_in", c.k_in);
  r.number("objective", "k_out", c.k_out);

  if (const IniEntry* e = doc.find("masks", "polarity")) {
    try {
      c.polarity = parse_polarity(e->value);
    } catch (const std::invalid_argument& ex) {
      r.fail(*e, ex.what());
    }
  }
  if (const IniEntry* e = doc.find("masks", "shape")) {
    if (e->value == "elliptical") c.shape = MaskShape::elliptical;
    else if (e->value == "circular") c.shape = MaskShape::circular;
    else r.fail(*e, "shape must be elliptical or circular");
  }
  r.integer("masks", "nx", c.masks_x);
  r.integer("masks", "ny", c.masks_y);
  r.number("masks", "initial_axis", c.initial_axis);
  r.number("masks", "alpha", c.alpha);
  r.number("masks", "eta", c.eta);
  r.number("masks", "min_axis", c.sls.min_axis);
  r.number("masks", "max_axis", c.sls.max_axis);
  if (const IniEntry* e = doc.find("masks", "continuation")) {
    for (const auto& part : split_on(e->value, ',')) {
      double a = 0.0;
      if (!to_double(part, a) || !(a > 0.0)) r.fail(*e, "continuation: expected comma-separated positive alphas");
      c.sls.continuation.push_back(a);
    }
  }

  bool in_cs = false;
  double v = 0.0;
  if (r.length("lengthscale", "min_ls", v, in_cs)) {
    c.min_ls_cs = in_cs ? v : 0.0;
    c.sls.spec.min_ls = in_cs ? v * c.cs : v;
  }
  if (r.length("lengthscale", "max_ls", v, in_cs)) {
    c.max_ls_cs = in_cs ? v : 0.0;
    c.sls.spec.max_ls = in_cs ? v * c.cs : v;
  }
  r.integer("lengthscale", "p", c.sls.spec.p);

  r.number("sls", "vf_init", c.sls.vf_init);
  r.number("sls", "vf_min", c.sls.vf_min);
  r.number("sls", "vf_max", c.sls.vf_max);
  r.number("sls", "tol_init", c.sls.tol_init);
  r.number("sls", "delta_eps", c.sls.delta_eps);
  if (!r.number("sls", "eps_int", c.sls.eps_int)) c.sls.eps_int = c.sls.tol_init;
  r.integer("sls", "stage_budget", c.sls.stage_budget);
  r.integer("sls", "total_budget", c.sls.total_budget);
  r.integer("sls", "max_stage1_passes", c.sls.max_stage1_passes);
  r.number("sls", "sed_threshold", c.sls.sed_threshold);
  r.number("sls", "volume_backoff", c.sls.volume_backoff);
  r.number("sls", "volume_scale", c.sls.volume_scale);
  r.number("sls", "constraint_scale", c.sls.constraint_scale);
  r.number("sls", "rho_min", c.sls.rho_min);
  if (const IniEntry* e = doc.find("sls", "refresh")) {
    if (e->value == "outer") c.sls.refresh = RegionRefresh::outer;
    else if (e->value == "step") c.sls.refresh = RegionRefresh::step;
    else r.fail(*e, "refresh must be outer or step");
  }

  try {
    c.validate();
  } catch (const std::invalid_argument& ex) {
    throw ConfigError(doc.source, 1, ex.what());
  }
  // Every selector must hit at least one node of the configured grid.
  const auto g = build_grid(c);
  for (const auto& f : c.fixes)
    if (select_nodes(*g, f.where).empty()) r.fail(f.line, "selector '" + f.where.text + "' matches no node");
  for (const auto& l : c.loads)
    if (select_nodes(*g, l.where).empty()) r.fail(l.line, "selector '" + l.where.text + "' matches no node");
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path) { return parse_run_config(IniDocument::load(path)); }

RunConfig scaled(const RunConfig& cfg, double f) {
  if (!(f > 0.0)) throw std::invalid_argument("scale must be positive");
  RunConfig c = cfg;
  c.n_cols = std::max(1, static_cast<int>(std::lround(cfg.n_cols * f)));
  c.n_rows = std::max(1, static_cast<int>(std::lround(cfg.n_rows * f)));
  c.cs = cfg.cs * static_cast<double>(cfg.n_cols) / c.n_cols;
  if (cfg.masks_x > 0) c.masks_x = std::max(1, static_cast<int>(std::lround(cfg.masks_x * f)));
  if (cfg.masks_y > 0) c.masks_y = std::max(1, static_cast<int>(std::lround(cfg.masks_y * f)));
  if (cfg.min_ls_cs > 0.0) c.sls.spec.min_ls = cfg.min_ls_cs * c.cs;
  if (cfg.max_ls_cs > 0.0) c.sls.spec.max_ls = cfg.max_ls_cs * c.cs;
  return c;
}

std::shared_ptr<const HexGrid> build_grid(const RunConfig& cfg) {
  return std::make_shared<const HexGrid>(HexGrid::build(cfg.n_cols, cfg.n_rows, cfg.cs));
}

FEModel build_model(const RunConfig& cfg, std::shared_ptr<const HexGrid> grid) {
  FEModel m = FEModel::make(grid, cfg.material);
  for (const auto& f : cfg.fixes)
    for (int n : select_nodes(*grid, f.where)) {
      if (f.x) m.fix(2 * n);
      if (f.y) m.fix(2 * n + 1);
    }
  for (const auto& l : cfg.loads) {
    const auto nodes = select_nodes(*grid, l.where);
    // A selector hitting several nodes shares the force evenly.
    const double share = 1.0 / static_cast<double>(nodes.size());
    for (int n : nodes) {
      if (l.fx != 0.0) m.add_force(2 * n, l.fx * share);
      if (l.fy != 0.0) m.add_force(2 * n + 1, l.fy * share);
    }
  }
  if (cfg.input) m.input_dof = 2 * select_nodes(*grid, cfg.input->where).front() + cfg.input->component;
  if (cfg.output) m.output = OutputPort{2 * select_nodes(*grid, cfg.output->where).front() + cfg.output->component, cfg.output->sign};
  m.k_in = cfg.k_in;
  m.k_out = cfg.k_out;
  return m;
}

MaskSet initial_masks(const RunConfig& cfg, const HexGrid& grid) {
  const Box b = grid.bounds();
  const int nx = cfg.masks_x > 0 ? cfg.masks_x : masks_along(b.width());
  const int ny = cfg.masks_y > 0 ? cfg.masks_y : masks_along(b.height());
  const double lo = cfg.sls.min_axis > 0.0 ? cfg.sls.min_axis : default_min_axis(cfg.polarity, cfg.sls.spec.min_ls);
  const double axis = std::clamp(cfg.initial_axis, lo, cfg.sls.max_axis);
  return even_layout(b, nx, ny, cfg.polarity, cfg.shape, cfg.alpha, cfg.eta, axis);
}

}  // namespace hexmask::io
