#include "hexmask/io/csv.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace hexmask::io {

namespace {

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

double num(const std::string& s, int line) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw std::runtime_error("line " + std::to_string(line) + ": bad number '" + s + "'");
  }
}

// Calls f(fields, line) for each data row after checking the header.
template <class F>
void each_row(const std::string& text, const std::string& header, F&& f) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  if (!std::getline(in, line)) throw std::runtime_error("empty CSV");
  ++lineno;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != header) throw std::runtime_error("line 1: expected header '" + header + "'");
  const std::size_t ncols = split_csv(header).size();
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    auto fields = split_csv(line);
    if (fields.size() != ncols)
      throw std::runtime_error("line " + std::to_string(lineno) + ": expected " + std::to_string(ncols) + " fields");
    f(fields, lineno);
  }
}

}  // namespace

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << content;
    if (!out.flush()) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string density_csv(const HexGrid& grid, const DensityField& field) {
  if (field.size() != static_cast<std::size_t>(grid.num_cells())) throw std::invalid_argument("field size mismatch");
  std::string out = "row,col,density\n";
  for (const auto& c : grid.cells())
    out += std::to_string(c.row) + "," + std::to_string(c.col) + "," + fmt("%.6g", field.rho[c.id]) + "\n";
  return out;
}

DensityTable parse_density_csv(const std::string& text) {
  struct Entry {
    int row, col;
    double rho;
  };
  std::vector<Entry> entries;
  int max_row = -1, max_col = -1;
  each_row(text, "row,col,density", [&](const std::vector<std::string>& f, int line) {
    const double r = num(f[0], line), c = num(f[1], line), v = num(f[2], line);
    if (r < 0 || c < 0 || r != static_cast<int>(r) || c != static_cast<int>(c))
      throw std::runtime_error("line " + std::to_string(line) + ": row and col must be non-negative integers");
    if (v < 0.0 || v > 1.0) throw std::runtime_error("line " + std::to_string(line) + ": density outside [0, 1]");
    entries.push_back({static_cast<int>(r), static_cast<int>(c), v});
    max_row = std::max(max_row, static_cast<int>(r));
    max_col = std::max(max_col, static_cast<int>(c));
  });
  DensityTable t;
  t.n_rows = max_row + 1;
  t.n_cols = max_col + 1;
  const std::size_t n = static_cast<std::size_t>(t.n_rows) * t.n_cols;
  if (n == 0 || entries.size() != n) throw std::runtime_error("density CSV does not cover a full rectangular grid");
  t.field.rho.assign(n, -1.0);
  for (const auto& e : entries) {
    double& slot = t.field.rho[static_cast<std::size_t>(e.row) * t.n_cols + e.col];
    if (slot >= 0.0) throw std::runtime_error("duplicate cell " + std::to_string(e.row) + "," + std::to_string(e.col));
    slot = e.rho;
  }
  return t;
}

std::string masks_csv(const MaskSet& masks) {
  std::string out = "id,polarity,x,y,a,b,theta\n";
  const std::string pol = to_string(masks.polarity);
  for (std::size_t j = 0; j < masks.size(); ++j) {
    const auto& m = masks.masks[j];
    out += std::to_string(j) + "," + pol;
    for (double v : {m.x, m.y, m.a, m.b, m.theta}) out += "," + fmt("%.17g", v);
    out += "\n";
  }
  return out;
}

MaskSet parse_masks_csv(const std::string& text) {
  MaskSet s;
  bool first = true;
  each_row(text, "id,polarity,x,y,a,b,theta", [&](const std::vector<std::string>& f, int line) {
    const Polarity p = parse_polarity(f[1]);
    if (first) s.polarity = p;
    else if (p != s.polarity) throw std::runtime_error("line " + std::to_string(line) + ": mixed polarities");
    first = false;
    s.masks.push_back({num(f[2], line), num(f[3], line), num(f[4], line), num(f[5], line), num(f[6], line)});
  });
  return s;
}

std::string history_csv(const std::vector<HistoryRow>& rows) {
  std::string out = std::string(kHistoryHeader) + "\n";
  for (const auto& r : rows) {
    out += std::to_string(r.eval);
    for (double v : {r.phi, r.g1, r.gmin, r.gmax, r.vf, r.eps1, r.eps2, r.bwi}) out += "," + fmt("%.17g", v);
    out += "\n";
  }
  return out;
}

std::vector<HistoryRow> parse_history_csv(const std::string& text) {
  std::vector<HistoryRow> rows;
  each_row(text, kHistoryHeader, [&](const std::vector<std::string>& f, int line) {
    HistoryRow r;
    r.eval = static_cast<int>(num(f[0], line));
    r.phi = num(f[1], line);
    r.g1 = num(f[2], line);
    r.gmin = num(f[3], line);
    r.gmax = num(f[4], line);
    r.vf = num(f[5], line);
    r.eps1 = num(f[6], line);
    r.eps2 = num(f[7], line);
    r.bwi = num(f[8], line);
    rows.push_back(r);
  });
  return rows;
}

std::string cells_csv(const HexGrid& grid, const std::vector<int>& ids) {
  std::string out = "row,col\n";
  for (int id : ids) {
    const auto& c = grid.cell(id);
    out += std::to_string(c.row) + "," + std::to_string(c.col) + "\n";
  }
  return out;
}

}  // namespace hexmask::io
