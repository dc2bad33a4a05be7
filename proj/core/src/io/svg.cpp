#include "hexmask/io/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <stdexcept>

namespace hexmask::io {

namespace {

std::string f3(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  // avoid "-0.000"
  if (std::string(buf) == "-0.000") return "0.000";
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Frame {
  Box b;
  double s;
  double margin;
  double X(double x) const { return margin + (x - b.xmin) * s; }
  double Y(double y) const { return margin + (b.ymax - y) * s; }
};

std::string gray(double rho) {
  const int g = static_cast<int>(std::lround(255.0 * std::clamp(1.0 - rho, 0.0, 1.0)));
  char buf[16];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", g, g, g);
  return buf;
}

}  // namespace

std::string render_svg(const HexGrid& grid, const DensityField& field, const SvgLayers& L) {
  if (field.size() != static_cast<std::size_t>(grid.num_cells())) throw std::invalid_argument("field size mismatch");
  if (!(L.px_per_unit > 0.0)) throw std::invalid_argument("px_per_unit must be positive");
  const Frame fr{grid.bounds(), L.px_per_unit, 2.0 * L.px_per_unit};
  const double W = fr.b.width() * fr.s + 2 * fr.margin;
  const double H = fr.b.height() * fr.s + 2 * fr.margin;

  std::string o;
  o.reserve(static_cast<std::size_t>(grid.num_cells()) * 120);
  o += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  o += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" + f3(W) + "\" height=\"" + f3(H) +
       "\" viewBox=\"0 0 " + f3(W) + " " + f3(H) + "\">\n";
  if (!L.title.empty()) o += "<title>" + escape(L.title) + "</title>\n";
  o += "<rect x=\"0\" y=\"0\" width=\"" + f3(W) + "\" height=\"" + f3(H) + "\" fill=\"#ffffff\"/>\n";

  o += "<g id=\"cells\" stroke=\"none\">\n";
  for (const auto& c : grid.cells()) {
    const auto poly = grid.cell_polygon(c.id);
    o += "<polygon points=\"";
    for (int k = 0; k < 6; ++k) {
      if (k) o += ' ';
      o += f3(fr.X(poly[k].x)) + "," + f3(fr.Y(poly[k].y));
    }
    o += "\" fill=\"" + gray(field.rho[c.id]) + "\"/>\n";
  }
  o += "</g>\n";

  if (L.skeleton) {
    o += "<g id=\"skeleton\" fill=\"#2ca02c\" stroke=\"none\">\n";
    const double r = 0.45 * grid.cs() * fr.s;
    for (int id : *L.skeleton) {
      const Vec2 p = grid.centroid(id);
      o += "<circle cx=\"" + f3(fr.X(p.x)) + "\" cy=\"" + f3(fr.Y(p.y)) + "\" r=\"" + f3(r) + "\"/>\n";
    }
    o += "</g>\n";
  }

  if (L.masks) {
    o += "<g id=\"masks\" fill=\"none\" stroke=\"" +
         std::string(L.masks->polarity == Polarity::negative ? "#d62728" : "#1f77b4") + "\" stroke-width=\"1\">\n";
    for (const auto& m : L.masks->masks) {
      const double deg = -m.theta * 180.0 / std::numbers::pi;  // y axis flips
      o += "<ellipse cx=\"" + f3(fr.X(m.x)) + "\" cy=\"" + f3(fr.Y(m.y)) + "\" rx=\"" + f3(m.a * fr.s) + "\" ry=\"" +
           f3(m.b * fr.s) + "\" transform=\"rotate(" + f3(deg) + " " + f3(fr.X(m.x)) + " " + f3(fr.Y(m.y)) + ")\"/>\n";
    }
    o += "</g>\n";
  }

  if (L.regions) {
    const auto v = violations(field, *L.regions);
    const double h = 0.5 * grid.cs() * fr.s;
    o += "<g id=\"min-violations\" fill=\"none\" stroke=\"#1f3fff\" stroke-width=\"1\">\n";
    for (int id : v.min_side) {
      const Vec2 p = grid.centroid(id);
      o += "<rect class=\"vmin\" x=\"" + f3(fr.X(p.x) - h) + "\" y=\"" + f3(fr.Y(p.y) - h) + "\" width=\"" + f3(2 * h) +
           "\" height=\"" + f3(2 * h) + "\"/>\n";
    }
    o += "</g>\n<g id=\"max-violations\" fill=\"none\" stroke=\"#e0201f\" stroke-width=\"1\">\n";
    for (int id : v.max_side) {
      const Vec2 p = grid.centroid(id);
      o += "<circle class=\"vmax\" cx=\"" + f3(fr.X(p.x)) + "\" cy=\"" + f3(fr.Y(p.y)) + "\" r=\"" + f3(h) + "\"/>\n";
    }
    o += "</g>\n";
  }

  if (L.boundary) {
    o += "<g id=\"smoothed-boundary\" fill=\"none\" stroke=\"#ff7f0e\" stroke-width=\"1.5\">\n";
    for (const auto& pl : *L.boundary) {
      if (pl.points.empty()) continue;
      o += pl.closed ? "<polygon points=\"" : "<polyline points=\"";
      for (std::size_t i = 0; i < pl.points.size(); ++i) {
        if (i) o += ' ';
        o += f3(fr.X(pl.points[i].x)) + "," + f3(fr.Y(pl.points[i].y));
      }
      o += "\"/>\n";
    }
    o += "</g>\n";
  }

  if (L.spec) {
    const double rmax = L.spec->max_ls * fr.s, rmin = L.spec->min_ls * fr.s;
    const double cx = W - fr.margin - rmax, cy = fr.margin + rmax;
    o += "<g id=\"length-scales\" fill=\"none\" stroke-width=\"1.5\">\n";
    o += "<circle cx=\"" + f3(cx) + "\" cy=\"" + f3(cy) + "\" r=\"" + f3(rmax) + "\" stroke=\"#e0201f\"/>\n";
    o += "<circle cx=\"" + f3(cx) + "\" cy=\"" + f3(cy) + "\" r=\"" + f3(rmin) + "\" stroke=\"#1f3fff\"/>\n";
    o += "</g>\n";
  }

  o += "</svg>\n";
  return o;
}

}  // namespace hexmask::io
