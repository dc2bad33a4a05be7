#include "hexmask/maskfield.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace hexmask {

std::string to_string(Polarity p) { return p == Polarity::negative ? "negative" : "positive"; }

Polarity parse_polarity(const std::string& s) {
  if (s == "negative" || s == "neg") return Polarity::negative;
  if (s == "positive" || s == "pos") return Polarity::positive;
  throw std::invalid_argument("unknown mask polarity '" + s + "'");
}

void MaskSet::validate() const {
  if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be positive");
  if (!(eta >= 1.0)) throw std::invalid_argument("eta must be >= 1");
  for (const auto& m : masks) {
    if (!(m.a > 0.0) || !(m.b > 0.0)) throw std::invalid_argument("mask semi-axes must be positive");
  }
}

double DensityField::volume() const {
  double v = 0.0;
  for (double r : rho) v += r;
  return v;
}

double logistic(double t) {
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

double log_logistic(double t) {
  if (t >= 0.0) return -std::log1p(std::exp(-t));
  return t - std::log1p(std::exp(t));
}

double signed_measure(const EllipticalMask& m, Vec2 p) {
  const double c = std::cos(m.theta), s = std::sin(m.theta);
  const double dx = p.x - m.x, dy = p.y - m.y;
  const double X = dx * c + dy * s;
  const double Y = -dx * s + dy * c;
  return (X / m.a) * (X / m.a) + (Y / m.b) * (Y / m.b) - 1.0;
}

MeasurePartials signed_measure_partials(const EllipticalMask& m, Vec2 p, MaskShape shape) {
  MeasurePartials out;
  const double dx = p.x - m.x, dy = p.y - m.y;
  if (shape == MaskShape::circular) {
    const double r2 = dx * dx + dy * dy;
    const double a2 = m.a * m.a;
    out.d = r2 / a2 - 1.0;
    out.grad = {-2.0 * dx / a2, -2.0 * dy / a2, -2.0 * r2 / (a2 * m.a), 0.0, 0.0};
    return out;
  }
  const double c = std::cos(m.theta), s = std::sin(m.theta);
  const double X = dx * c + dy * s;
  const double Y = -dx * s + dy * c;
  const double a2 = m.a * m.a, b2 = m.b * m.b;
  out.d = X * X / a2 + Y * Y / b2 - 1.0;
  out.grad[0] = -2.0 * X * c / a2 + 2.0 * Y * s / b2;
  out.grad[1] = -2.0 * X * s / a2 - 2.0 * Y * c / b2;
  out.grad[2] = -2.0 * X * X / (a2 * m.a);
  out.grad[3] = -2.0 * Y * Y / (b2 * m.b);
  out.grad[4] = 2.0 * X * Y / a2 - 2.0 * X * Y / b2;
  return out;
}

namespace {

double measure(const MaskSet& ms, const EllipticalMask& m, Vec2 p) {
  if (ms.shape == MaskShape::circular) {
    const double dx = p.x - m.x, dy = p.y - m.y;
    return (dx * dx + dy * dy) / (m.a * m.a) - 1.0;
  }
  return signed_measure(m, p);
}

double log_product(const MaskSet& ms, Vec2 p) {
  double L = 0.0;
  for (const auto& m : ms.masks) L += log_logistic(ms.alpha * measure(ms, m, p));
  return L;
}

// Scalar factor c_j such that d rho / d psi_j = c_j * d(d_j)/d psi_j.
struct ChainFactors {
  double rho = 0.0;
  double base = 0.0;  // multiplied by alpha * sigma(-alpha d_j)
};

ChainFactors chain_factors(const MaskSet& ms, double L) {
  ChainFactors f;
  if (ms.polarity == Polarity::negative) {
    f.rho = std::exp(ms.eta * L);
    f.base = ms.eta * f.rho;
  } else {
    const double P = std::exp(L);
    const double q = -std::expm1(L);
    f.rho = std::pow(q, ms.eta);
    f.base = -ms.eta * std::pow(q, ms.eta - 1.0) * P;
  }
  return f;
}

}  // namespace

double density_negative(const MaskSet& masks, Vec2 p) {
  if (masks.polarity != Polarity::negative) throw std::invalid_argument("density_negative needs negative masks");
  return std::exp(masks.eta * log_product(masks, p));
}

double density_positive(const MaskSet& masks, Vec2 p) {
  if (masks.polarity != Polarity::positive) throw std::invalid_argument("density_positive needs positive masks");
  return std::pow(-std::expm1(log_product(masks, p)), masks.eta);
}

double density(const MaskSet& masks, Vec2 p) {
  return masks.polarity == Polarity::negative ? density_negative(masks, p) : density_positive(masks, p);
}

std::array<double, 5> density_gradient(const MaskSet& masks, Vec2 p, std::size_t j) {
  if (j >= masks.size()) throw std::out_of_range("mask index out of range");
  const auto f = chain_factors(masks, log_product(masks, p));
  const auto part = signed_measure_partials(masks.masks[j], p, masks.shape);
  const double s = f.base * masks.alpha * logistic(-masks.alpha * part.d);
  std::array<double, 5> g;
  for (int k = 0; k < 5; ++k) g[k] = s * part.grad[k];
  return g;
}

DensityField evaluate_field(const HexGrid& grid, const MaskSet& masks, double rho_min) {
  DensityField f;
  f.rho_min = rho_min;
  f.rho.resize(grid.num_cells());
  for (const auto& c : grid.cells()) f.rho[c.id] = density(masks, c.centroid);
  return f;
}

std::vector<double> pullback(const HexGrid& grid, const MaskSet& masks, std::span<const double> dphi_drho) {
  if (dphi_drho.size() != static_cast<std::size_t>(grid.num_cells()))
    throw std::invalid_argument("pullback: sensitivity size does not match grid");
  const int nv = vars_per_mask(masks.shape);
  const std::size_t M = masks.size();
  std::vector<double> out(M * nv, 0.0);
  std::vector<MeasurePartials> parts(M);

  for (const auto& c : grid.cells()) {
    const double w = dphi_drho[c.id];
    if (w == 0.0) continue;
    double L = 0.0;
    for (std::size_t j = 0; j < M; ++j) {
      parts[j] = signed_measure_partials(masks.masks[j], c.centroid, masks.shape);
      L += log_logistic(masks.alpha * parts[j].d);
    }
    const auto f = chain_factors(masks, L);
    for (std::size_t j = 0; j < M; ++j) {
      const double s = w * f.base * masks.alpha * logistic(-masks.alpha * parts[j].d);
      if (s == 0.0) continue;
      for (int k = 0; k < nv; ++k) out[j * nv + k] += s * parts[j].grad[k];
    }
  }
  return out;
}

int vars_per_mask(MaskShape shape) { return shape == MaskShape::circular ? 3 : 5; }

std::vector<double> pack_design(const MaskSet& masks) {
  const int nv = vars_per_mask(masks.shape);
  std::vector<double> psi;
  psi.reserve(masks.size() * nv);
  for (const auto& m : masks.masks) {
    psi.push_back(m.x);
    psi.push_back(m.y);
    psi.push_back(m.a);
    if (nv == 5) {
      psi.push_back(m.b);
      psi.push_back(m.theta);
    }
  }
  return psi;
}

void unpack_design(std::span<const double> psi, MaskSet& masks) {
  const int nv = vars_per_mask(masks.shape);
  if (psi.size() != masks.size() * nv) throw std::invalid_argument("design vector size mismatch");
  for (std::size_t j = 0; j < masks.size(); ++j) {
    auto& m = masks.masks[j];
    const double* v = psi.data() + j * nv;
    m.x = v[0];
    m.y = v[1];
    m.a = v[2];
    if (nv == 5) {
      m.b = v[3];
      m.theta = v[4];
    } else {
      m.b = v[2];
      m.theta = 0.0;
    }
  }
}

DesignBounds design_bounds(const MaskSet& masks, const Box& domain, double min_axis, double max_axis) {
  if (!(min_axis > 0.0) || min_axis > max_axis) throw std::invalid_argument("invalid semi-axis bounds");
  const int nv = vars_per_mask(masks.shape);
  DesignBounds b;
  const double two_pi = 2.0 * std::numbers::pi;
  for (std::size_t j = 0; j < masks.size(); ++j) {
    b.lower.insert(b.lower.end(), {domain.xmin, domain.ymin, min_axis});
    b.upper.insert(b.upper.end(), {domain.xmax, domain.ymax, max_axis});
    if (nv == 5) {
      b.lower.insert(b.lower.end(), {min_axis, -two_pi});
      b.upper.insert(b.upper.end(), {max_axis, two_pi});
    }
  }
  return b;
}

double default_min_axis(Polarity p, double min_ls) { return p == Polarity::negative ? min_ls : kPositiveMinAxis; }

int masks_along(double length) { return std::max(1, static_cast<int>(std::lround(length / 5.0))); }

MaskSet even_layout(const Box& domain, int nx, int ny, Polarity polarity, MaskShape shape, double alpha, double eta,
                    double initial_axis) {
  if (nx < 1 || ny < 1) throw std::invalid_argument("mask layout needs at least one mask per axis");
  MaskSet ms;
  ms.polarity = polarity;
  ms.shape = shape;
  ms.alpha = alpha;
  ms.eta = eta;
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      EllipticalMask m;
      m.x = domain.xmin + (i + 0.5) * domain.width() / nx;
      m.y = domain.ymin + (j + 0.5) * domain.height() / ny;
      m.a = m.b = initial_axis;
      ms.masks.push_back(m);
    }
  }
  ms.validate();
  return ms;
}

double wrap_angle(double theta) {
  const double two_pi = 2.0 * std::numbers::pi;
  double t = std::fmod(theta + std::numbers::pi, two_pi);
  if (t < 0.0) t += two_pi;
  return t - std::numbers::pi;
}

}  // namespace hexmask
