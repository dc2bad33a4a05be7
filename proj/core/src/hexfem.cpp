#include "hexmask/hexfem.hpp"

#include <algorithm>
#include <cmath>

namespace hexmask {

WachspressEval wachspress(const std::array<Vec2, 6>& v, Vec2 p) {
  // Edge i runs v_i -> v_{i+1}; outward unit normal n_i, distance h_i.
  std::array<Vec2, 6> n;
  std::array<double, 6> h;
  for (int i = 0; i < 6; ++i) {
    const Vec2 e = v[(i + 1) % 6] - v[i];
    const double len = e.norm();
    n[i] = {e.y / len, -e.x / len};
    h[i] = (v[i] - p).dot(n[i]);
  }
  std::array<double, 6> w;
  std::array<Vec2, 6> R;
  double wsum = 0.0;
  for (int i = 0; i < 6; ++i) {
    const int im = (i + 5) % 6;
    w[i] = n[im].cross(n[i]) / (h[im] * h[i]);
    R[i] = n[im] * (1.0 / h[im]) + n[i] * (1.0 / h[i]);
    wsum += w[i];
  }
  WachspressEval out;
  Vec2 mean;
  for (int i = 0; i < 6; ++i) {
    out.phi[i] = w[i] / wsum;
    mean += R[i] * out.phi[i];
  }
  for (int i = 0; i < 6; ++i) out.grad[i] = (R[i] - mean) * out.phi[i];
  return out;
}

Matrix12 element_stiffness(double cs, const Material& mat) {
  if (!(cs > 0.0)) throw std::invalid_argument("cell size must be positive");
  if (!(mat.E > 0.0)) throw std::invalid_argument("Young's modulus must be positive");
  if (!(mat.nu >= 0.0) || !(mat.nu < 0.5)) throw std::invalid_argument("Poisson ratio must lie in [0, 0.5)");
  if (!(mat.thickness > 0.0)) throw std::invalid_argument("thickness must be positive");

  Eigen::Matrix3d D;
  const double c = mat.E / (1.0 - mat.nu * mat.nu);
  D << c, c * mat.nu, 0.0, c * mat.nu, c, 0.0, 0.0, 0.0, c * (1.0 - mat.nu) / 2.0;

  const auto verts = hexagon_offsets(cs);
  const double tri_area = 0.5 * std::abs(verts[0].cross(verts[1]));
  constexpr double kBary[3][3] = {{2.0 / 3, 1.0 / 6, 1.0 / 6}, {1.0 / 6, 2.0 / 3, 1.0 / 6}, {1.0 / 6, 1.0 / 6, 2.0 / 3}};

  Matrix12 K = Matrix12::Zero();
  Eigen::Matrix<double, 3, 12> B;
  for (int t = 0; t < 6; ++t) {
    const Vec2 a{0.0, 0.0}, b = verts[t], e = verts[(t + 1) % 6];
    for (const auto& q : kBary) {
      const Vec2 p = a * q[0] + b * q[1] + e * q[2];
      const auto ws = wachspress(verts, p);
      B.setZero();
      for (int i = 0; i < 6; ++i) {
        B(0, 2 * i) = ws.grad[i].x;
        B(1, 2 * i + 1) = ws.grad[i].y;
        B(2, 2 * i) = ws.grad[i].y;
        B(2, 2 * i + 1) = ws.grad[i].x;
      }
      K.noalias() += (tri_area / 3.0) * mat.thickness * B.transpose() * D * B;
    }
  }
  return 0.5 * (K + K.transpose());
}

FEModel FEModel::make(std::shared_ptr<const HexGrid> grid, const Material& mat) {
  if (!grid) throw std::invalid_argument("FE model needs a grid");
  FEModel m;
  m.K0 = element_stiffness(grid->cs(), mat);
  m.material = mat;
  m.f = Eigen::VectorXd::Zero(grid->num_dofs());
  m.grid = std::move(grid);
  return m;
}

void FEModel::fix(int dof) {
  if (dof < 0 || dof >= num_dofs()) throw std::out_of_range("fixed dof out of range");
  auto it = std::lower_bound(fixed_dofs.begin(), fixed_dofs.end(), dof);
  if (it == fixed_dofs.end() || *it != dof) fixed_dofs.insert(it, dof);
}

void FEModel::add_force(int dof, double value) {
  if (dof < 0 || dof >= num_dofs()) throw std::out_of_range("load dof out of range");
  f[dof] += value;
}

Analysis::Analysis(FEModel model) : model_(std::move(model)) {
  const auto& g = *model_.grid;
  const int ndof = g.num_dofs();
  if (model_.fixed_dofs.size() < 3) throw AnalysisFailure("fewer than 3 constrained dofs: rigid-body motion is free");

  full_to_free_.assign(ndof, -1);
  std::size_t fi = 0;
  for (int d = 0; d < ndof; ++d) {
    if (fi < model_.fixed_dofs.size() && model_.fixed_dofs[fi] == d) {
      ++fi;
      continue;
    }
    full_to_free_[d] = n_free_++;
  }
  if (n_free_ == 0) throw AnalysisFailure("all dofs are constrained");

  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(g.num_cells()) * 78);
  auto free_of = [&](int cell, int a) {
    const int node = g.cell(cell).node_ids[a / 2];
    return full_to_free_[2 * node + (a % 2)];
  };
  for (int c = 0; c < g.num_cells(); ++c) {
    for (int a = 0; a < 12; ++a) {
      const int ra = free_of(c, a);
      if (ra < 0) continue;
      for (int b = 0; b < 12; ++b) {
        const int rb = free_of(c, b);
        if (rb < 0 || ra < rb) continue;
        trip.emplace_back(ra, rb, 1.0);
      }
    }
  }
  for (int i = 0; i < n_free_; ++i) trip.emplace_back(i, i, 1.0);
  K_.resize(n_free_, n_free_);
  K_.setFromTriplets(trip.begin(), trip.end());
  K_.makeCompressed();

  auto slot_of = [&](int r, int col) {
    const int* inner = K_.innerIndexPtr();
    const int begin = K_.outerIndexPtr()[col];
    const int end = K_.outerIndexPtr()[col + 1];
    const int* it = std::lower_bound(inner + begin, inner + end, r);
    return static_cast<int>(it - inner);
  };

  scatter_.resize(g.num_cells());
  for (int c = 0; c < g.num_cells(); ++c) {
    for (int a = 0; a < 12; ++a) {
      const int ra = free_of(c, a);
      for (int b = 0; b < 12; ++b) {
        const int rb = free_of(c, b);
        scatter_[c][a * 12 + b] = (ra < 0 || rb < 0 || ra < rb) ? -1 : slot_of(ra, rb);
      }
    }
  }

  auto add_spring = [&](int dof, double k) {
    if (dof < 0 || k == 0.0) return;
    if (dof >= ndof) throw std::out_of_range("spring dof out of range");
    const int r = full_to_free_[dof];
    if (r < 0) return;
    spring_slots_.push_back(slot_of(r, r));
    spring_values_.push_back(k);
  };
  add_spring(model_.input_dof, model_.k_in);
  if (model_.output) add_spring(model_.output->dof, model_.k_out);

  ldlt_.analyzePattern(K_);
}

void Analysis::factorize(const DensityField& field) {
  const auto& g = *model_.grid;
  if (field.size() != static_cast<std::size_t>(g.num_cells()))
    throw std::invalid_argument("density field size does not match grid");
  double* val = K_.valuePtr();
  std::fill(val, val + K_.nonZeros(), 0.0);
  const double* k0 = model_.K0.data();  // column-major, symmetric
  for (int c = 0; c < g.num_cells(); ++c) {
    const double s = field.stiffness_factor(c);
    const auto& sc = scatter_[c];
    for (int e = 0; e < 144; ++e)
      if (sc[e] >= 0) val[sc[e]] += s * k0[e];
  }
  for (std::size_t i = 0; i < spring_slots_.size(); ++i) val[spring_slots_[i]] += spring_values_[i];

  ldlt_.factorize(K_);
  if (ldlt_.info() != Eigen::Success) throw AnalysisFailure("sparse factorization failed");
  const auto& Dg = ldlt_.vectorD();
  const double dmax = Dg.cwiseAbs().maxCoeff();
  const double dmin = Dg.minCoeff();
  if (!(dmin > 1e-11 * dmax)) throw AnalysisFailure("stiffness matrix is singular or indefinite");
}

Eigen::VectorXd Analysis::solve_reduced(const Eigen::VectorXd& rhs_full) const {
  Eigen::VectorXd r(n_free_);
  for (int d = 0; d < rhs_full.size(); ++d)
    if (full_to_free_[d] >= 0) r[full_to_free_[d]] = rhs_full[d];
  Eigen::VectorXd x = ldlt_.solve(r);
  if (ldlt_.info() != Eigen::Success || !x.allFinite()) throw AnalysisFailure("sparse solve failed");
  Eigen::VectorXd u = Eigen::VectorXd::Zero(rhs_full.size());
  for (int d = 0; d < rhs_full.size(); ++d)
    if (full_to_free_[d] >= 0) u[d] = x[full_to_free_[d]];
  return u;
}

Eigen::Matrix<double, 12, 1> Analysis::element_dofs(const Eigen::VectorXd& u, int cell) const {
  Eigen::Matrix<double, 12, 1> ue;
  const auto& ids = model_.grid->cell(cell).node_ids;
  for (int k = 0; k < 6; ++k) {
    ue[2 * k] = u[2 * ids[k]];
    ue[2 * k + 1] = u[2 * ids[k] + 1];
  }
  return ue;
}

SolveResult Analysis::assemble_solve(const DensityField& field) {
  factorize(field);
  SolveResult r;
  r.u = solve_reduced(model_.f);
  r.compliance = 0.5 * model_.f.dot(r.u);
  if (model_.output) r.output_disp = model_.output->sign * r.u[model_.output->dof];
  return r;
}

ObjectiveValue Analysis::objective(const DensityField& field, ObjectiveKind kind, double S) {
  ObjectiveValue out;
  out.solve = assemble_solve(field);
  const auto& g = *model_.grid;
  const int nc = g.num_cells();
  const double dscale = 1.0 - field.rho_min;
  out.dphi_drho.assign(nc, 0.0);

  if (kind == ObjectiveKind::compliance) {
    out.phi = out.solve.compliance;
    for (int c = 0; c < nc; ++c) {
      const auto ue = element_dofs(out.solve.u, c);
      out.dphi_drho[c] = -0.5 * dscale * ue.dot(model_.K0 * ue);
    }
    return out;
  }

  if (!model_.output) throw std::invalid_argument("mechanism objective needs an output dof");
  const auto& port = *model_.output;
  Eigen::VectorXd l = Eigen::VectorXd::Zero(model_.num_dofs());
  l[port.dof] = port.sign;
  const Eigen::VectorXd lam = solve_reduced(l);

  const double D = *out.solve.output_disp;
  const double SE = out.solve.compliance;
  if (!(SE > 0.0)) throw AnalysisFailure("mechanism objective needs positive input work");
  out.phi = -S * D / SE;
  for (int c = 0; c < nc; ++c) {
    const auto ue = element_dofs(out.solve.u, c);
    const auto le = element_dofs(lam, c);
    const Eigen::Matrix<double, 12, 1> Ku = model_.K0 * ue;
    const double dD = -dscale * le.dot(Ku);
    const double dSE = -0.5 * dscale * ue.dot(Ku);
    out.dphi_drho[c] = -S * (dD * SE - D * dSE) / (SE * SE);
  }
  return out;
}

ObjectiveGradient objective_and_gradient(Analysis& analysis, const MaskSet& masks, ObjectiveKind kind, double S,
                                         double rho_min) {
  ObjectiveGradient out;
  out.field = evaluate_field(analysis.grid(), masks, rho_min);
  auto val = analysis.objective(out.field, kind, S);
  out.phi = val.phi;
  out.grad = pullback(analysis.grid(), masks, val.dphi_drho);
  out.solve = std::move(val.solve);
  return out;
}

std::vector<double> strain_energy_density(const Analysis& analysis, const SolveResult& result,
                                          const DensityField& field) {
  const auto& g = analysis.grid();
  const auto& K0 = analysis.model().K0;
  std::vector<double> sed(g.num_cells(), 0.0);
  double smax = 0.0;
  for (int c = 0; c < g.num_cells(); ++c) {
    Eigen::Matrix<double, 12, 1> ue;
    const auto& ids = g.cell(c).node_ids;
    for (int k = 0; k < 6; ++k) {
      ue[2 * k] = result.u[2 * ids[k]];
      ue[2 * k + 1] = result.u[2 * ids[k] + 1];
    }
    sed[c] = 0.5 * field.stiffness_factor(c) * ue.dot(K0 * ue);
    smax = std::max(smax, sed[c]);
  }
  if (smax > 0.0)
    for (double& s : sed) s /= smax;
  return sed;
}

}  // namespace hexmask
