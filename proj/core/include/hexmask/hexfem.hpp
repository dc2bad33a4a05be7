#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "hexmask/hexgrid.hpp"
#include "hexmask/maskfield.hpp"

namespace hexmask {

using Matrix12 = Eigen::Matrix<double, 12, 12>;

struct Material {
  double E = 1.0;
  double nu = 0.3;
  double thickness = 1.0;
};

class AnalysisFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct WachspressEval {
  std::array<double, 6> phi{};
  std::array<Vec2, 6> grad{};
};

// Wachspress coordinates and gradients of a convex hexagon at an interior point.
WachspressEval wachspress(const std::array<Vec2, 6>& verts, Vec2 p);

// Dof order: (u_x, u_y) of node 0..5, counter-clockwise from 30 degrees.
Matrix12 element_stiffness(double cs, const Material& mat);

enum class ObjectiveKind { compliance, mechanism };

struct OutputPort {
  int dof = -1;
  double sign = 1.0;
};

struct FEModel {
  std::shared_ptr<const HexGrid> grid;
  Material material;
  Matrix12 K0 = Matrix12::Zero();
  std::vector<int> fixed_dofs;  // sorted, unique
  Eigen::VectorXd f;
  std::optional<OutputPort> output;
  int input_dof = -1;
  double k_in = 0.0;
  double k_out = 0.0;

  static FEModel make(std::shared_ptr<const HexGrid> grid, const Material& mat = {});
  void fix(int dof);
  void add_force(int dof, double value);
  int num_dofs() const { return static_cast<int>(f.size()); }
};

struct SolveResult {
  Eigen::VectorXd u;
  double compliance = 0.0;
  std::optional<double> output_disp;
};

struct ObjectiveValue {
  double phi = 0.0;
  std::vector<double> dphi_drho;
  SolveResult solve;
};

// Owns the reduced sparse pattern and symbolic factorization for one model.
class Analysis {
 public:
  explicit Analysis(FEModel model);

  const FEModel& model() const { return model_; }
  const HexGrid& grid() const { return *model_.grid; }

  SolveResult assemble_solve(const DensityField& field);
  ObjectiveValue objective(const DensityField& field, ObjectiveKind kind, double S = 1.0);

 private:
  void factorize(const DensityField& field);
  Eigen::VectorXd solve_reduced(const Eigen::VectorXd& rhs_full) const;
  Eigen::Matrix<double, 12, 1> element_dofs(const Eigen::VectorXd& u, int cell) const;

  FEModel model_;
  std::vector<int> full_to_free_;
  int n_free_ = 0;
  Eigen::SparseMatrix<double> K_;
  // For each cell, the 144 positions in K_.valuePtr() (or -1 for constrained entries).
  std::vector<std::array<int, 144>> scatter_;
  std::vector<int> spring_slots_;
  std::vector<double> spring_values_;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt_;
};

struct ObjectiveGradient {
  double phi = 0.0;
  std::vector<double> grad;  // packed design order
  DensityField field;
  SolveResult solve;
};

ObjectiveGradient objective_and_gradient(Analysis& analysis, const MaskSet& masks, ObjectiveKind kind, double S,
                                         double rho_min = kDefaultRhoMin);

// 0.5 u_e^T K_e u_e per cell, divided by the largest value (all zeros stay zero).
std::vector<double> strain_energy_density(const Analysis& analysis, const SolveResult& result,
                                          const DensityField& field);

}  // namespace hexmask
