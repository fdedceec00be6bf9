#pragma once

#include <memory>
#include <optional>
#include <span>

#include "rnnpg/assembly.hpp"
#include "rnnpg/elasticity.hpp"
#include "rnnpg/network.hpp"

namespace rnnpg {

/// Trial networks plus solved output-layer coefficients. For primal runs
/// sigma_rho is reconstructed from eps(u_rho) with the analytic Jacobian;
/// for mixed runs it is the stress network expansion, where the shared
/// off-diagonal column makes sigma_12 == sigma_21 by construction.
class DiscreteSolution {
 public:
  DiscreteSolution(FormulationId formulation, Material material,
                   std::shared_ptr<const FeatureBasis> net_u,
                   std::shared_ptr<const FeatureBasis> net_sigma,
                   Eigen::VectorXd coefficients);

  FormulationId formulation() const { return formulation_; }
  int dim() const { return material_.dim; }
  const Eigen::VectorXd& coefficients() const { return coefficients_; }

  /// d x q displacement values.
  Eigen::MatrixXd eval_u(const PointSet& points) const;
  /// sym(d) x q stress components in SymTensor order.
  Eigen::MatrixXd eval_sigma(const PointSet& points) const;

  Point eval_u(const Point& x) const;
  SymTensor eval_sigma(const Point& x) const;

 private:
  FormulationId formulation_;
  Material material_;
  std::shared_ptr<const FeatureBasis> net_u_;
  std::shared_ptr<const FeatureBasis> net_sigma_;
  Eigen::VectorXd coefficients_;
  int n_u_ = 0;
  int n_sigma_ = 0;
};

struct ErrorOptions {
  int cells_per_axis = 32;  // evaluation mesh, independent of the test mesh
  int quadrature_order = 5;
};

struct ErrorReport {
  double abs_l2_u = 0.0;
  double abs_l2_sigma = 0.0;
  /// Empty when the exact norm vanishes.
  std::optional<double> rel_l2_u;
  std::optional<double> rel_l2_sigma;
  double norm_u = 0.0;
  double norm_sigma = 0.0;
  int eval_cells_per_axis = 0;
  int eval_quadrature_order = 0;
};

/// Composite Gauss quadrature of |u - u_rho|^2 and |sigma - sigma_rho|_F^2
/// over the evaluation mesh.
ErrorReport l2_errors(const DiscreteSolution& solution, const ManufacturedProblem& problem,
                      const ErrorOptions& options = {});

/// Deterministic pairwise (cascade) summation.
double pairwise_sum(std::span<const double> values);

}  // namespace rnnpg
