#pragma once

#include <array>
#include <cmath>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rnnpg/geometry.hpp"
#include "rnnpg/types.hpp"

namespace rnnpg {

/// Number of independent components of a symmetric d x d tensor.
constexpr int sym_size(int dim) { return dim * (dim + 1) / 2; }

/// Component index of (a, b) in the ordering (11,12,22) / (11,12,13,22,23,33).
int sym_index(int a, int b, int dim);
/// Inverse of sym_index: the (a, b) with a <= b.
std::pair<int, int> sym_pair(int k, int dim);

/// Symmetric tensor stored by its independent components.
class SymTensor {
 public:
  using Storage = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, 6, 1>;

  explicit SymTensor(int dim);
  /// Reads the upper triangle; throws if `m` is not symmetric to 1e-12
  /// relative.
  static SymTensor from_matrix(const SmallMatrix& m);
  /// Unit pattern of component k: E_aa, or E_ab + E_ba off the diagonal.
  static SymTensor unit(int k, int dim);

  int dim() const { return dim_; }
  int size() const { return sym_size(dim_); }

  double& operator[](int k) { return c_(k); }
  double operator[](int k) const { return c_(k); }
  double operator()(int a, int b) const { return c_(sym_index(a, b, dim_)); }
  const Storage& components() const { return c_; }

  SmallMatrix matrix() const;
  double trace() const;
  /// Full contraction sigma : tau (off-diagonals counted twice).
  double contract(const SymTensor& other) const;
  /// sigma * n.
  Point apply(const Point& n) const;
  double frobenius_norm() const { return std::sqrt(contract(*this)); }

  SymTensor& operator+=(const SymTensor& o);
  SymTensor& operator-=(const SymTensor& o);
  SymTensor& operator*=(double s);
  friend SymTensor operator+(SymTensor a, const SymTensor& b) { return a += b; }
  friend SymTensor operator-(SymTensor a, const SymTensor& b) { return a -= b; }
  friend SymTensor operator*(double s, SymTensor a) { return a *= s; }

 private:
  int dim_;
  Storage c_;
};

struct Material {
  double mu = 0.5;
  double lambda = 1.0;
  int dim = 2;

  void validate() const;
};

/// mu = E / (2(1+nu)), lambda = E nu / ((1+nu)(1-2nu)). Requires E > 0 and
/// 0 <= nu < 0.5.
Material lame_from_E_nu(double E, double nu, int dim = 2);

SymTensor strain(const SmallMatrix& grad_u);
SymTensor stress_from_strain(const SymTensor& eps, const Material& m);
/// A sigma = (sigma - lambda/(2mu + d lambda) tr(sigma) I) / (2mu).
SymTensor compliance_apply(const SymTensor& sigma, const Material& m);

enum class ExampleId { ex1, ex2, ex3, ex4 };
std::string to_string(ExampleId id);
ExampleId example_from_string(const std::string& name);

enum class BoundaryKind { dirichlet, neumann };

/// Closed-form displacement with first and second derivatives.
class ExactDisplacement {
 public:
  virtual ~ExactDisplacement() = default;
  virtual int dim() const = 0;
  virtual Point value(const Point& x) const = 0;
  /// grad(a, b) = du_a / dx_b
  virtual SmallMatrix gradient(const Point& x) const = 0;
  /// hessian[a](b, c) = d^2 u_a / dx_b dx_c
  virtual std::vector<SmallMatrix> hessian(const Point& x) const = 0;
};

struct ProblemParams {
  std::optional<double> mu;
  std::optional<double> lambda;
  std::optional<double> E;
  std::optional<double> nu;
  double Q = 4.0;
  /// Per-side overrides of the boundary condition type, by side id.
  std::vector<std::pair<Side, BoundaryKind>> boundary;
};

/// Exact fields and data of one manufactured test case on the unit box.
class ManufacturedProblem {
 public:
  ManufacturedProblem(ExampleId id, Material material,
                      std::shared_ptr<const ExactDisplacement> exact,
                      std::vector<BoundaryKind> side_kinds);

  ExampleId id() const { return id_; }
  int dim() const { return material_.dim; }
  const Material& material() const { return material_; }
  Box domain() const { return Box::unit(dim()); }

  const ExactDisplacement& exact() const { return *exact_; }
  Point exact_u(const Point& x) const { return exact_->value(x); }
  SmallMatrix exact_grad_u(const Point& x) const { return exact_->gradient(x); }
  SymTensor exact_sigma(const Point& x) const;
  /// f = -div sigma = -(mu lap u + (mu + lambda) grad div u).
  Point body_force(const Point& x) const;
  Point dirichlet_data(const Point& x) const { return exact_u(x); }
  Point neumann_data(const Point& x, const Point& normal) const {
    return exact_sigma(x).apply(normal);
  }

  BoundaryKind side_kind(const Side& s) const { return side_kinds_.at(s.id()); }
  std::vector<Side> dirichlet_sides() const;
  std::vector<Side> neumann_sides() const;

  /// Set when the material came from (E, nu).
  std::optional<double> youngs_modulus;
  std::optional<double> poisson_ratio;

 private:
  ExampleId id_;
  Material material_;
  std::shared_ptr<const ExactDisplacement> exact_;
  std::vector<BoundaryKind> side_kinds_;
};

/// Builds one of the four manufactured cases. Defaults: mu = 1/2, lambda = 1
/// (ex1, ex2, ex4); ex3 takes nu (default 0.49) and E = 1 + nu so that
/// mu = 1/2; Q = 4 for ex2. Boundary: all Dirichlet, except ex2 which is
/// Dirichlet on the bottom side and Neumann elsewhere.
ManufacturedProblem make_problem(ExampleId id, const ProblemParams& params = {});

}  // namespace rnnpg
