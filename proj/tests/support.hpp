#pragma once

#include <memory>
#include <vector>

#include "rnnpg/assembly.hpp"
#include "rnnpg/elasticity.hpp"
#include "rnnpg/geometry.hpp"
#include "rnnpg/network.hpp"

namespace rnnpg::testing {

/// Trial "network" whose features are the exact solution components:
/// u_1..u_d for Field::displacement, sigma_s in SymTensor order for
/// Field::stress. Injecting identity coefficients reproduces the exact
/// fields, so every assembled row must be satisfied up to quadrature error.
class ExactFeatureBasis final : public FeatureBasis {
 public:
  ExactFeatureBasis(const ManufacturedProblem& problem, Field field)
      : problem_(problem), field_(field) {}

  int input_dim() const override { return problem_.dim(); }
  int size() const override {
    return field_ == Field::displacement ? problem_.dim() : sym_size(problem_.dim());
  }

  void values(const PointSet& points, Eigen::MatrixXd& out) const override {
    out.resize(size(), points.cols());
    for (Eigen::Index k = 0; k < points.cols(); ++k) {
      const Point x = points.col(k);
      if (field_ == Field::displacement) out.col(k) = problem_.exact_u(x);
      else out.col(k) = problem_.exact_sigma(x).components();
    }
  }

  void analytic_gradients(const PointSet& points,
                          std::vector<Eigen::MatrixXd>& out) const override {
    const int d = problem_.dim();
    out.assign(d, Eigen::MatrixXd(size(), points.cols()));
    const auto& m = problem_.material();
    for (Eigen::Index k = 0; k < points.cols(); ++k) {
      const Point x = points.col(k);
      if (field_ == Field::displacement) {
        const SmallMatrix g = problem_.exact_grad_u(x);
        for (int c = 0; c < d; ++c) out[c].col(k) = g.col(c);
        continue;
      }
      const auto h = problem_.exact().hessian(x);
      for (int c = 0; c < d; ++c) {
        double dtr = 0.0;
        for (int a = 0; a < d; ++a) dtr += h[a](a, c);
        for (int s = 0; s < sym_size(d); ++s) {
          const auto [a, b] = sym_pair(s, d);
          const double deps = 0.5 * (h[a](b, c) + h[b](a, c));
          out[c](s, k) = 2.0 * m.mu * deps + (a == b ? m.lambda * dtr : 0.0);
        }
      }
    }
  }

 private:
  const ManufacturedProblem& problem_;
  Field field_;
};

/// c times another exact field.
class ScaledDisplacement final : public ExactDisplacement {
 public:
  ScaledDisplacement(const ExactDisplacement& base, double c) : base_(base), c_(c) {}
  int dim() const override { return base_.dim(); }
  Point value(const Point& x) const override { return c_ * base_.value(x); }
  SmallMatrix gradient(const Point& x) const override { return c_ * base_.gradient(x); }
  std::vector<SmallMatrix> hessian(const Point& x) const override {
    auto h = base_.hessian(x);
    for (auto& m : h) m *= c_;
    return h;
  }

 private:
  const ExactDisplacement& base_;
  double c_;
};

inline std::vector<BoundaryKind> side_kinds(const ManufacturedProblem& p) {
  std::vector<BoundaryKind> kinds;
  for (const Side& s : all_sides(p.dim())) kinds.push_back(p.side_kind(s));
  return kinds;
}

inline ManufacturedProblem scaled(const ManufacturedProblem& p, double c) {
  return ManufacturedProblem(p.id(), p.material(),
                             std::make_shared<ScaledDisplacement>(p.exact(), c), side_kinds(p));
}

/// Coefficients selecting feature c for displacement component c and
/// feature s for stress component s.
inline Eigen::VectorXd identity_coefficients(FormulationId f, int dim) {
  const int nu = dim, ns = sym_size(dim);
  Eigen::VectorXd c = Eigen::VectorXd::Zero(unknown_count(f, dim, nu, ns));
  for (int a = 0; a < dim; ++a) c(a * nu + a) = 1.0;
  if (is_mixed(f))
    for (int s = 0; s < ns; ++s) c(dim * nu + s * ns + s) = 1.0;
  return c;
}

// Builds the test spaces and collocation for f and assembles.
inline LinearSystem assemble(FormulationId f, const ManufacturedProblem& p, const FeatureBasis& nu,
                              const FeatureBasis& ns, int cells, const AssemblyOptions& o = {},
                              int boundary_points = 20) {
  const StructuredMesh mesh(p.domain(), cells);
  const auto masks = required_masks(f, p);
  const auto colloc = sample_collocation_points(p, boundary_points, 1);
  const NodalBasis v(mesh, masks.displacement);
  if (f == FormulationId::primal) return assemble_primal(p, nu, v, colloc, o);
  return assemble_mixed(f, p, nu, ns, NodalBasis(mesh, masks.stress), v, colloc, o);
}

}  // namespace rnnpg::testing
