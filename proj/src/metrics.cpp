#include "rnnpg/metrics.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace rnnpg {

DiscreteSolution::DiscreteSolution(FormulationId formulation, Material material,
                                   std::shared_ptr<const FeatureBasis> net_u,
                                   std::shared_ptr<const FeatureBasis> net_sigma,
                                   Eigen::VectorXd coefficients)
    : formulation_(formulation),
      material_(material),
      net_u_(std::move(net_u)),
      net_sigma_(std::move(net_sigma)),
      coefficients_(std::move(coefficients)) {
  if (!net_u_) throw std::invalid_argument("displacement features are required");
  n_u_ = net_u_->size();
  if (is_mixed(formulation_)) {
    if (!net_sigma_) throw std::invalid_argument("mixed solutions need stress features");
    n_sigma_ = net_sigma_->size();
  }
  if (coefficients_.size() != unknown_count(formulation_, dim(), n_u_, n_sigma_))
    throw std::invalid_argument("coefficient vector length does not match the column map");
}

Eigen::MatrixXd DiscreteSolution::eval_u(const PointSet& points) const {
  const int d = dim();
  Eigen::MatrixXd values;
  net_u_->values(points, values);
  Eigen::MatrixXd coef(d, n_u_);
  for (int c = 0; c < d; ++c) coef.row(c) = coefficients_.segment(c * n_u_, n_u_).transpose();
  return coef * values;
}

Eigen::MatrixXd DiscreteSolution::eval_sigma(const PointSet& points) const {
  const int d = dim();
  const int nsym = sym_size(d);
  if (is_mixed(formulation_)) {
    Eigen::MatrixXd values;
    net_sigma_->values(points, values);
    Eigen::MatrixXd coef(nsym, n_sigma_);
    for (int s = 0; s < nsym; ++s)
      coef.row(s) = coefficients_.segment(d * n_u_ + s * n_sigma_, n_sigma_).transpose();
    return coef * values;
  }
  std::vector<Eigen::MatrixXd> grads;
  net_u_->analytic_gradients(points, grads);
  Eigen::MatrixXd out(nsym, points.cols());
  // grad_u[c](b, q) = d u_c / dx_b at point q
  std::vector<Eigen::MatrixXd> grad_u(d, Eigen::MatrixXd(d, points.cols()));
  for (int c = 0; c < d; ++c) {
    const Eigen::RowVectorXd coef = coefficients_.segment(c * n_u_, n_u_).transpose();
    for (int b = 0; b < d; ++b) grad_u[c].row(b) = coef * grads[b];
  }
  for (Eigen::Index q = 0; q < points.cols(); ++q) {
    SmallMatrix g(d, d);
    for (int c = 0; c < d; ++c)
      for (int b = 0; b < d; ++b) g(c, b) = grad_u[c](b, q);
    out.col(q) = stress_from_strain(strain(g), material_).components();
  }
  return out;
}

Point DiscreteSolution::eval_u(const Point& x) const {
  return eval_u(PointSet(x)).col(0);
}

SymTensor DiscreteSolution::eval_sigma(const Point& x) const {
  const Eigen::VectorXd c = eval_sigma(PointSet(x)).col(0);
  SymTensor t(dim());
  for (int k = 0; k < t.size(); ++k) t[k] = c(k);
  return t;
}

double pairwise_sum(std::span<const double> values) {
  if (values.size() <= 8) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.subspan(0, half)) + pairwise_sum(values.subspan(half));
}

ErrorReport l2_errors(const DiscreteSolution& solution, const ManufacturedProblem& problem,
                      const ErrorOptions& options) {
  if (options.quadrature_order < 5)
    throw std::invalid_argument("error quadrature needs at least 5 points per axis");
  if (solution.dim() != problem.dim())
    throw std::invalid_argument("solution and problem dimensions differ");
  const int d = problem.dim();
  const StructuredMesh mesh(problem.domain(), options.cells_per_axis);
  const auto cells = static_cast<std::size_t>(mesh.cell_count());
  std::vector<double> eu(cells), es(cells), nu(cells), ns(cells);

  for (std::int64_t c = 0; c < mesh.cell_count(); ++c) {
    const auto rule = cell_quadrature(mesh, c, options.quadrature_order);
    const Eigen::MatrixXd u = solution.eval_u(rule.points);
    const Eigen::MatrixXd s = solution.eval_sigma(rule.points);
    double cu = 0.0, cs = 0.0, cnu = 0.0, cns = 0.0;
    for (Eigen::Index q = 0; q < rule.size(); ++q) {
      const Point x = rule.points.col(q);
      const Point ue = problem.exact_u(x);
      const SymTensor se = problem.exact_sigma(x);
      SymTensor sr(d);
      for (int k = 0; k < sr.size(); ++k) sr[k] = s(k, q);
      const SymTensor ds = se - sr;
      const double w = rule.weights(q);
      cu += w * (ue - u.col(q)).squaredNorm();
      cnu += w * ue.squaredNorm();
      cs += w * ds.contract(ds);
      cns += w * se.contract(se);
    }
    eu[c] = cu;
    es[c] = cs;
    nu[c] = cnu;
    ns[c] = cns;
  }

  ErrorReport r;
  r.abs_l2_u = std::sqrt(pairwise_sum(eu));
  r.abs_l2_sigma = std::sqrt(pairwise_sum(es));
  r.norm_u = std::sqrt(pairwise_sum(nu));
  r.norm_sigma = std::sqrt(pairwise_sum(ns));
  if (r.norm_u > 0.0) r.rel_l2_u = r.abs_l2_u / r.norm_u;
  if (r.norm_sigma > 0.0) r.rel_l2_sigma = r.abs_l2_sigma / r.norm_sigma;
  r.eval_cells_per_axis = options.cells_per_axis;
  r.eval_quadrature_order = options.quadrature_order;
  return r;
}

}  // namespace rnnpg
