#include "rnnpg/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rnnpg {

std::string to_string(FormulationId f) {
  switch (f) {
    case FormulationId::primal: return "primal";
    case FormulationId::mixed1: return "mixed1";
    case FormulationId::mixed2: return "mixed2";
    case FormulationId::mixed3: return "mixed3";
    case FormulationId::mixed4: return "mixed4";
  }
  return "?";
}

FormulationId formulation_from_string(const std::string& name) {
  for (auto f : {FormulationId::primal, FormulationId::mixed1, FormulationId::mixed2,
                 FormulationId::mixed3, FormulationId::mixed4})
    if (name == to_string(f)) return f;
  throw std::invalid_argument("unknown formulation '" + name +
                              "' (expected primal, mixed1..mixed4)");
}

bool is_mixed(FormulationId f) { return f != FormulationId::primal; }

std::string to_string(RowKind k) {
  switch (k) {
    case RowKind::galerkin_stress: return "galerkin_stress";
    case RowKind::galerkin_displacement: return "galerkin_displacement";
    case RowKind::galerkin_pair_mean: return "galerkin_pair_mean";
    case RowKind::dirichlet_collocation: return "dirichlet_collocation";
    case RowKind::neumann_collocation: return "neumann_collocation";
  }
  return "?";
}

bool is_galerkin(RowKind k) {
  return k == RowKind::galerkin_stress || k == RowKind::galerkin_displacement ||
         k == RowKind::galerkin_pair_mean;
}

std::string to_string(TestPairing p) {
  return p == TestPairing::separate ? "separate" : "all_pairs";
}

TestPairing pairing_from_string(const std::string& name) {
  if (name == "separate") return TestPairing::separate;
  if (name == "all_pairs") return TestPairing::all_pairs;
  throw std::invalid_argument("unknown test pairing '" + name +
                              "' (expected separate or all_pairs)");
}

Eigen::Index unknown_count(FormulationId f, int dim, int n_u, int n_sigma) {
  Eigen::Index cols = static_cast<Eigen::Index>(dim) * n_u;
  if (is_mixed(f)) cols += static_cast<Eigen::Index>(sym_size(dim)) * n_sigma;
  return cols;
}

ColumnInfo LinearSystem::column_info(Eigen::Index col) const {
  if (col < 0 || col >= cols()) throw std::out_of_range("column out of range");
  const Eigen::Index u_cols = static_cast<Eigen::Index>(dim) * n_u;
  if (col < u_cols)
    return {Field::displacement, static_cast<int>(col / n_u), static_cast<int>(col % n_u)};
  col -= u_cols;
  return {Field::stress, static_cast<int>(col / n_sigma), static_cast<int>(col % n_sigma)};
}

Eigen::Index LinearSystem::column_index(Field field, int component, int feature) const {
  if (field == Field::displacement) return static_cast<Eigen::Index>(component) * n_u + feature;
  return static_cast<Eigen::Index>(dim) * n_u + static_cast<Eigen::Index>(component) * n_sigma +
         feature;
}

Eigen::Index LinearSystem::count(RowKind kind) const {
  return std::count_if(row_tags.begin(), row_tags.end(),
                       [kind](const RowTag& t) { return t.kind == kind; });
}

CollocationPoints sample_collocation_points(const ManufacturedProblem& problem, int count,
                                            std::uint64_t seed) {
  CollocationPoints pts;
  pts.dirichlet.points.resize(problem.dim(), 0);
  pts.neumann.points.resize(problem.dim(), 0);
  const auto dir = problem.dirichlet_sides();
  const auto neu = problem.neumann_sides();
  // Each side has its own substream, so splitting into two calls keeps the
  // points on a side independent of how the other sides are classified.
  if (!dir.empty()) pts.dirichlet = sample_boundary_uniform(problem.domain(), dir, count, seed);
  if (!neu.empty()) pts.neumann = sample_boundary_uniform(problem.domain(), neu, count, seed);
  return pts;
}

TestMasks required_masks(FormulationId f, const ManufacturedProblem& problem) {
  TestMasks m;
  switch (f) {
    case FormulationId::primal:
    case FormulationId::mixed1:
      m.displacement.vanishing_sides = problem.dirichlet_sides();
      break;
    case FormulationId::mixed2:
      m.stress.vanishing_sides = problem.neumann_sides();
      break;
    case FormulationId::mixed3:
      break;
    case FormulationId::mixed4:
      m.stress.vanishing_sides = problem.neumann_sides();
      m.displacement.vanishing_sides = problem.dirichlet_sides();
      break;
  }
  return m;
}

bool needs_dirichlet_collocation(FormulationId f) {
  return f == FormulationId::primal || f == FormulationId::mixed1 ||
         f == FormulationId::mixed3;
}

bool needs_neumann_collocation(FormulationId f, const AssemblyOptions& options) {
  return f == FormulationId::mixed2 ||
         (f == FormulationId::mixed3 && options.mixed3_collocate_neumann);
}

namespace {

bool same_sides(std::vector<Side> a, std::vector<Side> b) {
  auto by_id = [](const Side& x, const Side& y) { return x.id() < y.id(); };
  std::sort(a.begin(), a.end(), by_id);
  std::sort(b.begin(), b.end(), by_id);
  return a == b;
}

void check_mask(const NodalBasis& space, const BoundaryMask& expected, const char* what) {
  if (!same_sides(space.mask().vanishing_sides, expected.vanishing_sides))
    throw std::invalid_argument(std::string(what) +
                                " test space mask does not match the formulation");
}

void check_basis(const FeatureBasis& basis, int dim, const char* what) {
  if (basis.input_dim() != dim)
    throw std::invalid_argument(std::string(what) + " features have the wrong input dimension");
  if (basis.size() < 1) throw std::invalid_argument(std::string(what) + " features are empty");
}

// Symmetric unit patterns T_s as full matrices.
std::vector<SmallMatrix> unit_patterns(int d) {
  std::vector<SmallMatrix> t;
  for (int s = 0; s < sym_size(d); ++s) t.push_back(SymTensor::unit(s, d).matrix());
  return t;
}

// Quadrature weights folded into a batch of shape values: out(i, q) = m(i, q) w_q.
Eigen::MatrixXd weighted(const Eigen::MatrixXd& m, const Eigen::VectorXd& w) {
  return m * w.asDiagonal();
}

struct CellContext {
  QuadratureRule rule;
  CellShapes shapes;
  std::vector<std::int64_t> nodes;
};

CellContext cell_context(const StructuredMesh& mesh, std::int64_t cell, int order) {
  CellContext ctx;
  ctx.rule = cell_quadrature(mesh, cell, order);
  ctx.shapes = cell_shape_functions(mesh, cell, ctx.rule.points);
  ctx.nodes = mesh.cell_nodes(cell);
  return ctx;
}

bool any_active(const NodalBasis& space, const std::vector<std::int64_t>& nodes) {
  return std::any_of(nodes.begin(), nodes.end(),
                     [&](std::int64_t n) { return space.basis_index(n) >= 0; });
}

// rows(k, q) = g_k(x_q) for a vector field g.
template <class Fn>
Eigen::MatrixXd sample_field(const PointSet& points, int d, Fn&& fn) {
  Eigen::MatrixXd out(d, points.cols());
  for (Eigen::Index q = 0; q < points.cols(); ++q) {
    const Point x = points.col(q);
    out.col(q) = fn(x);
  }
  return out;
}

void append_dirichlet_rows(LinearSystem& sys, Eigen::Index& row,
                           const ManufacturedProblem& problem, const FeatureBasis& net_u,
                           const BoundarySample& sample, double weight) {
  const int d = sys.dim;
  const Eigen::Index np = sample.size();
  if (np == 0) return;
  Eigen::MatrixXd values;
  net_u.values(sample.points, values);
  for (Eigen::Index p = 0; p < np; ++p) {
    const Point g = problem.dirichlet_data(sample.points.col(p));
    for (int k = 0; k < d; ++k, ++row) {
      sys.matrix.row(row).segment(static_cast<Eigen::Index>(k) * sys.n_u, sys.n_u) =
          weight * values.col(p).transpose();
      sys.rhs(row) = weight * g(k);
      sys.row_tags[row] = {RowKind::dirichlet_collocation, k, p};
    }
  }
}

void append_neumann_rows(LinearSystem& sys, Eigen::Index& row,
                         const ManufacturedProblem& problem, const FeatureBasis& net_sigma,
                         const BoundarySample& sample, double weight) {
  const int d = sys.dim;
  const Eigen::Index np = sample.size();
  if (np == 0) return;
  const auto patterns = unit_patterns(d);
  Eigen::MatrixXd values;
  net_sigma.values(sample.points, values);
  for (Eigen::Index p = 0; p < np; ++p) {
    const Point n = sample.sides[p].normal(d);
    const Point g = problem.neumann_data(sample.points.col(p), n);
    for (int a = 0; a < d; ++a, ++row) {
      for (int s = 0; s < sym_size(d); ++s) {
        const double coef = (patterns[s].row(a) * n)(0);
        if (coef == 0.0) continue;
        sys.matrix.row(row).segment(sys.column_index(Field::stress, s, 0), sys.n_sigma) =
            weight * coef * values.col(p).transpose();
      }
      sys.rhs(row) = weight * g(a);
      sys.row_tags[row] = {RowKind::neumann_collocation, a, p};
    }
  }
}

// Replaces the stress block [0, n_t) and displacement block [n_t, n_t + n_v)
// by the least-squares equivalent of the full set of pair rows.
void compress_all_pairs(LinearSystem& sys, Eigen::Index n_t, Eigen::Index n_v) {
  const Eigen::Index cols = sys.cols();
  const Eigen::Index tail = sys.rows() - n_t - n_v;
  DenseMatrix out(sys.rows() + 1, cols);
  Eigen::VectorXd rhs(sys.rows() + 1);
  std::vector<RowTag> tags(sys.rows() + 1);

  const Eigen::RowVectorXd mean_t = sys.matrix.topRows(n_t).colwise().mean();
  const Eigen::RowVectorXd mean_v = sys.matrix.middleRows(n_t, n_v).colwise().mean();
  const double rhs_mean_t = sys.rhs.head(n_t).mean();
  const double rhs_mean_v = sys.rhs.segment(n_t, n_v).mean();
  const double scale_t = std::sqrt(static_cast<double>(n_v));
  const double scale_v = std::sqrt(static_cast<double>(n_t));

  out.topRows(n_t) = scale_t * (sys.matrix.topRows(n_t).rowwise() - mean_t);
  rhs.head(n_t) = scale_t * (sys.rhs.head(n_t).array() - rhs_mean_t).matrix();
  out.middleRows(n_t, n_v) = scale_v * (sys.matrix.middleRows(n_t, n_v).rowwise() - mean_v);
  rhs.segment(n_t, n_v) = scale_v * (sys.rhs.segment(n_t, n_v).array() - rhs_mean_v).matrix();
  const double scale_m = std::sqrt(static_cast<double>(n_t) * static_cast<double>(n_v));
  out.row(n_t + n_v) = scale_m * (mean_t + mean_v);
  rhs(n_t + n_v) = scale_m * (rhs_mean_t + rhs_mean_v);
  out.bottomRows(tail) = sys.matrix.bottomRows(tail);
  rhs.tail(tail) = sys.rhs.tail(tail);

  std::copy(sys.row_tags.begin(), sys.row_tags.begin() + n_t + n_v, tags.begin());
  tags[n_t + n_v] = {RowKind::galerkin_pair_mean, -1, -1};
  std::copy(sys.row_tags.begin() + n_t + n_v, sys.row_tags.end(),
            tags.begin() + n_t + n_v + 1);

  sys.matrix = std::move(out);
  sys.rhs = std::move(rhs);
  sys.row_tags = std::move(tags);
}

}  // namespace

LinearSystem assemble_primal(const ManufacturedProblem& problem, const FeatureBasis& net_u,
                             const NodalBasis& test_space,
                             const CollocationPoints& collocation,
                             const AssemblyOptions& options) {
  const int d = problem.dim();
  check_basis(net_u, d, "displacement");
  if (test_space.dim() != d) throw std::invalid_argument("test space dimension mismatch");
  check_mask(test_space, required_masks(FormulationId::primal, problem).displacement,
             "displacement");
  if (test_space.size() == 0) throw std::invalid_argument("test space is empty");
  const bool has_dirichlet = !problem.dirichlet_sides().empty();
  if (has_dirichlet && collocation.dirichlet.size() == 0)
    throw std::invalid_argument("Dirichlet collocation points are required");

  const StructuredMesh& mesh = test_space.mesh();
  const Material& mat = problem.material();
  const Eigen::Index n_tests = test_space.size();
  const int n = net_u.size();

  LinearSystem sys;
  sys.formulation = FormulationId::primal;
  sys.dim = d;
  sys.n_u = n;
  const Eigen::Index galerkin_rows = d * n_tests;
  const Eigen::Index rows = galerkin_rows + (has_dirichlet ? d * collocation.dirichlet.size() : 0);
  sys.matrix = DenseMatrix::Zero(rows, unknown_count(FormulationId::primal, d, n, 0));
  sys.rhs = Eigen::VectorXd::Zero(rows);
  sys.row_tags.resize(rows);
  for (int k = 0; k < d; ++k)
    for (Eigen::Index i = 0; i < n_tests; ++i)
      sys.row_tags[k * n_tests + i] = {RowKind::galerkin_displacement, k, i};

  Eigen::MatrixXd values;
  std::vector<Eigen::MatrixXd> grads;
  std::vector<Eigen::MatrixXd> wgrad(d);
  std::vector<std::vector<Eigen::MatrixXd>> m(d, std::vector<Eigen::MatrixXd>(d));
  for (std::int64_t cell = 0; cell < mesh.cell_count(); ++cell) {
    const auto ctx = cell_context(mesh, cell, options.quadrature_order);
    if (!any_active(test_space, ctx.nodes)) continue;
    net_u.evaluate(ctx.rule.points, options.derivatives, values, grads);
    for (int b = 0; b < d; ++b) wgrad[b] = weighted(ctx.shapes.gradients[b], ctx.rule.weights);
    // m[b][e](i, j) = sum_q w dphi_i/dx_b dPhi_j/dx_e
    for (int b = 0; b < d; ++b)
      for (int e = 0; e < d; ++e) m[b][e].noalias() = wgrad[b] * grads[e].transpose();
    const Eigen::MatrixXd f = sample_field(ctx.rule.points, d,
                                           [&](const Point& x) { return problem.body_force(x); });
    const Eigen::MatrixXd wphi = weighted(ctx.shapes.values, ctx.rule.weights);
    const Eigen::MatrixXd load = wphi * f.transpose();  // corners x d

    for (std::size_t local = 0; local < ctx.nodes.size(); ++local) {
      const std::int64_t i = test_space.basis_index(ctx.nodes[local]);
      if (i < 0) continue;
      const auto li = static_cast<Eigen::Index>(local);
      for (int k = 0; k < d; ++k) {
        const Eigen::Index row = k * n_tests + i;
        for (int c = 0; c < d; ++c) {
          // a(Phi e_c, phi e_k) = mu (delta_ck grad Phi . grad phi + dPhi/dx_k dphi/dx_c)
          //                       + lambda dPhi/dx_c dphi/dx_k
          Eigen::RowVectorXd entry = mat.mu * m[c][k].row(li) + mat.lambda * m[k][c].row(li);
          if (c == k)
            for (int b = 0; b < d; ++b) entry += mat.mu * m[b][b].row(li);
          sys.matrix.row(row).segment(static_cast<Eigen::Index>(c) * n, n) += entry;
        }
        sys.rhs(row) += load(li, k);
      }
    }
  }

  for (const auto& facet :
       boundary_facets(mesh, problem.neumann_sides(), options.boundary_quadrature_order)) {
    const auto shapes = cell_shape_functions(mesh, facet.cell, facet.rule.points);
    const auto nodes = mesh.cell_nodes(facet.cell);
    const Point normal = facet.side.normal(d);
    const Eigen::MatrixXd g = sample_field(
        facet.rule.points, d, [&](const Point& x) { return problem.neumann_data(x, normal); });
    const Eigen::MatrixXd load = weighted(shapes.values, facet.rule.weights) * g.transpose();
    for (std::size_t local = 0; local < nodes.size(); ++local) {
      const std::int64_t i = test_space.basis_index(nodes[local]);
      if (i < 0) continue;
      for (int k = 0; k < d; ++k) sys.rhs(k * n_tests + i) += load(local, k);
    }
  }

  Eigen::Index row = galerkin_rows;
  if (has_dirichlet)
    append_dirichlet_rows(sys, row, problem, net_u, collocation.dirichlet,
                          options.collocation_weight);
  return sys;
}

LinearSystem assemble_mixed(FormulationId formulation, const ManufacturedProblem& problem,
                            const FeatureBasis& net_u, const FeatureBasis& net_sigma,
                            const NodalBasis& stress_tests,
                            const NodalBasis& displacement_tests,
                            const CollocationPoints& collocation,
                            const AssemblyOptions& options) {
  if (!is_mixed(formulation))
    throw std::invalid_argument("assemble_mixed needs a mixed formulation");
  const int d = problem.dim();
  check_basis(net_u, d, "displacement");
  check_basis(net_sigma, d, "stress");
  if (stress_tests.dim() != d || displacement_tests.dim() != d)
    throw std::invalid_argument("test space dimension mismatch");
  if (stress_tests.mesh().cells_per_axis() != displacement_tests.mesh().cells_per_axis())
    throw std::invalid_argument("stress and displacement test spaces must share a mesh");
  const TestMasks masks = required_masks(formulation, problem);
  check_mask(stress_tests, masks.stress, "stress");
  check_mask(displacement_tests, masks.displacement, "displacement");
  if (stress_tests.size() == 0 || displacement_tests.size() == 0)
    throw std::invalid_argument("test space is empty");

  const bool dirichlet_rows =
      needs_dirichlet_collocation(formulation) && !problem.dirichlet_sides().empty();
  const bool neumann_rows =
      needs_neumann_collocation(formulation, options) && !problem.neumann_sides().empty();
  if (dirichlet_rows && collocation.dirichlet.size() == 0)
    throw std::invalid_argument("Dirichlet collocation points are required for " +
                                to_string(formulation));
  if (neumann_rows && collocation.neumann.size() == 0)
    throw std::invalid_argument("Neumann collocation points are required for " +
                                to_string(formulation));

  // Which side of the integration by parts each equation uses.
  const bool tau_takes_strain =
      formulation == FormulationId::mixed1 || formulation == FormulationId::mixed3;
  const bool v_takes_strain =
      formulation == FormulationId::mixed1 || formulation == FormulationId::mixed4;

  const StructuredMesh& mesh = displacement_tests.mesh();
  const Material& mat = problem.material();
  const int nsym = sym_size(d);
  const auto patterns = unit_patterns(d);
  const double kappa = mat.lambda / (2.0 * mat.mu + d * mat.lambda);
  // compliance[s][t] = A(T_t) : T_s
  Eigen::MatrixXd compliance(nsym, nsym);
  for (int s = 0; s < nsym; ++s)
    for (int t = 0; t < nsym; ++t) {
      const SymTensor ts = SymTensor::unit(s, d), tt = SymTensor::unit(t, d);
      compliance(s, t) = (tt.contract(ts) - kappa * tt.trace() * ts.trace()) / (2.0 * mat.mu);
    }

  const Eigen::Index nq = stress_tests.size();
  const Eigen::Index nv = displacement_tests.size();
  const int n_u = net_u.size();
  const int n_s = net_sigma.size();

  LinearSystem sys;
  sys.formulation = formulation;
  sys.dim = d;
  sys.n_u = n_u;
  sys.n_sigma = n_s;
  const Eigen::Index t_rows = nsym * nq;
  const Eigen::Index v_rows = d * nv;
  const Eigen::Index rows = t_rows + v_rows +
                            (dirichlet_rows ? d * collocation.dirichlet.size() : 0) +
                            (neumann_rows ? d * collocation.neumann.size() : 0);
  sys.matrix = DenseMatrix::Zero(rows, unknown_count(formulation, d, n_u, n_s));
  sys.rhs = Eigen::VectorXd::Zero(rows);
  sys.row_tags.resize(rows);
  for (int s = 0; s < nsym; ++s)
    for (Eigen::Index i = 0; i < nq; ++i)
      sys.row_tags[s * nq + i] = {RowKind::galerkin_stress, s, i};
  for (int k = 0; k < d; ++k)
    for (Eigen::Index i = 0; i < nv; ++i)
      sys.row_tags[t_rows + k * nv + i] = {RowKind::galerkin_displacement, k, i};

  const Eigen::Index u0 = 0;
  const Eigen::Index s0 = static_cast<Eigen::Index>(d) * n_u;
  Eigen::MatrixXd u_val, s_val;
  std::vector<Eigen::MatrixXd> u_grad, s_grad, wgrad(d), g_u(d), g_s(d);
  for (std::int64_t cell = 0; cell < mesh.cell_count(); ++cell) {
    const auto ctx = cell_context(mesh, cell, options.quadrature_order);
    const Eigen::MatrixXd wphi = weighted(ctx.shapes.values, ctx.rule.weights);
    for (int b = 0; b < d; ++b) wgrad[b] = weighted(ctx.shapes.gradients[b], ctx.rule.weights);

    if (tau_takes_strain) net_u.evaluate(ctx.rule.points, options.derivatives, u_val, u_grad);
    else net_u.values(ctx.rule.points, u_val);
    if (!v_takes_strain) net_sigma.evaluate(ctx.rule.points, options.derivatives, s_val, s_grad);
    else net_sigma.values(ctx.rule.points, s_val);

    // Stress-test rows.
    const Eigen::MatrixXd mass_s = wphi * s_val.transpose();  // corners x n_s
    for (int b = 0; b < d; ++b) {
      // tau_takes_strain: sum_q w phi dPhi_u/dx_b ; else sum_q w dphi/dx_b Phi_u
      g_u[b] = tau_takes_strain ? Eigen::MatrixXd(wphi * u_grad[b].transpose())
                                : Eigen::MatrixXd(wgrad[b] * u_val.transpose());
    }
    for (std::size_t local = 0; local < ctx.nodes.size(); ++local) {
      const std::int64_t i = stress_tests.basis_index(ctx.nodes[local]);
      if (i < 0) continue;
      const auto li = static_cast<Eigen::Index>(local);
      for (int s = 0; s < nsym; ++s) {
        const Eigen::Index row = s * nq + i;
        auto r = sys.matrix.row(row);
        for (int t = 0; t < nsym; ++t)
          if (compliance(s, t) != 0.0)
            r.segment(s0 + t * n_s, n_s) += compliance(s, t) * mass_s.row(li);
        for (int c = 0; c < d; ++c) {
          // -eps(Phi e_c) : T_s = -sum_b T_s(c,b) dPhi/dx_b
          // (div T_s phi)_c Phi = sum_b T_s(c,b) dphi/dx_b Phi
          const double sign = tau_takes_strain ? -1.0 : 1.0;
          for (int b = 0; b < d; ++b)
            if (patterns[s](c, b) != 0.0)
              r.segment(u0 + c * n_u, n_u) += sign * patterns[s](c, b) * g_u[b].row(li);
        }
      }
    }

    // Displacement-test rows.
    for (int b = 0; b < d; ++b) {
      // v_takes_strain: sum_q w dphi/dx_b Phi_s ; else sum_q w phi dPhi_s/dx_b
      g_s[b] = v_takes_strain ? Eigen::MatrixXd(wgrad[b] * s_val.transpose())
                              : Eigen::MatrixXd(wphi * s_grad[b].transpose());
    }
    const Eigen::MatrixXd f = sample_field(ctx.rule.points, d,
                                           [&](const Point& x) { return problem.body_force(x); });
    const Eigen::MatrixXd load = wphi * f.transpose();
    for (std::size_t local = 0; local < ctx.nodes.size(); ++local) {
      const std::int64_t i = displacement_tests.basis_index(ctx.nodes[local]);
      if (i < 0) continue;
      const auto li = static_cast<Eigen::Index>(local);
      for (int k = 0; k < d; ++k) {
        const Eigen::Index row = t_rows + k * nv + i;
        auto r = sys.matrix.row(row);
        // sigma : eps(phi e_k) = sum_b T_t(k,b) dphi/dx_b Phi_s
        // -div(Phi_s T_t) . phi e_k = -sum_b T_t(k,b) dPhi_s/dx_b phi
        const double sign = v_takes_strain ? 1.0 : -1.0;
        for (int t = 0; t < nsym; ++t)
          for (int b = 0; b < d; ++b)
            if (patterns[t](k, b) != 0.0)
              r.segment(s0 + t * n_s, n_s) += sign * patterns[t](k, b) * g_s[b].row(li);
        sys.rhs(row) += load(li, k);
      }
    }
  }

  // <g_D, tau n> on Gamma_D for the formulations that move the strain onto tau.
  if (!tau_takes_strain) {
    for (const auto& facet :
         boundary_facets(mesh, problem.dirichlet_sides(), options.boundary_quadrature_order)) {
      const auto shapes = cell_shape_functions(mesh, facet.cell, facet.rule.points);
      const auto nodes = mesh.cell_nodes(facet.cell);
      const Point normal = facet.side.normal(d);
      const Eigen::MatrixXd g = sample_field(
          facet.rule.points, d, [&](const Point& x) { return problem.dirichlet_data(x); });
      const Eigen::MatrixXd load = weighted(shapes.values, facet.rule.weights) * g.transpose();
      for (std::size_t local = 0; local < nodes.size(); ++local) {
        const std::int64_t i = stress_tests.basis_index(nodes[local]);
        if (i < 0) continue;
        for (int s = 0; s < nsym; ++s) {
          const Point tn = patterns[s] * normal;
          double v = 0.0;
          for (int a = 0; a < d; ++a) v += load(local, a) * tn(a);
          sys.rhs(s * nq + i) += v;
        }
      }
    }
  }
  // <g_N, v> on Gamma_N for the formulations with sigma : eps(v).
  if (v_takes_strain) {
    for (const auto& facet :
         boundary_facets(mesh, problem.neumann_sides(), options.boundary_quadrature_order)) {
      const auto shapes = cell_shape_functions(mesh, facet.cell, facet.rule.points);
      const auto nodes = mesh.cell_nodes(facet.cell);
      const Point normal = facet.side.normal(d);
      const Eigen::MatrixXd g = sample_field(
          facet.rule.points, d, [&](const Point& x) { return problem.neumann_data(x, normal); });
      const Eigen::MatrixXd load = weighted(shapes.values, facet.rule.weights) * g.transpose();
      for (std::size_t local = 0; local < nodes.size(); ++local) {
        const std::int64_t i = displacement_tests.basis_index(nodes[local]);
        if (i < 0) continue;
        for (int k = 0; k < d; ++k) sys.rhs(t_rows + k * nv + i) += load(local, k);
      }
    }
  }

  Eigen::Index row = t_rows + v_rows;
  if (dirichlet_rows)
    append_dirichlet_rows(sys, row, problem, net_u, collocation.dirichlet,
                          options.collocation_weight);
  if (neumann_rows)
    append_neumann_rows(sys, row, problem, net_sigma, collocation.neumann,
                        options.collocation_weight);

  if (options.pairing == TestPairing::all_pairs) compress_all_pairs(sys, t_rows, v_rows);
  return sys;
}

LinearSystem row_scaling(LinearSystem system, RowScaling policy) {
  if (policy == RowScaling::none) return system;
  for (Eigen::Index r = 0; r < system.rows(); ++r) {
    const double norm = system.matrix.row(r).norm();
    if (norm == 0.0) continue;
    system.matrix.row(r) /= norm;
    system.rhs(r) /= norm;
  }
  return system;
}

}  // namespace rnnpg
