#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rnnpg/elasticity.hpp"
#include "rnnpg/geometry.hpp"
#include "rnnpg/network.hpp"
#include "rnnpg/test_space.hpp"

namespace rnnpg {

enum class FormulationId { primal, mixed1, mixed2, mixed3, mixed4 };
std::string to_string(FormulationId f);
FormulationId formulation_from_string(const std::string& name);
bool is_mixed(FormulationId f);

enum class RowKind {
  galerkin_stress,        // test (tau, 0)
  galerkin_displacement,  // test (0, v); the only Galerkin kind for primal
  galerkin_pair_mean,     // mean of all (tau_i, v_k) pairs, see TestPairing
  dirichlet_collocation,  // u(x_k) = g_D(x_k)
  neumann_collocation,    // sigma(x_k) n = g_N(x_k)
};
std::string to_string(RowKind k);
bool is_galerkin(RowKind k);

struct RowTag {
  RowKind kind = RowKind::galerkin_displacement;
  int component = 0;       // stress component s, displacement component k
  std::int64_t index = 0;  // scalar basis index or boundary sample index
};

enum class Field { displacement, stress };

struct ColumnInfo {
  Field field = Field::displacement;
  int component = 0;
  int feature = 0;
};

/// Row-major so assembly writes whole rows contiguously.
using DenseMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Dense rectangular system. Columns are ordered displacement components
/// first (c * n_u + j), then stress components (d * n_u + s * n_sigma + j).
struct LinearSystem {
  FormulationId formulation = FormulationId::primal;
  int dim = 2;
  int n_u = 0;
  int n_sigma = 0;
  DenseMatrix matrix;
  Eigen::VectorXd rhs;
  std::vector<RowTag> row_tags;

  Eigen::Index rows() const { return matrix.rows(); }
  Eigen::Index cols() const { return matrix.cols(); }
  ColumnInfo column_info(Eigen::Index col) const;
  Eigen::Index column_index(Field field, int component, int feature) const;
  /// Number of rows of the given kind.
  Eigen::Index count(RowKind kind) const;
};

/// Number of unknowns: d n_u for primal, d n_u + sym(d) n_sigma for mixed.
Eigen::Index unknown_count(FormulationId f, int dim, int n_u, int n_sigma);

/// How the mixed test pairs (tau_i, v_k) become rows.
///  - separate: one row per (tau_i, 0) and per (0, v_k).
///  - all_pairs: least-squares equivalent of one row per pair in the full
///    product Q_h x V_h (every pattern of enumerate_test_pairs). Written as
///    centered stress rows scaled by sqrt(#v), centered displacement rows
///    scaled by sqrt(#tau), and one mean row scaled by sqrt(#tau #v).
enum class TestPairing { separate, all_pairs };
std::string to_string(TestPairing p);
TestPairing pairing_from_string(const std::string& name);

struct AssemblyOptions {
  int quadrature_order = 5;           // Gauss points per axis in each cell
  int boundary_quadrature_order = 5;  // per axis on each boundary facet
  DerivativeOptions derivatives;      // for eps(u_rho), div sigma_rho
  double collocation_weight = 1.0;
  /// Mixed formulation 3: also collocate sigma n = g_N on Gamma_N.
  bool mixed3_collocate_neumann = true;
  TestPairing pairing = TestPairing::separate;
};

/// Random collocation points on Gamma_D and Gamma_N. Either may be empty.
struct CollocationPoints {
  BoundarySample dirichlet;
  BoundarySample neumann;
};

/// Draws `count` points per side on Gamma_D and Gamma_N of the problem.
CollocationPoints sample_collocation_points(const ManufacturedProblem& problem, int count,
                                            std::uint64_t seed);

/// Masks each formulation requires: {stress test mask, displacement test mask}.
/// Displacement tests vanish on Gamma_D for primal, mixed1, mixed4; stress
/// tests vanish on Gamma_N for mixed2, mixed4.
struct TestMasks {
  BoundaryMask stress;
  BoundaryMask displacement;
};
TestMasks required_masks(FormulationId f, const ManufacturedProblem& problem);

/// Which collocation sets the formulation appends.
bool needs_dirichlet_collocation(FormulationId f);
bool needs_neumann_collocation(FormulationId f, const AssemblyOptions& options);

/// Primal weak form a(u_rho, v_i) = l(v_i) plus Dirichlet collocation rows.
LinearSystem assemble_primal(const ManufacturedProblem& problem, const FeatureBasis& net_u,
                             const NodalBasis& test_space,
                             const CollocationPoints& collocation,
                             const AssemblyOptions& options = {});

/// One of the four mixed weak forms plus the collocation rows it needs.
LinearSystem assemble_mixed(FormulationId formulation, const ManufacturedProblem& problem,
                            const FeatureBasis& net_u, const FeatureBasis& net_sigma,
                            const NodalBasis& stress_tests,
                            const NodalBasis& displacement_tests,
                            const CollocationPoints& collocation,
                            const AssemblyOptions& options = {});

enum class RowScaling { none, unit_row_norm };

/// Left diagonal scaling; zero rows are left untouched.
LinearSystem row_scaling(LinearSystem system, RowScaling policy);

}  // namespace rnnpg
