#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "rnnpg/types.hpp"

namespace rnnpg {

/// Axis-aligned box [lower, upper] in R^d.
struct Box {
  Point lower;
  Point upper;

  static Box unit(int dim);
  int dim() const { return static_cast<int>(lower.size()); }
  double measure() const;
};

/// One face of the box: the set x_axis = lower (upper=false) or upper.
/// Ids are 2*axis + upper, so in 2D: 0 = x-min (left), 1 = x-max (right),
/// 2 = y-min (bottom), 3 = y-max (top); 3D adds 4 = z-min, 5 = z-max.
struct Side {
  int axis = 0;
  bool upper = false;

  int id() const { return 2 * axis + (upper ? 1 : 0); }
  static Side from_id(int id) { return {id / 2, (id % 2) == 1}; }
  std::string name() const;
  static Side from_name(const std::string& name);
  /// Outward unit normal.
  Point normal(int dim) const;

  friend bool operator==(const Side&, const Side&) = default;
};

std::vector<Side> all_sides(int dim);

/// Uniform partition of a box into cells_per_axis^dim congruent cells.
/// Nodes and cells are numbered lexicographically with x fastest.
class StructuredMesh {
 public:
  StructuredMesh(int dim, int cells_per_axis);
  StructuredMesh(Box domain, int cells_per_axis);

  int dim() const { return domain_.dim(); }
  int cells_per_axis() const { return n_; }
  const Box& domain() const { return domain_; }
  /// Cell side length along `axis`.
  double h(int axis) const;

  std::int64_t cell_count() const;
  std::int64_t node_count() const;

  std::array<int, 3> node_multi_index(std::int64_t node) const;
  std::int64_t node_index(const std::array<int, 3>& multi) const;
  Point node_coords(std::int64_t node) const;

  std::array<int, 3> cell_multi_index(std::int64_t cell) const;
  std::int64_t cell_index(const std::array<int, 3>& multi) const;
  /// Lower/upper corners of a cell.
  Box cell_box(std::int64_t cell) const;
  /// The 2^dim corner nodes; bit a of the local index selects the upper
  /// node along axis a.
  std::vector<std::int64_t> cell_nodes(std::int64_t cell) const;

  /// True if the node lies on the given side of the domain.
  bool node_on_side(std::int64_t node, const Side& side) const;

 private:
  void check_cell(std::int64_t cell) const;

  Box domain_;
  int n_;
};

/// Points are d x q, weights q.
struct QuadratureRule {
  PointSet points;
  Eigen::VectorXd weights;

  Eigen::Index size() const { return weights.size(); }
};

/// Gauss-Legendre nodes and weights on [-1, 1], computed by Newton iteration
/// on the Legendre recurrence. Valid for 1 <= n <= 16.
struct GaussLegendre1D {
  std::vector<double> nodes;
  std::vector<double> weights;
};
GaussLegendre1D gauss_legendre(int n);

/// Tensor-product Gauss-Legendre rule mapped to one cell.
QuadratureRule cell_quadrature(const StructuredMesh& mesh, std::int64_t cell,
                               int points_per_axis);

/// Tensor-product rule on an arbitrary box.
QuadratureRule box_quadrature(const Box& box, int points_per_axis);

/// Composite rule over every cell of the mesh.
QuadratureRule composite_quadrature(const StructuredMesh& mesh, int points_per_axis);

/// Points on the domain boundary with their side and outward normal.
struct BoundarySample {
  PointSet points;
  std::vector<Side> sides;  // one per point

  Eigen::Index size() const { return points.cols(); }
};

/// `count` i.i.d. uniform points on each listed side. Deterministic in seed;
/// each side draws from its own child substream.
BoundarySample sample_boundary_uniform(const Box& domain, const std::vector<Side>& sides,
                                       int count, std::uint64_t seed);

/// Composite Gauss-Legendre rule on the listed sides, one sub-rule per mesh
/// edge (2D) or face (3D).
struct BoundaryQuadrature {
  PointSet points;
  Eigen::VectorXd weights;
  std::vector<Side> sides;

  Eigen::Index size() const { return weights.size(); }
};

/// A cell face lying on the domain boundary with its own quadrature rule.
struct BoundaryFacet {
  std::int64_t cell = 0;
  Side side;
  QuadratureRule rule;
};

std::vector<BoundaryFacet> boundary_facets(const StructuredMesh& mesh,
                                           const std::vector<Side>& sides,
                                           int points_per_axis);

BoundaryQuadrature boundary_quadrature(const StructuredMesh& mesh,
                                       const std::vector<Side>& sides,
                                       int points_per_axis);

}  // namespace rnnpg
