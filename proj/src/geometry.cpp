#include "rnnpg/geometry.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "rnnpg/random.hpp"

namespace rnnpg {

Box Box::unit(int dim) {
  if (dim != 2 && dim != 3) throw std::invalid_argument("dimension must be 2 or 3");
  return {Point::Zero(dim), Point::Ones(dim)};
}

double Box::measure() const { return (upper - lower).prod(); }

std::string Side::name() const {
  static const char* axes = "xyz";
  return std::string(1, axes[axis]) + (upper ? "max" : "min");
}

Side Side::from_name(const std::string& name) {
  static const std::string aliases[6][2] = {{"xmin", "left"},   {"xmax", "right"},
                                            {"ymin", "bottom"}, {"ymax", "top"},
                                            {"zmin", "front"},  {"zmax", "back"}};
  for (int id = 0; id < 6; ++id)
    if (name == aliases[id][0] || name == aliases[id][1]) return from_id(id);
  throw std::invalid_argument("unknown boundary side '" + name + "'");
}

Point Side::normal(int dim) const {
  Point n = Point::Zero(dim);
  n(axis) = upper ? 1.0 : -1.0;
  return n;
}

std::vector<Side> all_sides(int dim) {
  std::vector<Side> sides;
  for (int id = 0; id < 2 * dim; ++id) sides.push_back(Side::from_id(id));
  return sides;
}

StructuredMesh::StructuredMesh(int dim, int cells_per_axis)
    : StructuredMesh(Box::unit(dim), cells_per_axis) {}

StructuredMesh::StructuredMesh(Box domain, int cells_per_axis)
    : domain_(std::move(domain)), n_(cells_per_axis) {
  if (domain_.dim() != 2 && domain_.dim() != 3)
    throw std::invalid_argument("mesh dimension must be 2 or 3");
  if (n_ < 1) throw std::invalid_argument("cells_per_axis must be >= 1");
  if ((domain_.upper - domain_.lower).minCoeff() <= 0.0)
    throw std::invalid_argument("mesh domain must have positive extent");
}

double StructuredMesh::h(int axis) const {
  return (domain_.upper(axis) - domain_.lower(axis)) / n_;
}

std::int64_t StructuredMesh::cell_count() const {
  std::int64_t c = 1;
  for (int a = 0; a < dim(); ++a) c *= n_;
  return c;
}

std::int64_t StructuredMesh::node_count() const {
  std::int64_t c = 1;
  for (int a = 0; a < dim(); ++a) c *= n_ + 1;
  return c;
}

std::array<int, 3> StructuredMesh::node_multi_index(std::int64_t node) const {
  if (node < 0 || node >= node_count()) throw std::out_of_range("node index out of range");
  std::array<int, 3> m{0, 0, 0};
  for (int a = 0; a < dim(); ++a) {
    m[a] = static_cast<int>(node % (n_ + 1));
    node /= n_ + 1;
  }
  return m;
}

std::int64_t StructuredMesh::node_index(const std::array<int, 3>& m) const {
  std::int64_t idx = 0;
  for (int a = dim() - 1; a >= 0; --a) {
    if (m[a] < 0 || m[a] > n_) throw std::out_of_range("node multi-index out of range");
    idx = idx * (n_ + 1) + m[a];
  }
  return idx;
}

Point StructuredMesh::node_coords(std::int64_t node) const {
  const auto m = node_multi_index(node);
  Point x(dim());
  for (int a = 0; a < dim(); ++a) x(a) = domain_.lower(a) + m[a] * h(a);
  return x;
}

void StructuredMesh::check_cell(std::int64_t cell) const {
  if (cell < 0 || cell >= cell_count()) throw std::out_of_range("cell index out of range");
}

std::array<int, 3> StructuredMesh::cell_multi_index(std::int64_t cell) const {
  check_cell(cell);
  std::array<int, 3> m{0, 0, 0};
  for (int a = 0; a < dim(); ++a) {
    m[a] = static_cast<int>(cell % n_);
    cell /= n_;
  }
  return m;
}

std::int64_t StructuredMesh::cell_index(const std::array<int, 3>& m) const {
  std::int64_t idx = 0;
  for (int a = dim() - 1; a >= 0; --a) {
    if (m[a] < 0 || m[a] >= n_) throw std::out_of_range("cell multi-index out of range");
    idx = idx * n_ + m[a];
  }
  return idx;
}

Box StructuredMesh::cell_box(std::int64_t cell) const {
  const auto m = cell_multi_index(cell);
  Box b{Point(dim()), Point(dim())};
  for (int a = 0; a < dim(); ++a) {
    b.lower(a) = domain_.lower(a) + m[a] * h(a);
    // Last cell snaps to the domain edge so boundary points stay exact.
    b.upper(a) = (m[a] + 1 == n_) ? domain_.upper(a) : domain_.lower(a) + (m[a] + 1) * h(a);
  }
  return b;
}

std::vector<std::int64_t> StructuredMesh::cell_nodes(std::int64_t cell) const {
  const auto m = cell_multi_index(cell);
  const int corners = 1 << dim();
  std::vector<std::int64_t> nodes(corners);
  for (int local = 0; local < corners; ++local) {
    std::array<int, 3> nm = m;
    for (int a = 0; a < dim(); ++a) nm[a] += (local >> a) & 1;
    nodes[local] = node_index(nm);
  }
  return nodes;
}

bool StructuredMesh::node_on_side(std::int64_t node, const Side& side) const {
  const auto m = node_multi_index(node);
  return m[side.axis] == (side.upper ? n_ : 0);
}

namespace {

// P_n(x) and P_n'(x) by the three-term recurrence.
std::pair<double, double> legendre(int n, double x) {
  double p0 = 1.0, p1 = x;
  for (int k = 2; k <= n; ++k) {
    const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = pk;
  }
  return {p1, n * (x * p1 - p0) / (x * x - 1.0)};
}

}  // namespace

GaussLegendre1D gauss_legendre(int n) {
  if (n < 1 || n > 16)
    throw std::invalid_argument("Gauss-Legendre order must be in [1, 16]");
  GaussLegendre1D rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < n / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    for (int iter = 0; iter < 100; ++iter) {
      const auto [p, dp] = legendre(n, x);
      const double dx = p / dp;
      x -= dx;
      if (std::abs(dx) <= 1e-16) break;
    }
    const double dp = legendre(n, x).second;
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) {
    // Middle root is 0; P_n'(0) = n P_{n-1}(0).
    const double dp = n * legendre(n - 1, 0.0).first;
    rule.nodes[n / 2] = 0.0;
    rule.weights[n / 2] = (n == 1) ? 2.0 : 2.0 / (dp * dp);
  }
  return rule;
}

QuadratureRule box_quadrature(const Box& box, int points_per_axis) {
  const auto gl = gauss_legendre(points_per_axis);
  const int d = box.dim();
  const int n = points_per_axis;
  int total = 1;
  for (int a = 0; a < d; ++a) total *= n;

  QuadratureRule rule;
  rule.points.resize(d, total);
  rule.weights.resize(total);
  const Point half = 0.5 * (box.upper - box.lower);
  const Point mid = 0.5 * (box.upper + box.lower);
  for (int k = 0; k < total; ++k) {
    int rem = k;
    double w = 1.0;
    for (int a = 0; a < d; ++a) {
      const int i = rem % n;
      rem /= n;
      rule.points(a, k) = mid(a) + half(a) * gl.nodes[i];
      w *= half(a) * gl.weights[i];
    }
    rule.weights(k) = w;
  }
  return rule;
}

QuadratureRule cell_quadrature(const StructuredMesh& mesh, std::int64_t cell,
                               int points_per_axis) {
  return box_quadrature(mesh.cell_box(cell), points_per_axis);
}

QuadratureRule composite_quadrature(const StructuredMesh& mesh, int points_per_axis) {
  const auto ref = box_quadrature(mesh.cell_box(0), points_per_axis);
  const Eigen::Index q = ref.size();
  QuadratureRule rule;
  rule.points.resize(mesh.dim(), q * mesh.cell_count());
  rule.weights.resize(q * mesh.cell_count());
  for (std::int64_t c = 0; c < mesh.cell_count(); ++c) {
    const auto local = cell_quadrature(mesh, c, points_per_axis);
    rule.points.middleCols(c * q, q) = local.points;
    rule.weights.segment(c * q, q) = local.weights;
  }
  return rule;
}

namespace {

// The side as a (d-1)-dimensional box embedded in the domain.
Box side_box(const Box& domain, const Side& side) {
  Box b = domain;
  const double v = side.upper ? domain.upper(side.axis) : domain.lower(side.axis);
  b.lower(side.axis) = v;
  b.upper(side.axis) = v;
  return b;
}

}  // namespace

BoundarySample sample_boundary_uniform(const Box& domain, const std::vector<Side>& sides,
                                       int count, std::uint64_t seed) {
  if (sides.empty()) throw std::invalid_argument("boundary part is empty");
  if (count < 1) throw std::invalid_argument("boundary sample count must be >= 1");
  const int d = domain.dim();
  BoundarySample sample;
  sample.points.resize(d, static_cast<Eigen::Index>(sides.size()) * count);
  const Rng root(seed, Stream::boundary);
  Eigen::Index col = 0;
  for (const Side& side : sides) {
    if (side.axis < 0 || side.axis >= d) throw std::invalid_argument("side outside domain");
    Rng rng = root.split(static_cast<std::uint64_t>(side.id()));
    const Box face = side_box(domain, side);
    for (int k = 0; k < count; ++k, ++col) {
      for (int a = 0; a < d; ++a)
        sample.points(a, col) =
            (a == side.axis) ? face.lower(a) : rng.uniform(face.lower(a), face.upper(a));
      sample.sides.push_back(side);
    }
  }
  return sample;
}

std::vector<BoundaryFacet> boundary_facets(const StructuredMesh& mesh,
                                           const std::vector<Side>& sides,
                                           int points_per_axis) {
  const auto gl = gauss_legendre(points_per_axis);
  const int d = mesh.dim();
  std::vector<BoundaryFacet> facets;
  for (const Side& side : sides) {
    for (std::int64_t c = 0; c < mesh.cell_count(); ++c) {
      const auto m = mesh.cell_multi_index(c);
      if (m[side.axis] != (side.upper ? mesh.cells_per_axis() - 1 : 0)) continue;
      const Box face = side_box(mesh.cell_box(c), side);
      // Tensor rule over the d-1 tangential axes.
      std::vector<int> tangential;
      for (int a = 0; a < d; ++a)
        if (a != side.axis) tangential.push_back(a);
      int total = 1;
      for (std::size_t t = 0; t < tangential.size(); ++t) total *= points_per_axis;
      BoundaryFacet facet{c, side, {}};
      facet.rule.points.resize(d, total);
      facet.rule.weights.resize(total);
      for (int k = 0; k < total; ++k) {
        int rem = k;
        double w = 1.0;
        facet.rule.points(side.axis, k) = face.lower(side.axis);
        for (int a : tangential) {
          const int i = rem % points_per_axis;
          rem /= points_per_axis;
          const double half = 0.5 * (face.upper(a) - face.lower(a));
          const double mid = 0.5 * (face.upper(a) + face.lower(a));
          facet.rule.points(a, k) = mid + half * gl.nodes[i];
          w *= half * gl.weights[i];
        }
        facet.rule.weights(k) = w;
      }
      facets.push_back(std::move(facet));
    }
  }
  return facets;
}

BoundaryQuadrature boundary_quadrature(const StructuredMesh& mesh,
                                       const std::vector<Side>& sides,
                                       int points_per_axis) {
  const auto facets = boundary_facets(mesh, sides, points_per_axis);
  Eigen::Index total = 0;
  for (const auto& f : facets) total += f.rule.size();
  BoundaryQuadrature q;
  q.points.resize(mesh.dim(), total);
  q.weights.resize(total);
  Eigen::Index col = 0;
  for (const auto& f : facets) {
    const Eigen::Index n = f.rule.size();
    q.points.middleCols(col, n) = f.rule.points;
    q.weights.segment(col, n) = f.rule.weights;
    for (Eigen::Index k = 0; k < n; ++k) q.sides.push_back(f.side);
    col += n;
  }
  return q;
}

}  // namespace rnnpg
