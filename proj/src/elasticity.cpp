#include "rnnpg/elasticity.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace rnnpg {

int sym_index(int a, int b, int dim) {
  if (a > b) std::swap(a, b);
  if (a < 0 || b >= dim) throw std::out_of_range("tensor index out of range");
  return a * dim - a * (a - 1) / 2 + (b - a);
}

std::pair<int, int> sym_pair(int k, int dim) {
  for (int a = 0; a < dim; ++a)
    for (int b = a; b < dim; ++b)
      if (sym_index(a, b, dim) == k) return {a, b};
  throw std::out_of_range("symmetric component index out of range");
}

SymTensor::SymTensor(int dim) : dim_(dim), c_(Storage::Zero(sym_size(dim))) {
  if (dim != 2 && dim != 3) throw std::invalid_argument("tensor dimension must be 2 or 3");
}

SymTensor SymTensor::from_matrix(const SmallMatrix& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("tensor must be square");
  const int d = static_cast<int>(m.rows());
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw std::invalid_argument("matrix is not symmetric");
  SymTensor t(d);
  for (int a = 0; a < d; ++a)
    for (int b = a; b < d; ++b) t[sym_index(a, b, d)] = m(a, b);
  return t;
}

SymTensor SymTensor::unit(int k, int dim) {
  SymTensor t(dim);
  t[k] = 1.0;
  return t;
}

SmallMatrix SymTensor::matrix() const {
  SmallMatrix m(dim_, dim_);
  for (int a = 0; a < dim_; ++a)
    for (int b = 0; b < dim_; ++b) m(a, b) = (*this)(a, b);
  return m;
}

double SymTensor::trace() const {
  double t = 0.0;
  for (int a = 0; a < dim_; ++a) t += (*this)(a, a);
  return t;
}

double SymTensor::contract(const SymTensor& o) const {
  if (o.dim_ != dim_) throw std::invalid_argument("tensor dimension mismatch");
  double s = 0.0;
  for (int k = 0; k < size(); ++k) {
    const auto [a, b] = sym_pair(k, dim_);
    s += (a == b ? 1.0 : 2.0) * c_(k) * o.c_(k);
  }
  return s;
}

Point SymTensor::apply(const Point& n) const {
  if (n.size() != dim_) throw std::invalid_argument("vector dimension mismatch");
  Point r = Point::Zero(dim_);
  for (int a = 0; a < dim_; ++a)
    for (int b = 0; b < dim_; ++b) r(a) += (*this)(a, b) * n(b);
  return r;
}

SymTensor& SymTensor::operator+=(const SymTensor& o) {
  if (o.dim_ != dim_) throw std::invalid_argument("tensor dimension mismatch");
  c_ += o.c_;
  return *this;
}

SymTensor& SymTensor::operator-=(const SymTensor& o) {
  if (o.dim_ != dim_) throw std::invalid_argument("tensor dimension mismatch");
  c_ -= o.c_;
  return *this;
}

SymTensor& SymTensor::operator*=(double s) {
  c_ *= s;
  return *this;
}

void Material::validate() const {
  if (dim != 2 && dim != 3) throw std::invalid_argument("material dimension must be 2 or 3");
  if (!(mu > 0.0)) throw std::invalid_argument("shear modulus mu must be positive");
  if (!(lambda >= 0.0)) throw std::invalid_argument("Lame parameter lambda must be >= 0");
}

Material lame_from_E_nu(double E, double nu, int dim) {
  if (!(E > 0.0)) throw std::invalid_argument("Young's modulus must be positive");
  if (!(nu >= 0.0 && nu < 0.5))
    throw std::invalid_argument("Poisson ratio must lie in [0, 0.5)");
  Material m;
  m.mu = E / (2.0 * (1.0 + nu));
  m.lambda = E * nu / ((1.0 + nu) * (1.0 - 2.0 * nu));
  m.dim = dim;
  return m;
}

SymTensor strain(const SmallMatrix& grad_u) {
  if (grad_u.rows() != grad_u.cols()) throw std::invalid_argument("gradient must be square");
  const int d = static_cast<int>(grad_u.rows());
  SymTensor eps(d);
  for (int a = 0; a < d; ++a)
    for (int b = a; b < d; ++b) eps[sym_index(a, b, d)] = 0.5 * (grad_u(a, b) + grad_u(b, a));
  return eps;
}

SymTensor stress_from_strain(const SymTensor& eps, const Material& m) {
  if (eps.dim() != m.dim) throw std::invalid_argument("material dimension mismatch");
  SymTensor sigma = 2.0 * m.mu * eps;
  const double tr = eps.trace();
  for (int a = 0; a < m.dim; ++a) sigma[sym_index(a, a, m.dim)] += m.lambda * tr;
  return sigma;
}

SymTensor compliance_apply(const SymTensor& sigma, const Material& m) {
  if (sigma.dim() != m.dim) throw std::invalid_argument("material dimension mismatch");
  const double c = m.lambda / (2.0 * m.mu + m.dim * m.lambda);
  SymTensor r = sigma;
  const double tr = sigma.trace();
  for (int a = 0; a < m.dim; ++a) r[sym_index(a, a, m.dim)] -= c * tr;
  return (1.0 / (2.0 * m.mu)) * r;
}

std::string to_string(ExampleId id) {
  switch (id) {
    case ExampleId::ex1: return "ex1";
    case ExampleId::ex2: return "ex2";
    case ExampleId::ex3: return "ex3";
    case ExampleId::ex4: return "ex4";
  }
  return "?";
}

ExampleId example_from_string(const std::string& name) {
  if (name == "ex1") return ExampleId::ex1;
  if (name == "ex2") return ExampleId::ex2;
  if (name == "ex3") return ExampleId::ex3;
  if (name == "ex4") return ExampleId::ex4;
  throw std::invalid_argument("unknown example id '" + name + "' (expected ex1..ex4)");
}

namespace {

constexpr double pi = std::numbers::pi;

// u = (e^{x-y} xy(1-x)(1-y), sin(pi x) sin(pi y))
class Example1 final : public ExactDisplacement {
 public:
  int dim() const override { return 2; }
  Point value(const Point& p) const override {
    const double x = p(0), y = p(1);
    Point u(2);
    u << std::exp(x - y) * x * y * (1 - x) * (1 - y), std::sin(pi * x) * std::sin(pi * y);
    return u;
  }
  SmallMatrix gradient(const Point& p) const override {
    const double x = p(0), y = p(1), e = std::exp(x - y);
    SmallMatrix g(2, 2);
    g(0, 0) = y * (y - 1) * (x * x + x - 1) * e;
    g(0, 1) = -x * (x - 1) * (y * y - 3 * y + 1) * e;
    g(1, 0) = pi * std::sin(pi * y) * std::cos(pi * x);
    g(1, 1) = pi * std::sin(pi * x) * std::cos(pi * y);
    return g;
  }
  std::vector<SmallMatrix> hessian(const Point& p) const override {
    const double x = p(0), y = p(1), e = std::exp(x - y);
    std::vector<SmallMatrix> h(2, SmallMatrix(2, 2));
    h[0](0, 0) = x * y * (x + 3) * (y - 1) * e;
    h[0](0, 1) = -(x * x + x - 1) * (y * y - 3 * y + 1) * e;
    h[0](1, 1) = x * (x - 1) * (y - 4) * (y - 1) * e;
    const double ss = std::sin(pi * x) * std::sin(pi * y);
    h[1](0, 0) = -pi * pi * ss;
    h[1](0, 1) = pi * pi * std::cos(pi * x) * std::cos(pi * y);
    h[1](1, 1) = -pi * pi * ss;
    for (auto& m : h) m(1, 0) = m(0, 1);
    return h;
  }
};

// u = (cos(2 pi x) sin(pi y), sin(pi x) Q y^4 / 4)
class Example2 final : public ExactDisplacement {
 public:
  explicit Example2(double q) : q_(q) {}
  int dim() const override { return 2; }
  Point value(const Point& p) const override {
    const double x = p(0), y = p(1);
    Point u(2);
    u << std::cos(2 * pi * x) * std::sin(pi * y), std::sin(pi * x) * q_ * std::pow(y, 4) / 4;
    return u;
  }
  SmallMatrix gradient(const Point& p) const override {
    const double x = p(0), y = p(1);
    SmallMatrix g(2, 2);
    g(0, 0) = -2 * pi * std::sin(2 * pi * x) * std::sin(pi * y);
    g(0, 1) = pi * std::cos(2 * pi * x) * std::cos(pi * y);
    g(1, 0) = 0.25 * pi * q_ * std::pow(y, 4) * std::cos(pi * x);
    g(1, 1) = q_ * std::pow(y, 3) * std::sin(pi * x);
    return g;
  }
  std::vector<SmallMatrix> hessian(const Point& p) const override {
    const double x = p(0), y = p(1);
    std::vector<SmallMatrix> h(2, SmallMatrix(2, 2));
    h[0](0, 0) = -4 * pi * pi * std::sin(pi * y) * std::cos(2 * pi * x);
    h[0](0, 1) = -2 * pi * pi * std::sin(2 * pi * x) * std::cos(pi * y);
    h[0](1, 1) = -pi * pi * std::sin(pi * y) * std::cos(2 * pi * x);
    h[1](0, 0) = -0.25 * pi * pi * q_ * std::pow(y, 4) * std::sin(pi * x);
    h[1](0, 1) = pi * q_ * std::pow(y, 3) * std::cos(pi * x);
    h[1](1, 1) = 3 * q_ * y * y * std::sin(pi * x);
    for (auto& m : h) m(1, 0) = m(0, 1);
    return h;
  }

 private:
  double q_;
};

// u = (-x^2(x-1)^2 y(y-1)(2y-1), x(x-1)(2x-1) y^2(y-1)^2), divergence free.
class Example3 final : public ExactDisplacement {
 public:
  int dim() const override { return 2; }
  Point value(const Point& p) const override {
    const double x = p(0), y = p(1);
    Point u(2);
    u << -x * x * (x - 1) * (x - 1) * y * (y - 1) * (2 * y - 1),
        x * (x - 1) * (2 * x - 1) * y * y * (y - 1) * (y - 1);
    return u;
  }
  SmallMatrix gradient(const Point& p) const override {
    const double x = p(0), y = p(1);
    const double bx = x * (x - 1) * (2 * x - 1), by = y * (y - 1) * (2 * y - 1);
    SmallMatrix g(2, 2);
    g(0, 0) = -2 * bx * by;
    g(0, 1) = -x * x * (x - 1) * (x - 1) * (6 * y * y - 6 * y + 1);
    g(1, 0) = y * y * (y - 1) * (y - 1) * (6 * x * x - 6 * x + 1);
    g(1, 1) = 2 * bx * by;
    return g;
  }
  std::vector<SmallMatrix> hessian(const Point& p) const override {
    const double x = p(0), y = p(1);
    const double bx = x * (x - 1) * (2 * x - 1), by = y * (y - 1) * (2 * y - 1);
    const double cx = 6 * x * x - 6 * x + 1, cy = 6 * y * y - 6 * y + 1;
    std::vector<SmallMatrix> h(2, SmallMatrix(2, 2));
    h[0](0, 0) = -2 * by * cx;
    h[0](0, 1) = -2 * bx * cy;
    h[0](1, 1) = -6 * x * x * (x - 1) * (x - 1) * (2 * y - 1);
    h[1](0, 0) = 6 * y * y * (2 * x - 1) * (y - 1) * (y - 1);
    h[1](0, 1) = 2 * by * cx;
    h[1](1, 1) = 2 * bx * cy;
    for (auto& m : h) m(1, 0) = m(0, 1);
    return h;
  }
};

// u = (2^4, 2^5, 2^6) x(1-x) y(1-y) z(1-z)
class Example4 final : public ExactDisplacement {
 public:
  int dim() const override { return 3; }
  Point value(const Point& p) const override {
    return bubble(p) * amplitude();
  }
  SmallMatrix gradient(const Point& p) const override {
    const Point db = bubble_gradient(p);
    return amplitude() * db.transpose();
  }
  std::vector<SmallMatrix> hessian(const Point& p) const override {
    double s[3], ds[3];
    for (int a = 0; a < 3; ++a) {
      s[a] = p(a) * (1 - p(a));
      ds[a] = 1 - 2 * p(a);
    }
    SmallMatrix hb(3, 3);
    for (int b = 0; b < 3; ++b)
      for (int c = 0; c < 3; ++c) {
        double v = 1.0;
        for (int a = 0; a < 3; ++a) {
          if (a == b && a == c) v *= -2.0;
          else if (a == b || a == c) v *= ds[a];
          else v *= s[a];
        }
        hb(b, c) = v;
      }
    std::vector<SmallMatrix> h;
    for (int a = 0; a < 3; ++a) h.push_back(amplitude()(a) * hb);
    return h;
  }

 private:
  static Point amplitude() {
    Point a(3);
    a << 16.0, 32.0, 64.0;
    return a;
  }
  static double bubble(const Point& p) {
    return p(0) * (1 - p(0)) * p(1) * (1 - p(1)) * p(2) * (1 - p(2));
  }
  static Point bubble_gradient(const Point& p) {
    Point g(3);
    for (int b = 0; b < 3; ++b) {
      double v = 1.0;
      for (int a = 0; a < 3; ++a) v *= (a == b) ? (1 - 2 * p(a)) : p(a) * (1 - p(a));
      g(b) = v;
    }
    return g;
  }
};

}  // namespace

ManufacturedProblem::ManufacturedProblem(ExampleId id, Material material,
                                         std::shared_ptr<const ExactDisplacement> exact,
                                         std::vector<BoundaryKind> side_kinds)
    : id_(id), material_(material), exact_(std::move(exact)), side_kinds_(std::move(side_kinds)) {
  material_.validate();
  if (exact_->dim() != material_.dim)
    throw std::invalid_argument("exact solution and material dimensions differ");
  if (static_cast<int>(side_kinds_.size()) != 2 * material_.dim)
    throw std::invalid_argument("need one boundary kind per side");
}

SymTensor ManufacturedProblem::exact_sigma(const Point& x) const {
  return stress_from_strain(strain(exact_grad_u(x)), material_);
}

Point ManufacturedProblem::body_force(const Point& x) const {
  const int d = dim();
  const auto h = exact_->hessian(x);
  Point f(d);
  for (int a = 0; a < d; ++a) {
    double lap = 0.0, grad_div = 0.0;
    for (int b = 0; b < d; ++b) {
      lap += h[a](b, b);
      grad_div += h[b](a, b);
    }
    f(a) = -(material_.mu * lap + (material_.mu + material_.lambda) * grad_div);
  }
  return f;
}

std::vector<Side> ManufacturedProblem::dirichlet_sides() const {
  std::vector<Side> s;
  for (int id = 0; id < 2 * dim(); ++id)
    if (side_kinds_[id] == BoundaryKind::dirichlet) s.push_back(Side::from_id(id));
  return s;
}

std::vector<Side> ManufacturedProblem::neumann_sides() const {
  std::vector<Side> s;
  for (int id = 0; id < 2 * dim(); ++id)
    if (side_kinds_[id] == BoundaryKind::neumann) s.push_back(Side::from_id(id));
  return s;
}

ManufacturedProblem make_problem(ExampleId id, const ProblemParams& params) {
  const int dim = (id == ExampleId::ex4) ? 3 : 2;
  Material material;
  material.dim = dim;
  std::optional<double> E, nu;
  if (id == ExampleId::ex3) {
    nu = params.nu.value_or(0.49);
    E = params.E.value_or(1.0 + *nu);
    material = lame_from_E_nu(*E, *nu, dim);
  } else if (params.E || params.nu) {
    if (!(params.E && params.nu))
      throw std::invalid_argument("E and nu must be given together");
    E = params.E;
    nu = params.nu;
    material = lame_from_E_nu(*E, *nu, dim);
  }
  if (params.mu) material.mu = *params.mu;
  if (params.lambda) material.lambda = *params.lambda;

  std::shared_ptr<const ExactDisplacement> exact;
  switch (id) {
    case ExampleId::ex1: exact = std::make_shared<Example1>(); break;
    case ExampleId::ex2: exact = std::make_shared<Example2>(params.Q); break;
    case ExampleId::ex3: exact = std::make_shared<Example3>(); break;
    case ExampleId::ex4: exact = std::make_shared<Example4>(); break;
  }

  std::vector<BoundaryKind> kinds(2 * dim, BoundaryKind::dirichlet);
  if (id == ExampleId::ex2) {
    kinds.assign(4, BoundaryKind::neumann);
    kinds[Side{1, false}.id()] = BoundaryKind::dirichlet;
  }
  for (const auto& [side, kind] : params.boundary) {
    if (side.axis >= dim) throw std::invalid_argument("boundary side outside the domain");
    kinds[side.id()] = kind;
  }

  ManufacturedProblem problem(id, material, std::move(exact), std::move(kinds));
  problem.youngs_modulus = E;
  problem.poisson_ratio = nu;
  return problem;
}

}  // namespace rnnpg
