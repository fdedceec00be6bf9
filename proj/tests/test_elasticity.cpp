#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "rnnpg/elasticity.hpp"
#include "rnnpg/random.hpp"

using namespace rnnpg;

namespace {

Point random_point(Rng& rng, int d, double margin = 0.0) {
  Point x(d);
  for (int a = 0; a < d; ++a) x(a) = margin + (1.0 - 2.0 * margin) * rng.uniform();
  return x;
}

SymTensor random_tensor(Rng& rng, int d) {
  SymTensor t(d);
  for (int k = 0; k < t.size(); ++k) t[k] = rng.uniform(-2.0, 2.0);
  return t;
}

SmallMatrix mat2(double a, double b, double c, double d) {
  SmallMatrix m(2, 2);
  m << a, b, c, d;
  return m;
}

// Sixth-order central difference of g along axis a.
template <class F>
Eigen::VectorXd fd6(F&& g, const Point& x, int a, double h) {
  auto at = [&](double s) -> Eigen::VectorXd {
    Point y = x;
    y(a) += s * h;
    return g(y);
  };
  return ((at(3) - at(-3)) - 9.0 * (at(2) - at(-2)) + 45.0 * (at(1) - at(-1))) / (60.0 * h);
}

}  // namespace

TEST_CASE("symmetric index layout") {
  CHECK(sym_size(2) == 3);
  CHECK(sym_size(3) == 6);
  CHECK(sym_index(0, 0, 2) == 0);
  CHECK(sym_index(0, 1, 2) == 1);
  CHECK(sym_index(1, 0, 2) == 1);
  CHECK(sym_index(1, 1, 2) == 2);
  CHECK(sym_index(0, 2, 3) == 2);
  CHECK(sym_index(1, 1, 3) == 3);
  CHECK(sym_index(2, 1, 3) == 4);
  CHECK(sym_index(2, 2, 3) == 5);
  for (int d : {2, 3})
    for (int k = 0; k < sym_size(d); ++k) {
      const auto [a, b] = sym_pair(k, d);
      CHECK(a <= b);
      CHECK(sym_index(a, b, d) == k);
    }
}

TEST_CASE("SymTensor round-trips through the full matrix view") {
  Rng rng(1, Stream::test);
  for (int d : {2, 3})
    for (int k = 0; k < 50; ++k) {
      const SymTensor t = random_tensor(rng, d);
      const SmallMatrix m = t.matrix();
      CHECK((m - m.transpose()).norm() == 0.0);
      CHECK((SymTensor::from_matrix(m).components() - t.components()).norm() == 0.0);
      CHECK(t.contract(t) == doctest::Approx((m.array() * m.array()).sum()).epsilon(1e-14));
      CHECK(t.trace() == doctest::Approx(m.trace()).epsilon(1e-14));
      const Point n = Point::Random(d);
      CHECK((t.apply(n) - m * n).norm() <= 1e-14);
    }
  CHECK_THROWS_AS(SymTensor::from_matrix(mat2(1, 2, 0, 3)), std::invalid_argument);
  const SymTensor u = SymTensor::unit(1, 2);
  CHECK(u.matrix() == mat2(0, 1, 1, 0));
}

TEST_CASE("Lame parameters from (E, nu)") {
  const Material a = lame_from_E_nu(1.0, 0.0);
  CHECK(a.mu == doctest::Approx(0.5));
  CHECK(a.lambda == 0.0);
  const Material b = lame_from_E_nu(1.5, 0.25);
  CHECK(b.mu == doctest::Approx(0.6).epsilon(1e-15));
  CHECK(b.lambda == doctest::Approx(0.6).epsilon(1e-15));
  const Material c = lame_from_E_nu(1.0, 0.499999);
  CHECK(std::isfinite(c.lambda));
  CHECK(c.lambda / c.mu > 1e5);
  CHECK(c.lambda / c.mu < 1e7);
  CHECK_THROWS_AS(lame_from_E_nu(1.0, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(lame_from_E_nu(1.0, 0.7), std::invalid_argument);
  CHECK_THROWS_AS(lame_from_E_nu(0.0, 0.3), std::invalid_argument);
  CHECK_THROWS_AS(lame_from_E_nu(1.0, -0.1), std::invalid_argument);
  CHECK_THROWS_AS((Material{0.0, 1.0, 2}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((Material{1.0, -1.0, 2}.validate()), std::invalid_argument);
}

TEST_CASE("strain") {
  CHECK(strain(SmallMatrix::Zero(2, 2)).frobenius_norm() == 0.0);
  CHECK(strain(mat2(0, 3, -3, 0)).frobenius_norm() == 0.0);
  CHECK(strain(mat2(1, 2, 0, 3)).matrix() == mat2(1, 1, 1, 3));
}

TEST_CASE("stress from strain and compliance") {
  const Material m{0.5, 1.0, 2};
  const SymTensor id = SymTensor::from_matrix(SmallMatrix::Identity(2, 2));
  CHECK(stress_from_strain(id, m).matrix().isApprox(3.0 * SmallMatrix::Identity(2, 2), 1e-15));

  SymTensor traceless(2);
  traceless[0] = 0.7;
  traceless[1] = -0.2;
  traceless[2] = -0.7;
  CHECK((stress_from_strain(traceless, m) - 2.0 * m.mu * traceless).frobenius_norm() <= 1e-15);
  CHECK((compliance_apply(traceless, m) - (1.0 / (2.0 * m.mu)) * traceless).frobenius_norm() <= 1e-15);
  CHECK(compliance_apply(SymTensor(2), m).frobenius_norm() == 0.0);

  // Scalar evaluation of (1 - lambda d / (2mu + d lambda)) / (2mu) on the diagonal.
  const double mu = 0.5, lambda = 1.0, d = 2.0;
  const double diag = (1.0 - lambda * d / (2 * mu + d * lambda)) / (2 * mu);
  CHECK(diag == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  const SymTensor a_id = compliance_apply(id, m);
  CHECK(a_id[0] == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(a_id[1] == 0.0);
  CHECK(a_id[2] == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("inverse pair and trace identity over random tensors and materials") {
  Rng rng(2, Stream::test);
  for (int d : {2, 3})
    for (int k = 0; k < 500; ++k) {
      const Material m{rng.uniform(0.1, 3.0), k % 10 == 0 ? 0.0 : rng.uniform(0.0, 10.0), d};
      const SymTensor eps = random_tensor(rng, d);
      const SymTensor sig = random_tensor(rng, d);
      CHECK((compliance_apply(stress_from_strain(eps, m), m) - eps).frobenius_norm() <= 1e-13);
      CHECK((stress_from_strain(compliance_apply(sig, m), m) - sig).frobenius_norm() <= 1e-13);
      const double tr = compliance_apply(sig, m).trace();
      CHECK(std::abs(tr - sig.trace() / (2 * m.mu + d * m.lambda)) <= 1e-13);
    }
}

TEST_CASE("inverse pair in the nearly incompressible regime") {
  // Round-off in sigma is amplified by the condition number (2mu + d lambda) / (2mu)
  // of the constitutive map, so the bound scales with it.
  Rng rng(5, Stream::test);
  for (int d : {2, 3})
    for (double nu : {0.49, 0.4999, 0.499999}) {
      const Material m = lame_from_E_nu(1.0 + nu, nu, d);
      const double cond = (2 * m.mu + d * m.lambda) / (2 * m.mu);
      for (int k = 0; k < 100; ++k) {
        const SymTensor eps = random_tensor(rng, d);
        CHECK((compliance_apply(stress_from_strain(eps, m), m) - eps).frobenius_norm() <= 1e-13 * cond);
        const SymTensor sig = random_tensor(rng, d);
        CHECK((stress_from_strain(compliance_apply(sig, m), m) - sig).frobenius_norm() <= 1e-13 * cond);
        const double tr = compliance_apply(sig, m).trace();
        CHECK(std::abs(tr - sig.trace() / (2 * m.mu + d * m.lambda)) <= 1e-13);
      }
    }
}

TEST_CASE("example identifiers") {
  for (auto id : {ExampleId::ex1, ExampleId::ex2, ExampleId::ex3, ExampleId::ex4})
    CHECK(example_from_string(to_string(id)) == id);
  CHECK_THROWS_AS(example_from_string("ex5"), std::invalid_argument);
}

TEST_CASE("manufactured problem data") {
  Rng rng(3, Stream::test);
  const auto ex1 = make_problem(ExampleId::ex1);
  CHECK(ex1.dim() == 2);
  CHECK(ex1.material().mu == 0.5);
  CHECK(ex1.material().lambda == 1.0);
  CHECK(ex1.dirichlet_sides().size() == 4);
  CHECK(ex1.neumann_sides().empty());
  for (const Side& s : all_sides(2))
    for (int k = 0; k < 20; ++k) {
      Point x = random_point(rng, 2);
      x(s.axis) = s.upper ? 1.0 : 0.0;
      CHECK(ex1.exact_u(x).norm() <= 1e-15);
    }

  const auto ex4 = make_problem(ExampleId::ex4);
  CHECK(ex4.dim() == 3);
  CHECK(ex4.neumann_sides().empty());
  const Point c = Point::Constant(3, 0.5);
  CHECK((ex4.exact_u(c) - Point(Eigen::Vector3d(0.25, 0.5, 1.0))).norm() <= 1e-15);

  const auto ex2 = make_problem(ExampleId::ex2);
  REQUIRE(ex2.dirichlet_sides().size() == 1);
  CHECK(ex2.dirichlet_sides()[0] == Side{1, false});
  CHECK(ex2.neumann_sides().size() == 3);
  ProblemParams flipped;
  flipped.boundary = {{Side{1, false}, BoundaryKind::neumann}, {Side{1, true}, BoundaryKind::dirichlet}};
  const auto ex2b = make_problem(ExampleId::ex2, flipped);
  REQUIRE(ex2b.dirichlet_sides().size() == 1);
  CHECK(ex2b.dirichlet_sides()[0] == Side{1, true});

  for (double nu : {0.49, 0.4999, 0.499999}) {
    ProblemParams p;
    p.nu = nu;
    const auto ex3 = make_problem(ExampleId::ex3, p);
    CHECK(ex3.material().mu == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(*ex3.youngs_modulus == doctest::Approx(1.0 + nu));
    CHECK(*ex3.poisson_ratio == nu);
    // The Ex3 field is divergence-free.
    for (int k = 0; k < 20; ++k) CHECK(std::abs(ex3.exact_grad_u(random_point(rng, 2)).trace()) <= 1e-15);
  }
  ProblemParams bad;
  bad.nu = 0.5;
  CHECK_THROWS_AS(make_problem(ExampleId::ex3, bad), std::invalid_argument);

  // Neumann data is sigma n.
  Point x(2);
  x << 1.0, 0.3;
  const Point n = Side{0, true}.normal(2);
  CHECK((ex2.neumann_data(x, n) - ex2.exact_sigma(x).apply(n)).norm() == 0.0);
}

TEST_CASE("Ex1 body force at the center matches a finite-difference divergence") {
  const auto p = make_problem(ExampleId::ex1);
  const Point x = Point::Constant(2, 0.5);
  const double h = 1e-3;
  Point div = Point::Zero(2);
  for (int b = 0; b < 2; ++b) {
    auto col = [&](const Point& y) -> Eigen::Vector2d {
      const SmallMatrix s = p.exact_sigma(y).matrix();
      return s.col(b);
    };
    div += fd6(col, x, b, h);
  }
  CHECK((p.body_force(x) + div).norm() <= 1e-8);
}

TEST_CASE("manufactured solutions satisfy the PDE: residual <= 1e-7 at 200 points") {
  Rng rng(4, Stream::test);
  std::vector<std::pair<ExampleId, ProblemParams>> cases = {
      {ExampleId::ex1, {}}, {ExampleId::ex2, {}}, {ExampleId::ex4, {}}};
  for (double nu : {0.49, 0.4999, 0.499999}) {
    ProblemParams p;
    p.nu = nu;
    cases.emplace_back(ExampleId::ex3, p);
  }
  for (const auto& [id, params] : cases) {
    const auto p = make_problem(id, params);
    const int d = p.dim();
    const double h = 1e-3;
    double worst_const = 0.0, worst_eq = 0.0, worst_grad = 0.0;
    for (int k = 0; k < 200; ++k) {
      const Point x = random_point(rng, d, 0.01);
      // grad u by finite differences of the closed-form displacement.
      SmallMatrix grad(d, d);
      for (int b = 0; b < d; ++b) grad.col(b) = fd6([&](const Point& y) -> Point { return p.exact_u(y); }, x, b, h);
      worst_grad = std::max(worst_grad, (grad - p.exact_grad_u(x)).norm());
      const SymTensor res = compliance_apply(p.exact_sigma(x), p.material()) - strain(grad);
      worst_const = std::max(worst_const, res.frobenius_norm());
      Point div = Point::Zero(d);
      for (int b = 0; b < d; ++b)
        div += fd6([&](const Point& y) -> Point { return p.exact_sigma(y).matrix().col(b); }, x, b, h);
      worst_eq = std::max(worst_eq, (div + p.body_force(x)).norm());
    }
    CAPTURE(to_string(id));
    CAPTURE(p.material().lambda);
    CHECK(worst_grad <= 1e-7);
    CHECK(worst_const <= 1e-7);
    CHECK(worst_eq <= 1e-7);
  }
}
