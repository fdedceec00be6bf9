#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <vector>

#include "rnnpg/network.hpp"

using namespace rnnpg;

namespace {

NetworkConfig cfg(int d, std::vector<int> widths, double r = 1.0, std::uint64_t seed = 7) {
  NetworkConfig c;
  c.input_dim = d;
  c.hidden_widths = std::move(widths);
  c.init_radius = r;
  c.seed = seed;
  return c;
}

Point random_point(Rng& rng, int d) {
  Point x(d);
  for (int i = 0; i < d; ++i) x(i) = rng.uniform();
  return x;
}

// Straight-line evaluator written without Eigen expressions.
std::vector<double> reference_features(const RandomFeatureNet& net, const Point& x) {
  std::vector<double> a(x.data(), x.data() + x.size());
  for (std::size_t l = 0; l < net.weights().size(); ++l) {
    const auto& w = net.weights()[l];
    const auto& b = net.biases()[l];
    std::vector<double> next(w.rows());
    for (Eigen::Index i = 0; i < w.rows(); ++i) {
      double z = b(i);
      for (Eigen::Index j = 0; j < w.cols(); ++j) z += w(i, j) * a[j];
      next[i] = std::tanh(z);
    }
    a = std::move(next);
  }
  return a;
}

}  // namespace

TEST_CASE("build_network shapes and parameter range") {
  const auto net = build_network(cfg(2, {100}));
  REQUIRE(net.weights().size() == 1);
  CHECK(net.weights()[0].rows() == 100);
  CHECK(net.weights()[0].cols() == 2);
  CHECK(net.biases()[0].size() == 100);
  CHECK(net.weights()[0].cwiseAbs().maxCoeff() <= 1.0);
  CHECK(net.biases()[0].cwiseAbs().maxCoeff() <= 1.0);
  CHECK(net.size() == 100);

  const auto deep = build_network(cfg(3, {20, 30, 40}, 0.5));
  REQUIRE(deep.weights().size() == 3);
  CHECK(deep.weights()[1].rows() == 30);
  CHECK(deep.weights()[1].cols() == 20);
  CHECK(deep.weights()[2].cols() == 30);
  for (const auto& w : deep.weights()) CHECK(w.cwiseAbs().maxCoeff() <= 0.5);
}

TEST_CASE("build_network is deterministic per seed and stream") {
  const auto a = build_network(cfg(2, {50}, 1.0, 3));
  const auto b = build_network(cfg(2, {50}, 1.0, 3));
  const auto c = build_network(cfg(2, {50}, 1.0, 4));
  const auto s = build_network(cfg(2, {50}, 1.0, 3), Stream::stress_net);
  CHECK(a.weights()[0] == b.weights()[0]);
  CHECK(a.biases()[0] == b.biases()[0]);
  CHECK(a.weights()[0] != c.weights()[0]);
  CHECK(a.weights()[0] != s.weights()[0]);
}

TEST_CASE("network parameters are uniform on (-1, 1): KS statistic below 0.01") {
  const auto net = build_network(cfg(2, {33334}));
  std::vector<double> draws;
  for (Eigen::Index i = 0; i < net.weights()[0].size(); ++i) draws.push_back(net.weights()[0](i));
  for (Eigen::Index i = 0; i < net.biases()[0].size(); ++i) draws.push_back(net.biases()[0](i));
  REQUIRE(draws.size() >= 100000);
  std::sort(draws.begin(), draws.end());
  const double n = static_cast<double>(draws.size());
  double ks = 0.0;
  for (std::size_t i = 0; i < draws.size(); ++i) {
    const double cdf = (draws[i] + 1.0) / 2.0;
    ks = std::max({ks, std::abs((i + 1) / n - cdf), std::abs(i / n - cdf)});
  }
  CHECK(ks < 0.01);
}

TEST_CASE("invalid configurations are rejected") {
  CHECK_THROWS_AS(build_network(cfg(1, {10})), std::invalid_argument);
  CHECK_THROWS_AS(build_network(cfg(4, {10})), std::invalid_argument);
  CHECK_THROWS_AS(build_network(cfg(2, {})), std::invalid_argument);
  CHECK_THROWS_AS(build_network(cfg(2, {10, 0})), std::invalid_argument);
  CHECK_THROWS_AS(build_network(cfg(2, {10}, 0.0)), std::invalid_argument);
  CHECK_THROWS_AS(build_network(cfg(2, {10}, -1.0)), std::invalid_argument);
  CHECK_THROWS_AS(RandomFeatureNet(cfg(2, {3}), {Eigen::MatrixXd::Zero(3, 3)},
                                   {Eigen::VectorXd::Zero(3)}),
                  std::invalid_argument);
  CHECK_THROWS_AS(RandomFeatureNet(cfg(2, {3}), {Eigen::MatrixXd::Zero(3, 2)},
                                   {Eigen::VectorXd::Zero(2)}),
                  std::invalid_argument);
}

TEST_CASE("zero network has zero features and zero Jacobian") {
  const RandomFeatureNet net(cfg(2, {4}), {Eigen::MatrixXd::Zero(4, 2)}, {Eigen::VectorXd::Zero(4)});
  Point x(2);
  x << 0.3, 0.7;
  CHECK(eval_features(net, x).cwiseAbs().maxCoeff() == 0.0);
  CHECK(eval_feature_jacobian(net, x).cwiseAbs().maxCoeff() == 0.0);
  CHECK(eval_feature_jacobian(net, x, {DerivativeMode::central_difference, 1e-6})
            .cwiseAbs()
            .maxCoeff() == 0.0);
}

TEST_CASE("single neuron closed forms") {
  Eigen::MatrixXd w(1, 2);
  w << 1.0, 0.0;
  const RandomFeatureNet unit(cfg(2, {1}), {w}, {Eigen::VectorXd::Zero(1)});
  Point x(2);
  x << 0.5, 0.9;
  CHECK(eval_features(unit, x)(0) == doctest::Approx(0.46211715726).epsilon(1e-10));

  const double a = 0.7, b = -0.4, c = 0.2;
  w << a, b;
  Eigen::VectorXd bias(1);
  bias << c;
  const RandomFeatureNet net(cfg(2, {1}), {w}, {bias});
  const double t = std::tanh(a * x(0) + b * x(1) + c);
  const auto jac = eval_feature_jacobian(net, x);
  CHECK(jac.rows() == 1);
  CHECK(jac.cols() == 2);
  CHECK(jac(0, 0) == doctest::Approx(a * (1 - t * t)).epsilon(1e-14));
  CHECK(jac(0, 1) == doctest::Approx(b * (1 - t * t)).epsilon(1e-14));
}

TEST_CASE("features match an independent evaluator to 1e-14 and stay in (-1, 1)") {
  Rng rng(11, Stream::test);
  for (const auto& widths : {std::vector<int>{100}, std::vector<int>{30, 25}}) {
    for (int d : {2, 3}) {
      const auto net = build_network(cfg(d, widths));
      for (int k = 0; k < 20; ++k) {
        const Point x = random_point(rng, d);
        const auto phi = eval_features(net, x);
        const auto ref = reference_features(net, x);
        REQUIRE(phi.size() == static_cast<Eigen::Index>(ref.size()));
        for (std::size_t j = 0; j < ref.size(); ++j) {
          CHECK(std::abs(phi(j) - ref[j]) <= 1e-14);
          CHECK(std::abs(phi(j)) < 1.0);
        }
      }
    }
  }
}

TEST_CASE("batch evaluation matches pointwise evaluation") {
  const auto net = build_network(cfg(3, {40}));
  Rng rng(5, Stream::test);
  PointSet pts(3, 17);
  for (Eigen::Index k = 0; k < pts.cols(); ++k) pts.col(k) = random_point(rng, 3);
  Eigen::MatrixXd v;
  std::vector<Eigen::MatrixXd> g;
  net.evaluate(pts, {}, v, g);
  REQUIRE(g.size() == 3);
  for (Eigen::Index k = 0; k < pts.cols(); ++k) {
    CHECK((v.col(k) - eval_features(net, pts.col(k))).cwiseAbs().maxCoeff() == 0.0);
    const auto jac = eval_feature_jacobian(net, pts.col(k));
    for (int i = 0; i < 3; ++i) CHECK((g[i].col(k) - jac.col(i)).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("analytic and central-difference Jacobians agree to 1e-9 at spacing 1e-6") {
  const auto net = build_network(cfg(2, {100}));
  Rng rng(13, Stream::test);
  double worst = 0.0;
  for (int k = 0; k < 20; ++k) {
    const Point x = random_point(rng, 2);
    const auto exact = eval_feature_jacobian(net, x);
    const auto fd = eval_feature_jacobian(net, x, {DerivativeMode::central_difference, 1e-6});
    worst = std::max(worst, (exact - fd).cwiseAbs().maxCoeff());
  }
  CHECK(worst <= 1e-9);
}

TEST_CASE("central differences converge at second order") {
  // Deeper net with larger weights keeps truncation well above round-off.
  const auto net = build_network(cfg(2, {40, 40}, 2.0));
  Rng rng(17, Stream::test);
  PointSet pts(2, 20);
  for (Eigen::Index k = 0; k < pts.cols(); ++k) pts.col(k) = random_point(rng, 2);
  std::vector<Eigen::MatrixXd> exact;
  net.analytic_gradients(pts, exact);
  for (int axis = 0; axis < 2; ++axis) {
    std::vector<double> err;
    for (double delta : {1e-3, 1e-4, 1e-5}) {
      std::vector<Eigen::MatrixXd> fd;
      net.gradients(pts, {DerivativeMode::central_difference, delta}, fd);
      err.push_back((fd[axis] - exact[axis]).norm());
    }
    for (int i = 0; i + 1 < 3; ++i) {
      const double order = std::log10(err[i] / err[i + 1]);
      CAPTURE(axis);
      CAPTURE(order);
      CHECK(std::abs(order - 2.0) <= 0.2);
    }
  }
}

TEST_CASE("dimension mismatch is an error") {
  const auto net = build_network(cfg(2, {5}));
  CHECK_THROWS_AS(eval_features(net, Point::Zero(3)), std::invalid_argument);
  CHECK_THROWS_AS(eval_feature_jacobian(net, Point::Zero(3)), std::invalid_argument);
  CHECK_THROWS_AS(eval_feature_jacobian(net, Point::Zero(2), {DerivativeMode::central_difference, 0.0}),
                  std::invalid_argument);
}

TEST_CASE("Rng streams are independent and reproducible") {
  Rng a(1, Stream::boundary), b(1, Stream::boundary), c(1, Stream::displacement_net);
  for (int i = 0; i < 10; ++i) {
    const double x = a.uniform();
    CHECK(x == b.uniform());
    CHECK(x >= 0.0);
    CHECK(x < 1.0);
    CHECK(x != c.uniform());
  }
  CHECK(a.split(0).uniform() == Rng(1, Stream::boundary).split(0).uniform());
  CHECK(a.split(0).uniform() != a.split(1).uniform());
}
