#include "rnnpg/network.hpp"

#include <stdexcept>
#include <string>
#include <utility>

namespace rnnpg {

void NetworkConfig::validate() const {
  if (input_dim != 2 && input_dim != 3)
    throw std::invalid_argument("network input_dim must be 2 or 3, got " +
                                std::to_string(input_dim));
  if (hidden_widths.empty())
    throw std::invalid_argument("network needs at least one hidden layer");
  for (int w : hidden_widths)
    if (w < 1) throw std::invalid_argument("hidden widths must be >= 1");
  if (!(init_radius > 0.0))
    throw std::invalid_argument("init_radius must be positive");
}

namespace {

void check_points(const FeatureBasis& basis, const PointSet& points) {
  if (points.rows() != basis.input_dim())
    throw std::invalid_argument("point dimension " + std::to_string(points.rows()) +
                                " does not match feature input dimension " +
                                std::to_string(basis.input_dim()));
}

}  // namespace

void FeatureBasis::gradients(const PointSet& points, const DerivativeOptions& options,
                             std::vector<Eigen::MatrixXd>& out) const {
  check_points(*this, points);
  if (options.mode == DerivativeMode::analytic) {
    analytic_gradients(points, out);
    return;
  }
  if (!(options.spacing > 0.0))
    throw std::invalid_argument("central difference spacing must be positive");
  const int d = input_dim();
  out.resize(d);
  Eigen::MatrixXd plus, minus;
  for (int i = 0; i < d; ++i) {
    PointSet shifted = points;
    shifted.row(i).array() += options.spacing;
    values(shifted, plus);
    shifted.row(i).array() -= 2.0 * options.spacing;
    values(shifted, minus);
    out[i] = (plus - minus) / (2.0 * options.spacing);
  }
}

void FeatureBasis::evaluate(const PointSet& points, const DerivativeOptions& options,
                            Eigen::MatrixXd& values_out,
                            std::vector<Eigen::MatrixXd>& gradients_out) const {
  check_points(*this, points);
  values(points, values_out);
  gradients(points, options, gradients_out);
}

RandomFeatureNet::RandomFeatureNet(const NetworkConfig& config, Rng& rng)
    : config_(config) {
  config_.validate();
  const double r = config_.init_radius;
  int fan_in = config_.input_dim;
  for (int width : config_.hidden_widths) {
    Eigen::MatrixXd w(width, fan_in);
    Eigen::VectorXd b(width);
    // Row-major draw order: neuron by neuron, weights then bias.
    for (int i = 0; i < width; ++i) {
      for (int k = 0; k < fan_in; ++k) w(i, k) = rng.uniform(-r, r);
      b(i) = rng.uniform(-r, r);
    }
    weights_.push_back(std::move(w));
    biases_.push_back(std::move(b));
    fan_in = width;
  }
}

RandomFeatureNet::RandomFeatureNet(const NetworkConfig& config,
                                   std::vector<Eigen::MatrixXd> weights,
                                   std::vector<Eigen::VectorXd> biases)
    : config_(config), weights_(std::move(weights)), biases_(std::move(biases)) {
  config_.validate();
  check_shapes();
}

void RandomFeatureNet::check_shapes() const {
  if (weights_.size() != config_.hidden_widths.size() ||
      biases_.size() != config_.hidden_widths.size())
    throw std::invalid_argument("layer count does not match hidden_widths");
  int fan_in = config_.input_dim;
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    const int width = config_.hidden_widths[l];
    if (weights_[l].rows() != width || weights_[l].cols() != fan_in ||
        biases_[l].size() != width)
      throw std::invalid_argument("layer " + std::to_string(l + 1) +
                                  " has inconsistent dimensions");
    fan_in = width;
  }
}

void RandomFeatureNet::values(const PointSet& points, Eigen::MatrixXd& out) const {
  check_points(*this, points);
  Eigen::MatrixXd h = points;
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    Eigen::MatrixXd z = weights_[l] * h;
    z.colwise() += biases_[l];
    h = z.array().tanh().matrix();
  }
  out = std::move(h);
}

void RandomFeatureNet::analytic_gradients(const PointSet& points,
                                          std::vector<Eigen::MatrixXd>& out) const {
  check_points(*this, points);
  const int d = input_dim();
  const Eigen::Index q = points.cols();

  // Forward-mode chain rule: dh_i carries d(layer output)/dx_i.
  Eigen::MatrixXd h = points;
  std::vector<Eigen::MatrixXd> dh(d);
  for (int i = 0; i < d; ++i) {
    dh[i] = Eigen::MatrixXd::Zero(d, q);
    dh[i].row(i).setOnes();
  }
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    Eigen::MatrixXd z = weights_[l] * h;
    z.colwise() += biases_[l];
    h = z.array().tanh().matrix();
    const Eigen::ArrayXXd slope = 1.0 - h.array().square();
    for (int i = 0; i < d; ++i) {
      if (l == 0) {
        // W * e_i broadcast over points
        dh[i] = (slope.colwise() * weights_[0].col(i).array()).matrix();
      } else {
        dh[i] = (slope * (weights_[l] * dh[i]).array()).matrix();
      }
    }
  }
  out = std::move(dh);
}

RandomFeatureNet build_network(const NetworkConfig& config, Stream stream) {
  Rng rng(config.seed, stream);
  return RandomFeatureNet(config, rng);
}

Eigen::VectorXd eval_features(const FeatureBasis& basis, const Point& x) {
  PointSet p = x;
  Eigen::MatrixXd v;
  basis.values(p, v);
  return v.col(0);
}

Eigen::MatrixXd eval_feature_jacobian(const FeatureBasis& basis, const Point& x,
                                      const DerivativeOptions& options) {
  PointSet p = x;
  std::vector<Eigen::MatrixXd> g;
  basis.gradients(p, options, g);
  Eigen::MatrixXd jac(basis.size(), basis.input_dim());
  for (int i = 0; i < basis.input_dim(); ++i) jac.col(i) = g[i].col(0);
  return jac;
}

}  // namespace rnnpg
