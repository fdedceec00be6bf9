#pragma once

#include <cstdint>
#include <vector>

#include "rnnpg/random.hpp"
#include "rnnpg/types.hpp"

namespace rnnpg {

enum class Activation { tanh };

struct NetworkConfig {
  int input_dim = 2;
  std::vector<int> hidden_widths{100};
  double init_radius = 1.0;
  Activation activation = Activation::tanh;
  std::uint64_t seed = 0;

  /// Throws std::invalid_argument on bad dimensions or radius.
  void validate() const;
};

enum class DerivativeMode { analytic, central_difference };

struct DerivativeOptions {
  DerivativeMode mode = DerivativeMode::analytic;
  double spacing = 1e-6;
};

/// A finite family of scalar trial functions Phi_1..Phi_n on R^d.
///
/// Batch layout: `points` is d x q (one point per column); `values` is n x q
/// with values(j, k) = Phi_j(x_k); `gradients[i]` is n x q holding
/// dPhi_j/dx_i. Implementations are immutable and safe to share.
class FeatureBasis {
 public:
  virtual ~FeatureBasis() = default;

  virtual int input_dim() const = 0;
  virtual int size() const = 0;

  virtual void values(const PointSet& points, Eigen::MatrixXd& out) const = 0;
  virtual void analytic_gradients(const PointSet& points,
                                  std::vector<Eigen::MatrixXd>& out) const = 0;

  /// Values and gradients together; gradients follow `options`.
  void evaluate(const PointSet& points, const DerivativeOptions& options,
                Eigen::MatrixXd& values_out,
                std::vector<Eigen::MatrixXd>& gradients_out) const;

  void gradients(const PointSet& points, const DerivativeOptions& options,
                 std::vector<Eigen::MatrixXd>& out) const;
};

/// Randomized feedforward network with frozen hidden layers. The features
/// are the activations of the last hidden layer; output-layer weights are
/// not stored here (they are the unknowns of the least-squares system).
class RandomFeatureNet final : public FeatureBasis {
 public:
  /// Draws every weight and bias i.i.d. from U(-r, r) using `rng`.
  RandomFeatureNet(const NetworkConfig& config, Rng& rng);

  /// Explicit parameters; weights[l] is n_l x n_{l-1}.
  RandomFeatureNet(const NetworkConfig& config, std::vector<Eigen::MatrixXd> weights,
                   std::vector<Eigen::VectorXd> biases);

  const NetworkConfig& config() const { return config_; }
  const std::vector<Eigen::MatrixXd>& weights() const { return weights_; }
  const std::vector<Eigen::VectorXd>& biases() const { return biases_; }

  int input_dim() const override { return config_.input_dim; }
  int size() const override { return config_.hidden_widths.back(); }

  void values(const PointSet& points, Eigen::MatrixXd& out) const override;
  void analytic_gradients(const PointSet& points,
                          std::vector<Eigen::MatrixXd>& out) const override;

 private:
  void check_shapes() const;

  NetworkConfig config_;
  std::vector<Eigen::MatrixXd> weights_;
  std::vector<Eigen::VectorXd> biases_;
};

/// Builds the network from config.seed on the given substream.
RandomFeatureNet build_network(const NetworkConfig& config,
                               Stream stream = Stream::displacement_net);

/// Phi_{D-1}(x) at a single point.
Eigen::VectorXd eval_features(const FeatureBasis& basis, const Point& x);

/// n x d matrix of dPhi_j/dx_i at a single point.
Eigen::MatrixXd eval_feature_jacobian(const FeatureBasis& basis, const Point& x,
                                      const DerivativeOptions& options = {});

}  // namespace rnnpg
