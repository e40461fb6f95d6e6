#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "sgntk/activations.hpp"
#include "sgntk/linalg.hpp"

namespace sgntk {

struct NetworkConfig {
  std::vector<std::size_t> widths;  // n_0 .. n_L
  double sigma_w = 1.0;
  double sigma_b = 0.1;
  double kappa = 1.0;
  ActivationSpec activation = make_erf_m(1.0);
  std::uint64_t seed = 0;

  /// n_0 inputs, `depth - 1` hidden layers of `width`, `outputs` outputs.
  static NetworkConfig mlp(std::size_t inputs, std::size_t width, std::size_t depth,
                           std::size_t outputs, ActivationSpec activation, std::uint64_t seed);

  std::size_t depth() const noexcept { return widths.empty() ? 0 : widths.size() - 1; }
  std::size_t input_dim() const noexcept { return widths.front(); }
  std::size_t output_dim() const noexcept { return widths.back(); }
  /// sum_l n_l (n_{l-1} + 1)
  std::size_t parameter_count() const noexcept;
  void validate() const;
};

struct Layer {
  Matrix weights;             // n_l x n_{l-1}
  std::vector<double> biases;  // n_l
};

/// Preactivations h^(1..L) and post-activations a^(0..L-1), a^(0) = x.
struct ForwardPass {
  std::vector<std::vector<double>> preacts;
  std::vector<std::vector<double>> acts;

  const std::vector<double>& output() const { return preacts.back(); }
};

class Network {
 public:
  /// W^(l), b^(l) entries are standard normals from
  /// CounterRng(seed).stream("layer").stream(l).stream("W" / "b"), indexed by
  /// row-major entry position. The last layer is multiplied by kappa.
  static Network init(const NetworkConfig& config);

  Network(NetworkConfig config, std::vector<Layer> layers);

  const NetworkConfig& config() const noexcept { return config_; }
  std::size_t depth() const noexcept { return layers_.size(); }
  const Layer& layer(std::size_t l) const { return layers_.at(l - 1); }  // 1-based
  Layer& layer(std::size_t l) { return layers_.at(l - 1); }
  const std::vector<Layer>& layers() const noexcept { return layers_; }

  ForwardPass forward(std::span<const double> x) const;
  /// Forward pass with a different activation on the same weights.
  ForwardPass forward(std::span<const double> x, const ActivationSpec& activation) const;
  std::vector<double> output(std::span<const double> x) const;

  /// Layer-ordered flat parameters: per layer the weights row-major, then biases.
  std::vector<double> parameters() const;
  void set_parameters(std::span<const double> flat);

 private:
  NetworkConfig config_;
  std::vector<Layer> layers_;
};

/// Backward sweep with `surrogate` in place of the activation derivative:
/// g^(L) = cotangent, g^(l-1) = sigma_w/sqrt(n_{l-1}) (W^(l)^T g^(l)) * s(h^(l-1)).
/// Returns g^(1..L) (index 0 holds g^(1)).
std::vector<std::vector<double>> backward(const Network& net, const ForwardPass& pass,
                                          std::span<const double> cotangent, const ScalarFn& surrogate);

struct EnsembleStatistics {
  std::size_t count = 0;
  std::size_t points = 0;
  std::size_t outputs = 0;
  Matrix mean;         // points x n_L, first activation
  Matrix mean_second;  // paired mode only
  /// per output neuron j: Cov[f_j(x_p), g_j(x_q)] with g = f unless paired
  std::vector<Matrix> cov;
  /// standard error of each covariance entry
  std::vector<Matrix> cov_se;
};

/// Sample statistics of `count` fresh initializations; member k uses
/// derive_seed(config.seed, "ensemble", k).
EnsembleStatistics ensemble_statistics(const NetworkConfig& config, std::size_t count,
                                       const std::vector<std::vector<double>>& points,
                                       std::size_t threads = 0);

/// Shared-weight pairs: each member evaluates config.activation and `second`
/// on identical parameters; cov holds the cross covariance.
EnsembleStatistics ensemble_statistics_paired(const NetworkConfig& config, const ActivationSpec& second,
                                              std::size_t count,
                                              const std::vector<std::vector<double>>& points,
                                              std::size_t threads = 0);

}  // namespace sgntk
