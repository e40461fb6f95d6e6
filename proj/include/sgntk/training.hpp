#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sgntk/activations.hpp"
#include "sgntk/dataset.hpp"
#include "sgntk/errors.hpp"
#include "sgntk/linalg.hpp"
#include "sgntk/network.hpp"

namespace sgntk {

enum class UpdateRule { GradientDescent, Sgl };

struct TrainConfig {
  double eta = 0.1;
  std::size_t steps = 0;
  UpdateRule rule = UpdateRule::GradientDescent;
  std::optional<SurrogateSpec> surrogate;  // required for Sgl
  /// Loss is 0.5 |f(X) - Y|^2 / loss_scale.
  double loss_scale = 1.0;
  std::size_t record_loss_every = 1;
  /// 0 disables kernel drift tracking.
  std::size_t record_kernel_every = 0;
  /// Slots of the tracked kernel; default: true derivative and the update surrogate.
  std::optional<SurrogateSpec> drift_slot1;
  std::optional<SurrogateSpec> drift_slot2;
  /// Analytic kernel Gram to measure the tracked kernel against.
  std::optional<Matrix> drift_reference;
  double divergence_factor = 1e6;
  /// Warn when eta >= this value.
  std::optional<double> eta_critical;
};

struct DriftSample {
  std::size_t step = 0;
  double from_init = 0.0;
  double from_reference = 0.0;  // NaN without a reference
};

struct TrainTrace {
  std::vector<std::size_t> loss_steps;
  std::vector<double> loss;
  std::vector<DriftSample> drift;
  std::vector<std::string> warnings;
  Network final_network;

  /// sup_t |I_t - I_0|_F over the recorded steps
  double max_drift() const noexcept;
};

/// Raised when the loss becomes non-finite or exceeds divergence_factor
/// times its initial value; carries the trace up to that point.
class TrainingDiverged : public Error {
 public:
  TrainingDiverged(const std::string& what, TrainTrace trace);
  const TrainTrace& trace() const noexcept { return trace_; }

 private:
  TrainTrace trace_;
};

/// 2 / (lambda_min + lambda_max)
double critical_learning_rate(double lambda_min, double lambda_max);

/// Forward Euler on the loss with step eta. Gradient descent back-propagates
/// the true derivative; SGL back-propagates the surrogate while the forward
/// pass keeps the activation.
TrainTrace train(Network net, const Dataset& data, const TrainConfig& cfg);

/// 0.5 |f(X) - Y|^2 / loss_scale
double training_loss(const Network& net, const Dataset& data, double loss_scale = 1.0);

/// Frobenius distances of the empirical kernel along a trajectory to its
/// first element and to `reference` (NaN when absent). Step = index.
std::vector<DriftSample> kernel_drift(std::span<const Network> trajectory, const Points& points,
                                      const SurrogateSpec& s1, const SurrogateSpec& s2,
                                      const Matrix* reference = nullptr);

}  // namespace sgntk
