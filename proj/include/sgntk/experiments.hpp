#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "sgntk/activations.hpp"
#include "sgntk/analytic_kernels.hpp"
#include "sgntk/report.hpp"

namespace sgntk {

/// Empirical vs analytic kernel curves over widths and erf scales.
struct ConvergenceConfig {
  std::vector<std::size_t> widths{10, 100, 500};
  std::vector<double> m_values{2.0, 5.0, 20.0};
  std::size_t seeds = 3;
  std::size_t steps = 2000;
  std::size_t depth = 3;
  std::size_t grid = 128;
  std::size_t train_points = 15;
  double eta = 0.1;
  double sigma_w = 1.0;
  double sigma_b = 0.1;
  /// 0: use the training-set size (mean loss)
  double loss_scale = 0.0;
  std::uint64_t seed = 0;
  std::size_t threads = 0;

  static ConvergenceConfig paper_scale();
};

/// Gradient descent, empirical NTK against Theta_m and Theta_inf.
ExperimentReport run_fig1(const ConvergenceConfig& cfg);
/// SGL with `surrogate`, empirical SG-NTK against I_m and I_sign. Without a
/// surrogate the true derivative is used, which reproduces run_fig1.
ExperimentReport run_fig2(const ConvergenceConfig& cfg, std::optional<SurrogateSpec> surrogate = make_erf_derivative());

/// Independently initialized and trained networks evaluated on a test grid.
struct EnsembleConfig {
  ActivationSpec activation = make_sign();
  std::optional<SurrogateSpec> surrogate = make_erf_derivative();  // empty: gradient descent
  std::size_t width = 256;
  std::size_t depth = 3;
  std::size_t count = 100;
  std::size_t steps = 10000;
  std::size_t test_points = 256;
  std::size_t train_points = 15;
  std::size_t record_loss_every = 100;
  double eta = 0.1;
  double kappa = 1.0;
  double sigma_w = 1.0;
  double sigma_b = 0.1;
  double loss_scale = 1.0;
  std::uint64_t seed = 0;
  std::size_t threads = 0;

  static EnsembleConfig paper_scale();
};

struct EnsembleResult {
  std::vector<double> angles;
  std::vector<std::vector<double>> outputs;  // [member][angle]
  std::vector<double> mean;
  std::vector<double> std;
  std::vector<double> se;
  std::vector<std::vector<double>> losses;  // [member][recorded step]
  std::vector<std::size_t> loss_steps;
  std::size_t diverged = 0;
};

EnsembleResult run_ensemble(const EnsembleConfig& cfg);

/// Kernel spec matching a trained ensemble: SG-NTK (or NTK without a
/// surrogate), sign-limit for sign activations, closed form for erf.
KernelSpec ensemble_kernel(const EnsembleConfig& cfg);

/// Ensemble tables only.
ExperimentReport run_train_ensemble(const EnsembleConfig& cfg);
/// Ensemble plus the SG-NTK GP mean and band and the NNGP regression baseline.
ExperimentReport run_fig3(const EnsembleConfig& cfg);

}  // namespace sgntk
