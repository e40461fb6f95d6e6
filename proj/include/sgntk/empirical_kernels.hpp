#pragma once

#include <span>
#include <string>
#include <vector>

#include "sgntk/activations.hpp"
#include "sgntk/kernel_matrix.hpp"
#include "sgntk/network.hpp"

namespace sgntk {

/// n_L x P matrix of output derivatives where back-propagation uses the
/// surrogate in place of the activation derivative. Columns run over layers
/// 1..L; within a layer the weights (row-major) come before the biases.
struct QuasiJacobian {
  Matrix matrix;
  std::string activation;
  std::string surrogate;
};

QuasiJacobian quasi_jacobian(const Network& net, const SurrogateSpec& surrogate, std::span<const double> x);
QuasiJacobian quasi_jacobian(const Network& net, const ScalarFn& surrogate, std::span<const double> x,
                             const std::string& surrogate_name = "custom");

/// Per-point pieces of a quasi-Jacobian: post-activations a^(0..L-1) and,
/// per layer l, the n_L x n_l back-propagated sensitivities (row i starts
/// from output neuron i). J J'^T follows without materializing P columns.
struct KernelFactors {
  std::vector<std::vector<double>> acts;
  std::vector<Matrix> deltas;
};

KernelFactors kernel_factors(const Network& net, const ScalarFn& surrogate, std::span<const double> x);

/// n_L x n_L block J1(x) J2(x')^T from precomputed factors.
Matrix factored_kernel(const Network& net, const KernelFactors& left, const KernelFactors& right);

/// J^{s1}(x) J^{s2}(x')^T; with s1 = s2 = true derivative this is the empirical NTK.
Matrix empirical_generalized_ntk(const Network& net, const SurrogateSpec& s1, const SurrogateSpec& s2,
                                 std::span<const double> x, std::span<const double> xp);

/// Block Gram over all pairs: entry (p n_L + i, q n_L + j) is the (i, j)
/// element of the kernel at (points[p], points[q]).
KernelMatrix kernel_gram(const Network& net, const SurrogateSpec& s1, const SurrogateSpec& s2,
                         const std::vector<std::vector<double>>& points, std::size_t threads = 1);
KernelMatrix kernel_gram(const Network& net, const ScalarFn& s1, const ScalarFn& s2,
                         const std::vector<std::vector<double>>& points, std::size_t threads = 1);

/// Gram between two point lists (rows from `left`, columns from `right`).
Matrix kernel_cross(const Network& net, const ScalarFn& s1, const ScalarFn& s2,
                    const std::vector<std::vector<double>>& left, const std::vector<std::vector<double>>& right,
                    std::size_t threads = 1);

/// Evaluator of a surrogate slot; MissingSurrogate for the sign derivative.
ScalarFn pointwise(const SurrogateSpec& s);

}  // namespace sgntk
