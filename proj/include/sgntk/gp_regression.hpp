#pragma once

#include <functional>
#include <optional>
#include <span>
#include <utility>

#include "sgntk/analytic_kernels.hpp"
#include "sgntk/dataset.hpp"
#include "sgntk/kernel_matrix.hpp"
#include "sgntk/linalg.hpp"

namespace sgntk {

/// Gram between two point lists, rows from the first.
using GramFn = std::function<KernelMatrix(const Points&, const Points&)>;

GramFn gram_fn(const KernelSpec& spec, std::size_t threads = 1);

/// The NNGP matching a dynamics kernel: NTK -> NNGP, SG-NTK -> cross NNGP of
/// its two activations, NNGP -> itself.
KernelSpec prior_spec(const KernelSpec& dynamics);

/// Output distribution of infinitely wide networks trained by gradient flow
/// with kernel K for time t (t = inf when empty), starting from the prior
/// GP with covariance S:
///   A = K(T,X) K^-1 (I - exp(-eta K t)),  mean = A Y,
///   cov = S(T,T) - S(T,X) A^T - A S(X,T) + A S(X,X) A^T.
/// With kappa < 1 the last layer is scaled at init: K -> S + kappa^2 (K - S),
/// S -> kappa^2 S.
class GPPosterior {
 public:
  GPPosterior(const KernelSpec& dynamics, Dataset train, std::optional<double> time = std::nullopt,
              double eta = 0.1, double kappa = 1.0, std::size_t threads = 1);
  GPPosterior(GramFn dynamics, GramFn prior, bool symmetric, Dataset train,
              std::optional<double> time = std::nullopt, double eta = 0.1, double kappa = 1.0);

  /// |T| x n_L
  Matrix mean(const Points& test) const;
  /// |T| x |T|, shared by every output neuron
  Matrix covariance(const Points& test) const;
  std::vector<double> variance(const Points& test) const;

  const Matrix& gram() const noexcept { return k_xx_; }
  const Dataset& train_set() const noexcept { return train_; }
  std::optional<double> time() const noexcept { return time_; }

 private:
  Matrix kernel(const Points& left, const Points& right) const;
  Matrix prior(const Points& left, const Points& right) const;
  Matrix weights_for(const Points& test) const;  // A

  GramFn dynamics_;
  GramFn prior_;
  bool symmetric_;
  Dataset train_;
  std::optional<double> time_;
  double eta_;
  double kappa_;
  Matrix k_xx_;
  Matrix s_xx_;
  Matrix w_;   // K^-1 (I - exp(-eta K t))
  Matrix wy_;  // w_ Y
};

using PairKernel = std::function<double(std::span<const double>, std::span<const double>)>;

/// sign(sum_i K(x, x_i) y_i); the label of x_i when x equals x_i exactly;
/// 0 on exact ties.
int nw_classify(const KernelSpec& spec, const Points& train_x, std::span<const double> labels,
                std::span<const double> x);
int nw_classify(const PairKernel& kernel, const Points& train_x, std::span<const double> labels,
                std::span<const double> x);

/// Extreme eigenvalues of (K + K^T) / 2.
std::pair<double, double> gram_spectrum(const Matrix& k);
std::pair<double, double> gram_spectrum(const KernelSpec& spec, const Points& x);

}  // namespace sgntk
