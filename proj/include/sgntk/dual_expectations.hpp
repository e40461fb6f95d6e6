#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "sgntk/activations.hpp"

namespace sgntk {

/// Covariance of a centered bivariate Gaussian (Z1, Z2).
struct Cov2 {
  double s11 = 0.0;
  double s22 = 0.0;
  double s12 = 0.0;

  double det() const noexcept { return s11 * s22 - s12 * s12; }
  bool invertible(double tol = 1e-12) const noexcept;
  /// Throws InvalidCov on negative variances or a determinant below roundoff.
  void check() const;
};

/// E[erf(Z1) erf(Z2)]
double t_erf(const Cov2& c);
/// E[erf'(Z1) erf'(Z2)]
double tdot_erf(const Cov2& c);
/// E[erf(m Z1) erf(m Z2)]
double t_erf_m(const Cov2& c, double m);
/// E[erf_m'(Z1) erf_m'(Z2)] with erf_m'(z) = 2m/sqrt(pi) exp(-m^2 z^2)
double tdot_erf_m(const Cov2& c, double m);
/// E[erf(m1 Z1) erf(m2 Z2)]
double t_erf_pair(const Cov2& c, double m1, double m2);
/// E[erf_{m1}'(Z1) erf_{m2}'(Z2)]
double tdot_erf_pair(const Cov2& c, double m1, double m2);

/// Probabilists' Gauss-Hermite rule: sum_k w_k g(x_k) ~ E[g(Z)], Z ~ N(0,1).
struct GaussHermite {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Golub-Welsch nodes and weights, computed once per order and cached.
const GaussHermite& gauss_hermite(std::size_t order);

/// E[g(Y)], Y ~ N(0, variance)
double gh_expect_1d(double variance, const ScalarFn& g, std::size_t order = 64);

/// E[g1(Z1) g2(Z2)] by tensor-product Gauss-Hermite after factoring c.
double gh_expect(const Cov2& c, const ScalarFn& g1, const ScalarFn& g2, std::size_t order = 64);

/// E[erf_m'(Z1) g(Z2)] computed exactly in Z1: the Gaussian factor of
/// erf_m' tilts the law of Z1, leaving a one-dimensional expectation of g.
/// Accurate for large m where erf_m' is too peaked for a product rule.
double erf_derivative_expect(const Cov2& c, double m, const ScalarFn& g, std::size_t order = 64);

/// E[2 delta(Z1) g(Z2)] = 2 p_{Z1}(0) E[g(Z2) | Z1 = 0]; the m -> inf limit
/// of erf_derivative_expect. Requires s11 > 0.
double dirac_expect(const Cov2& c, const ScalarFn& g, std::size_t order = 64);

struct McEstimate {
  double estimate = 0.0;
  double standard_error = 0.0;
};

McEstimate mc_expect(const Cov2& c, const ScalarFn& g1, const ScalarFn& g2, std::size_t samples,
                     std::uint64_t seed);

}  // namespace sgntk
