#include "sgntk/dual_expectations.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>

#include "sgntk/errors.hpp"
#include "sgntk/linalg.hpp"
#include "sgntk/rng.hpp"

namespace sgntk {

namespace {

constexpr double kArcsinTolerance = 1e-9;
constexpr double kRhoClamp = 1.0 - 1e-12;

double clamped_arcsin(double arg) {
  if (!std::isfinite(arg) || std::abs(arg) > 1.0 + kArcsinTolerance) {
    raise(Errc::InvalidCov, "correlation outside [-1, 1]");
  }
  return std::asin(std::clamp(arg, -1.0, 1.0));
}

void check_scale(double m) {
  if (!(m > 0.0) || !std::isfinite(m)) raise(Errc::InvalidScale, "scale m must be > 0");
}

/// Correlation of c with the quadrature clamp applied; 0 when a variance vanishes.
double clamped_rho(const Cov2& c) {
  if (c.s11 <= 0.0 || c.s22 <= 0.0) return 0.0;
  const double rho = c.s12 / std::sqrt(c.s11 * c.s22);
  return std::copysign(std::min(std::abs(rho), kRhoClamp), rho);
}

/// Variance of Z2 given Z1 = 0.
double conditional_variance(const Cov2& c) {
  if (c.s11 <= 0.0) return c.s22;
  return std::max(0.0, c.s22 - c.s12 * c.s12 / c.s11);
}

}  // namespace

bool Cov2::invertible(double tol) const noexcept {
  return det() > tol * std::max(1.0, s11 * s22);
}

void Cov2::check() const {
  if (!(s11 >= 0.0) || !(s22 >= 0.0) || !std::isfinite(s12)) {
    raise(Errc::InvalidCov, "negative or non-finite variance");
  }
  if (det() < -1e-12 * std::max(1.0, s11 * s22)) raise(Errc::InvalidCov, "negative determinant");
}

double t_erf_pair(const Cov2& c, double m1, double m2) {
  c.check();
  check_scale(m1);
  check_scale(m2);
  const double denom = std::sqrt((1.0 + 2.0 * m1 * m1 * c.s11) * (1.0 + 2.0 * m2 * m2 * c.s22));
  return 2.0 / std::numbers::pi * clamped_arcsin(2.0 * m1 * m2 * c.s12 / denom);
}

double tdot_erf_pair(const Cov2& c, double m1, double m2) {
  c.check();
  check_scale(m1);
  check_scale(m2);
  // |I + 2 D c D| expanded so the determinant term does not cancel for large scales
  const double d = std::max(c.det(), 0.0);
  const double det = 1.0 + 2.0 * (m1 * m1 * c.s11 + m2 * m2 * c.s22) + 4.0 * m1 * m1 * m2 * m2 * d;
  return 4.0 / std::numbers::pi * m1 * m2 / std::sqrt(det);
}

double t_erf(const Cov2& c) { return t_erf_pair(c, 1.0, 1.0); }
double tdot_erf(const Cov2& c) { return tdot_erf_pair(c, 1.0, 1.0); }
double t_erf_m(const Cov2& c, double m) { return t_erf_pair(c, m, m); }
double tdot_erf_m(const Cov2& c, double m) { return tdot_erf_pair(c, m, m); }

const GaussHermite& gauss_hermite(std::size_t order) {
  if (order < 1 || order > 512) raise(Errc::InvalidArgument, "Gauss-Hermite order out of range");
  static std::mutex mutex;
  static std::map<std::size_t, std::unique_ptr<GaussHermite>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[order];
  if (slot) return *slot;

  // Jacobi matrix of the monic probabilists' Hermite recurrence
  Matrix jacobi(order, order);
  for (std::size_t k = 1; k < order; ++k) {
    jacobi(k, k - 1) = jacobi(k - 1, k) = std::sqrt(static_cast<double>(k));
  }
  const SymEig eig = eig_sym(jacobi);
  auto rule = std::make_unique<GaussHermite>();
  rule->nodes = eig.values;
  rule->weights.resize(order);
  double total = 0.0;
  for (std::size_t k = 0; k < order; ++k) {
    const double v = eig.vectors(0, k);
    rule->weights[k] = v * v;
    total += v * v;
  }
  for (double& w : rule->weights) w /= total;
  // exact symmetry of the rule
  for (std::size_t k = 0; k < order / 2; ++k) {
    const std::size_t j = order - 1 - k;
    const double x = 0.5 * (rule->nodes[j] - rule->nodes[k]);
    const double w = 0.5 * (rule->weights[j] + rule->weights[k]);
    rule->nodes[k] = -x;
    rule->nodes[j] = x;
    rule->weights[k] = rule->weights[j] = w;
  }
  if (order % 2 == 1) rule->nodes[order / 2] = 0.0;
  slot = std::move(rule);
  return *slot;
}

double gh_expect_1d(double variance, const ScalarFn& g, std::size_t order) {
  if (!(variance >= 0.0)) raise(Errc::InvalidCov, "negative variance");
  if (variance == 0.0) return g(0.0);
  const GaussHermite& rule = gauss_hermite(order);
  const double sd = std::sqrt(variance);
  double sum = 0.0;
  for (std::size_t k = 0; k < rule.nodes.size(); ++k) sum += rule.weights[k] * g(sd * rule.nodes[k]);
  return sum;
}

double gh_expect(const Cov2& c, const ScalarFn& g1, const ScalarFn& g2, std::size_t order) {
  c.check();
  if (order < 8 || order > 256) raise(Errc::InvalidArgument, "quadrature order must lie in [8, 256]");
  const GaussHermite& rule = gauss_hermite(order);
  const double sd1 = std::sqrt(c.s11);
  const double sd2 = std::sqrt(c.s22);
  const double rho = clamped_rho(c);
  const double tail = std::sqrt(1.0 - rho * rho);
  const std::size_t q = rule.nodes.size();

  std::vector<double> outer(q);
  for (std::size_t i = 0; i < q; ++i) outer[i] = g1(sd1 * rule.nodes[i]);
  double sum = 0.0;
  for (std::size_t i = 0; i < q; ++i) {
    if (outer[i] == 0.0) continue;
    double inner = 0.0;
    for (std::size_t j = 0; j < q; ++j) {
      inner += rule.weights[j] * g2(sd2 * (rho * rule.nodes[i] + tail * rule.nodes[j]));
    }
    sum += rule.weights[i] * outer[i] * inner;
  }
  return sum;
}

double erf_derivative_expect(const Cov2& c, double m, const ScalarFn& g, std::size_t order) {
  c.check();
  check_scale(m);
  const double a = c.s11;
  const double scale = 1.0 + 2.0 * m * m * a;
  double tau2 = c.s22;
  if (a > 0.0) {
    const double v = a / scale;
    const double beta = c.s12 / a;
    tau2 = conditional_variance(c) + beta * beta * v;
  }
  const double front = 2.0 * m / std::sqrt(std::numbers::pi) / std::sqrt(scale);
  return front * gh_expect_1d(tau2, g, order);
}

double dirac_expect(const Cov2& c, const ScalarFn& g, std::size_t order) {
  c.check();
  if (!(c.s11 > 0.0)) raise(Errc::InvalidCov, "Dirac expectation needs a positive variance");
  const double front = std::sqrt(2.0 / std::numbers::pi) / std::sqrt(c.s11);
  return front * gh_expect_1d(conditional_variance(c), g, order);
}

McEstimate mc_expect(const Cov2& c, const ScalarFn& g1, const ScalarFn& g2, std::size_t samples,
                     std::uint64_t seed) {
  c.check();
  if (samples < 2) raise(Errc::InvalidArgument, "need at least two samples");
  const CounterRng rng = CounterRng(seed).stream("mc_expect");
  const double l11 = std::sqrt(c.s11);
  const double l21 = l11 > 0.0 ? c.s12 / l11 : 0.0;
  const double l22 = std::sqrt(std::max(0.0, c.s22 - l21 * l21));
  double mean = 0.0;
  double m2 = 0.0;
  for (std::size_t k = 0; k < samples; ++k) {
    const double u = rng.normal(2 * k);
    const double w = rng.normal(2 * k + 1);
    const double v = g1(l11 * u) * g2(l21 * u + l22 * w);
    const double delta = v - mean;
    mean += delta / static_cast<double>(k + 1);
    m2 += delta * (v - mean);
  }
  const double n = static_cast<double>(samples);
  return {mean, std::sqrt(m2 / (n - 1.0) / n)};
}

}  // namespace sgntk
