#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "sgntk/activations.hpp"
#include "sgntk/dataset.hpp"
#include "sgntk/kernel_matrix.hpp"

namespace sgntk {

enum class KernelKind { Nngp, NngpDot, Ntk, CrossNngp, SurrogateSigma, SgNtk };

/// ClosedForm: erf activations through arcsin forms. Quadrature: any
/// activation through Gauss-Hermite, surrogates treated as black boxes.
/// SignLimit: sign activations, the m -> inf limit of erf_m kernels.
enum class KernelMode { ClosedForm, Quadrature, SignLimit };

const char* to_string(KernelKind kind) noexcept;
const char* to_string(KernelMode mode) noexcept;

/// Slot 1 belongs to the first argument x, slot 2 to x'. The derivative
/// slots default to the true derivatives of the respective activations;
/// NNGP, NNGP-dot and NTK only read slot 1.
struct KernelSpec {
  KernelKind kind = KernelKind::Ntk;
  std::size_t depth = 3;
  double sigma_w = 1.0;
  double sigma_b = 0.1;
  ActivationSpec activation1 = make_erf_m(1.0);
  ActivationSpec activation2 = make_erf_m(1.0);
  std::optional<SurrogateSpec> surrogate1;
  std::optional<SurrogateSpec> surrogate2;
  KernelMode mode = KernelMode::ClosedForm;
  std::size_t order = 64;
  /// Use closed forms for erf'/sign-derivative surrogate pairs where they
  /// exist. When false the surrogate slot goes through quadrature.
  bool closed_form_surrogates = true;

  static KernelSpec nngp(std::size_t depth, ActivationSpec activation, KernelMode mode);
  static KernelSpec ntk(std::size_t depth, ActivationSpec activation, KernelMode mode);
  /// I with slot 1 = true derivative, slot 2 = surrogate.
  static KernelSpec sg_ntk(std::size_t depth, ActivationSpec activation, SurrogateSpec surrogate,
                           KernelMode mode);
  static KernelSpec cross_nngp(std::size_t depth, ActivationSpec first, ActivationSpec second, KernelMode mode);

  /// Effective slots after the kind's defaults.
  const ActivationSpec& first_activation() const noexcept { return activation1; }
  const ActivationSpec& second_activation() const noexcept;
  SurrogateSpec first_derivative() const;
  SurrogateSpec second_derivative() const;
  bool symmetric() const;
  void validate() const;
};

/// A kernel value or a divergence marker. Divergent values grow like
/// rate * m^order along the erf_m route.
struct KernelValue {
  double value = 0.0;
  bool divergent = false;
  double rate = 0.0;
  int order = 0;

  static KernelValue finite(double v) { return {v, false, 0.0, 0}; }
  static KernelValue diverging(double rate, int order) { return {0.0, true, rate, order}; }
  /// The finite value, or DivergentKernel.
  double get() const;
};

/// Covariance state at one recursion level: a = Sigma_1(x,x),
/// b = Sigma_2(x',x'), c = Sigma_12(x,x'), det = ab - c^2 tracked without
/// cancellation where possible.
struct Triple {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  double det = 0.0;
};

/// Level-1 state sigma_w^2/n_0 <x,x'> + sigma_b^2.
Triple base_covariance(const KernelSpec& spec, std::span<const double> x, std::span<const double> xp);
/// One NNGP level: sigma_w^2 E[s1(Z1) s2(Z2)] + sigma_b^2 for the activation slots.
Triple next_covariance(const KernelSpec& spec, const Triple& t);
/// sigma_w^2 E[d1(Z1) d2(Z2)] for the derivative slots.
KernelValue derivative_expectation(const KernelSpec& spec, const Triple& t);

/// Evaluates spec.kind at depth spec.depth.
KernelValue evaluate(const KernelSpec& spec, std::span<const double> x, std::span<const double> xp);

double nngp(const KernelSpec& spec, std::size_t depth, std::span<const double> x, std::span<const double> xp);
KernelValue nngp_dot(const KernelSpec& spec, std::size_t depth, std::span<const double> x,
                     std::span<const double> xp);
KernelValue ntk(const KernelSpec& spec, std::size_t depth, std::span<const double> x, std::span<const double> xp);
double cross_nngp(const KernelSpec& spec, std::size_t depth, std::span<const double> x,
                  std::span<const double> xp);
double surrogate_sigma(const KernelSpec& spec, std::size_t depth, std::span<const double> x,
                       std::span<const double> xp);
double sg_ntk(const KernelSpec& spec, std::size_t depth, std::span<const double> x, std::span<const double> xp);

/// Gram of spec.kind between two point lists, rows from `left`.
KernelMatrix analytic_gram(const KernelSpec& spec, const Points& left, const Points& right,
                           std::size_t threads = 1);
KernelMatrix analytic_gram(const KernelSpec& spec, const Points& points, std::size_t threads = 1);

struct ExponentFit {
  double exponent = 0.0;
  double intercept = 0.0;
};

/// Fits log Theta_inf(z) against log(1 - z) for x = (1, 0) and
/// x' = (z, sqrt(1 - z^2)) on log-spaced 1 - z in [gap_lo, gap_hi];
/// returns minus the slope.
ExponentFit singular_exponent(const KernelSpec& spec, std::size_t depth, double gap_lo = 1e-6,
                              double gap_hi = 1e-3, std::size_t samples = 25);

}  // namespace sgntk
