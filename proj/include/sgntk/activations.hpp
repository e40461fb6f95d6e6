#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>

namespace sgntk {

using ScalarFn = std::function<double(double)>;

enum class ActivationKind { Erf, Sign, Custom };

/// Surrogate kinds the analytic kernels know how to integrate in closed or
/// semi-closed form. DiracSign is the distributional derivative 2*delta of
/// sign and has no pointwise values.
enum class SurrogateKind { ErfDerivative, DiracSign, Rect, Sech2, Custom };

/// |sigma(u)| <= c + m|u|
struct Envelope {
  double c = 0.0;
  double m = 0.0;
};

struct SurrogateSpec {
  std::string name;
  SurrogateKind kind = SurrogateKind::Custom;
  double scale = 1.0;  // m for ErfDerivative, width for Rect, beta for Sech2
  ScalarFn eval;
  double bound = 0.0;
  double lipschitz = 0.0;

  double operator()(double z) const { return eval(z); }
  bool is_dirac() const noexcept { return kind == SurrogateKind::DiracSign; }
};

struct ActivationSpec {
  std::string name;
  ActivationKind kind = ActivationKind::Custom;
  double scale = 1.0;  // m for erf_m
  ScalarFn eval;
  std::optional<ScalarFn> deriv;  // empty: undefined almost everywhere (sign)
  Envelope envelope;

  double operator()(double z) const { return eval(z); }
  bool differentiable() const noexcept { return deriv.has_value(); }

  /// The true derivative as a surrogate slot: erf_m -> ErfDerivative(m),
  /// sign -> DiracSign, custom -> Custom wrapping deriv.
  SurrogateSpec derivative() const;
};

/// erf(m z)
ActivationSpec make_erf_m(double m);
/// sign with sign(0) = 0
ActivationSpec make_sign();
ActivationSpec make_custom_activation(std::string name, ScalarFn eval, std::optional<ScalarFn> deriv,
                                      Envelope envelope);

/// d/dz erf(m z) = 2m/sqrt(pi) exp(-m^2 z^2); m = 1 is the "derf" surrogate.
SurrogateSpec make_erf_derivative(double m = 1.0);
/// 1{|z| <= width/2}
SurrogateSpec make_rect(double width = 1.0);
/// beta * sech^2(beta z), the derivative of tanh(beta z)
SurrogateSpec make_sech2(double beta = 1.0);
SurrogateSpec make_dirac_sign();
SurrogateSpec make_custom_surrogate(std::string name, ScalarFn eval, double bound, double lipschitz);

/// "erf:m=<float>" | "erf" | "sign"
ActivationSpec parse_activation(std::string_view text);
/// "derf" | "derf:m=<float>" | "rect:w=<float>" | "sech2:b=<float>"
SurrogateSpec parse_surrogate(std::string_view text);

}  // namespace sgntk
