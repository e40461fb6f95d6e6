#include "sgntk/activations.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "sgntk/errors.hpp"

namespace sgntk {

namespace {

std::string format_scale(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) raise(Errc::InvalidScale, std::string(what) + " must be > 0");
}

/// Splits "head:key=value" into head and the numeric value of `key`.
std::optional<double> parse_parameter(std::string_view text, std::string_view head, char key) {
  if (text.size() == head.size()) return std::nullopt;
  const std::string_view rest = text.substr(head.size());
  if (rest.size() < 4 || rest[0] != ':' || rest[1] != key || rest[2] != '=') {
    raise(Errc::ParseError, "expected '" + std::string(head) + ":" + key + "=<float>', got '" +
                                std::string(text) + "'");
  }
  const std::string number(rest.substr(3));
  try {
    std::size_t used = 0;
    const double v = std::stod(number, &used);
    if (used != number.size()) throw std::invalid_argument(number);
    return v;
  } catch (const std::exception&) {
    raise(Errc::ParseError, "bad number in '" + std::string(text) + "'");
  }
}

bool has_head(std::string_view text, std::string_view head) {
  return text.substr(0, head.size()) == head &&
         (text.size() == head.size() || text[head.size()] == ':');
}

}  // namespace

SurrogateSpec ActivationSpec::derivative() const {
  switch (kind) {
    case ActivationKind::Erf: return make_erf_derivative(scale);
    case ActivationKind::Sign: return make_dirac_sign();
    case ActivationKind::Custom:
      if (!deriv) raise(Errc::MissingSurrogate, name + " has no pointwise derivative");
      return make_custom_surrogate(name + "'", *deriv, std::numeric_limits<double>::infinity(),
                                   std::numeric_limits<double>::infinity());
  }
  raise(Errc::InvalidArgument, "unknown activation kind");
}

ActivationSpec make_erf_m(double m) {
  require_positive(m, "erf scale m");
  ActivationSpec a;
  a.name = "erf:m=" + format_scale(m);
  a.kind = ActivationKind::Erf;
  a.scale = m;
  a.eval = [m](double z) { return std::erf(m * z); };
  const double c = 2.0 * m / std::sqrt(std::numbers::pi);
  a.deriv = [m, c](double z) { return c * std::exp(-m * m * z * z); };
  a.envelope = {1.0, 0.0};
  return a;
}

ActivationSpec make_sign() {
  ActivationSpec a;
  a.name = "sign";
  a.kind = ActivationKind::Sign;
  a.eval = [](double z) { return z > 0.0 ? 1.0 : (z < 0.0 ? -1.0 : 0.0); };
  a.envelope = {1.0, 0.0};
  return a;
}

ActivationSpec make_custom_activation(std::string name, ScalarFn eval, std::optional<ScalarFn> deriv,
                                      Envelope envelope) {
  ActivationSpec a;
  a.name = std::move(name);
  a.kind = ActivationKind::Custom;
  a.eval = std::move(eval);
  a.deriv = std::move(deriv);
  a.envelope = envelope;
  return a;
}

SurrogateSpec make_erf_derivative(double m) {
  require_positive(m, "erf derivative scale m");
  SurrogateSpec s;
  s.name = m == 1.0 ? "derf" : "derf:m=" + format_scale(m);
  s.kind = SurrogateKind::ErfDerivative;
  s.scale = m;
  const double c = 2.0 * m / std::sqrt(std::numbers::pi);
  s.eval = [m, c](double z) { return c * std::exp(-m * m * z * z); };
  s.bound = c;
  s.lipschitz = c * m * std::sqrt(2.0) * std::exp(-0.5);
  return s;
}

SurrogateSpec make_rect(double width) {
  require_positive(width, "rect width");
  SurrogateSpec s;
  s.name = "rect:w=" + format_scale(width);
  s.kind = SurrogateKind::Rect;
  s.scale = width;
  const double half = 0.5 * width;
  s.eval = [half](double z) { return std::abs(z) <= half ? 1.0 : 0.0; };
  s.bound = 1.0;
  s.lipschitz = std::numeric_limits<double>::infinity();  // jump at |z| = w/2
  return s;
}

SurrogateSpec make_sech2(double beta) {
  require_positive(beta, "sech2 beta");
  SurrogateSpec s;
  s.name = "sech2:b=" + format_scale(beta);
  s.kind = SurrogateKind::Sech2;
  s.scale = beta;
  s.eval = [beta](double z) {
    const double c = std::cosh(beta * z);
    return std::isfinite(c) ? beta / (c * c) : 0.0;
  };
  s.bound = beta;
  s.lipschitz = 4.0 * beta * beta / (3.0 * std::sqrt(3.0));
  return s;
}

SurrogateSpec make_dirac_sign() {
  SurrogateSpec s;
  s.name = "dirac";
  s.kind = SurrogateKind::DiracSign;
  s.eval = [](double) -> double {
    raise(Errc::InvalidArgument, "the derivative of sign has no pointwise values");
  };
  s.bound = std::numeric_limits<double>::infinity();
  s.lipschitz = std::numeric_limits<double>::infinity();
  return s;
}

SurrogateSpec make_custom_surrogate(std::string name, ScalarFn eval, double bound, double lipschitz) {
  SurrogateSpec s;
  s.name = std::move(name);
  s.kind = SurrogateKind::Custom;
  s.eval = std::move(eval);
  s.bound = bound;
  s.lipschitz = lipschitz;
  return s;
}

ActivationSpec parse_activation(std::string_view text) {
  if (text == "sign") return make_sign();
  if (has_head(text, "erf")) return make_erf_m(parse_parameter(text, "erf", 'm').value_or(1.0));
  raise(Errc::ParseError, "unknown activation '" + std::string(text) + "'");
}

SurrogateSpec parse_surrogate(std::string_view text) {
  if (has_head(text, "derf")) return make_erf_derivative(parse_parameter(text, "derf", 'm').value_or(1.0));
  if (has_head(text, "rect")) return make_rect(parse_parameter(text, "rect", 'w').value_or(1.0));
  if (has_head(text, "sech2")) return make_sech2(parse_parameter(text, "sech2", 'b').value_or(1.0));
  raise(Errc::ParseError, "unknown surrogate '" + std::string(text) + "'");
}

}  // namespace sgntk
