#include <cmath>
#include <numbers>

#include <doctest.h>

#include "oracles.hpp"
#include "sgntk/activations.hpp"
#include "sgntk/errors.hpp"

using namespace sgntk;

TEST_CASE("erf_m values") {
  const ActivationSpec e1 = make_erf_m(1.0);
  CHECK(e1.eval(0.0) == 0.0);
  CHECK(e1.derivative().eval(0.0) == doctest::Approx(2.0 / std::sqrt(std::numbers::pi)).epsilon(1e-15));
  CHECK(std::abs(make_erf_m(20.0).eval(0.5) - 1.0) < 1e-9);
  const ActivationSpec e2 = make_erf_m(2.0);
  for (double x : {0.3, -0.7, 1.1, 0.05}) CHECK(std::abs(e2.eval(x) - oracle::erf_series(2 * x)) < 1e-15);
  CHECK_THROWS_AS(make_erf_m(0.0), Error);
  CHECK(e2.envelope.c == 1.0);
}

TEST_CASE("sign") {
  const ActivationSpec s = make_sign();
  CHECK(s.eval(1.5) == 1.0);
  CHECK(s.eval(-0.001) == -1.0);
  CHECK(s.eval(0.0) == 0.0);
  CHECK(s.derivative().is_dirac());
}

TEST_CASE("surrogates") {
  const SurrogateSpec d = make_erf_derivative();
  CHECK(d.name == "derf");
  CHECK(d.eval(0.0) == doctest::Approx(d.bound));
  const SurrogateSpec r = make_rect(0.5);
  CHECK(r.eval(0.25) == 1.0);
  CHECK(r.eval(0.26) == 0.0);
  const SurrogateSpec s = make_sech2(2.0);
  CHECK(s.eval(0.0) == doctest::Approx(2.0));
  CHECK(s.eval(1.0) == doctest::Approx(2.0 / std::pow(std::cosh(2.0), 2)));
  CHECK_THROWS_AS(make_dirac_sign().eval(0.1), Error);
}

TEST_CASE("parsers") {
  CHECK(parse_activation("erf").scale == 1.0);
  CHECK(parse_activation("erf:m=5").scale == 5.0);
  CHECK(parse_activation("sign").kind == ActivationKind::Sign);
  CHECK(parse_surrogate("derf:m=3").scale == 3.0);
  CHECK(parse_surrogate("rect:w=0.4").kind == SurrogateKind::Rect);
  CHECK(parse_surrogate("sech2:b=2").kind == SurrogateKind::Sech2);
  for (const char* bad : {"relu", "erf:m=", "erf:m=-1", "erf:k=2", "rect:w=x"}) {
    CAPTURE(bad);
    CHECK_THROWS_AS(parse_activation(bad), Error);
  }
  CHECK_THROWS_AS(parse_surrogate("bogus"), Error);
}
