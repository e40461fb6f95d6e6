#include <cmath>
#include <numbers>
#include <random>

#include <doctest.h>

#include "oracles.hpp"
#include "sgntk/activations.hpp"
#include "sgntk/dual_expectations.hpp"
#include "sgntk/errors.hpp"

using namespace sgntk;

namespace {
const double pi = std::numbers::pi;
const ScalarFn erf_fn = [](double z) { return std::erf(z); };
}  // namespace

TEST_CASE("t_erf known values") {
  CHECK(t_erf({1.0, 1.0, 0.0}) == 0.0);
  CHECK(t_erf({1, 1, 1}) == doctest::Approx(2 / pi * std::asin(2.0 / 3)).epsilon(1e-14));
  CHECK(t_erf({1, 1, 0.5}) == doctest::Approx(2 / pi * std::asin(1.0 / 3)).epsilon(1e-14));
  CHECK(t_erf({1, 1, 1}) == doctest::Approx(0.464559).epsilon(1e-5));
  CHECK(t_erf({1, 1, 0.5}) == doctest::Approx(0.21635).epsilon(1e-4));
  CHECK_THROWS_AS(t_erf({1, 1, 2}), Error);
}

TEST_CASE("tdot_erf known values") {
  CHECK(tdot_erf({1, 0, 0}) == doctest::Approx(4 / (pi * std::sqrt(3.0))));
  CHECK(tdot_erf({1, 1, 0}) == doctest::Approx(4 / (3 * pi)));
  CHECK(tdot_erf({1, 1, 1}) == doctest::Approx(4 / (pi * std::sqrt(5.0))));
  CHECK(tdot_erf({2, 1, 0.3}) == doctest::Approx(oracle::derf_pair(2, 1, 0.3, 1, 1)).epsilon(1e-12));
}

TEST_CASE("erf_m variants") {
  CHECK(std::abs(t_erf_m({1, 1, 1}, 1e6) - 1.0) < 1e-5);
  CHECK(tdot_erf_m({1, 1, 1}, 1.0) == doctest::Approx(2 / pi / std::sqrt(1.25)));
  CHECK(tdot_erf_m({1.2, 0.8, 0.5}, 3.0) == doctest::Approx(oracle::derf_pair(1.2, 0.8, 0.5, 3, 3)).epsilon(1e-11));
  CHECK(t_erf_m({1.2, 0.8, 0.5}, 3.0) == doctest::Approx(oracle::erf_pair(1.2, 0.8, 0.5, 3, 3)).epsilon(1e-11));
  CHECK(t_erf_pair({1.2, 0.8, 0.5}, 2, 5) == doctest::Approx(oracle::erf_pair(1.2, 0.8, 0.5, 2, 5)).epsilon(1e-11));
  CHECK(tdot_erf_pair({1.2, 0.8, 0.5}, 2, 5) == doctest::Approx(oracle::derf_pair(1.2, 0.8, 0.5, 2, 5)).epsilon(1e-11));
}

TEST_CASE("t_erf increases in the covariance") {
  double last = -2.0;
  for (double c = -0.95; c <= 0.95; c += 0.05) {
    const double v = t_erf({1.0, 1.0, c});
    CHECK(v > last);
    last = v;
  }
}

TEST_CASE("gauss-hermite quadrature") {
  const ScalarFn id = [](double z) { return z; };
  CHECK(std::abs(gh_expect({1.3, 0.7, 0.4}, id, id, 16) - 0.4) < 1e-10);
  CHECK(std::abs(gh_expect_1d(2.0, [](double z) { return z * z * z * z; }, 16) - 12.0) < 1e-10);
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> var(0.2, 1.5), cor(-0.8, 0.8);
  const SurrogateSpec d = make_erf_derivative();
  for (int k = 0; k < 100; ++k) {
    const double a = var(gen), b = var(gen);
    const Cov2 c{a, b, cor(gen) * std::sqrt(a * b)};
    CHECK(std::abs(gh_expect(c, erf_fn, erf_fn, 64) - t_erf(c)) < 1e-8);
    CHECK(std::abs(gh_expect(c, d.eval, d.eval, 64) - tdot_erf(c)) < 1e-8);
  }
  CHECK_THROWS_AS(gh_expect({1, 1, 0}, id, id, 4), Error);
}

TEST_CASE("perturbed closed form is caught by quadrature") {
  const Cov2 c{1.0, 0.8, 0.3};
  CHECK(std::abs(t_erf(c) + 1e-3 - gh_expect(c, erf_fn, erf_fn, 64)) > 1e-8);
}

TEST_CASE("monte carlo agrees within 4 standard errors") {
  const Cov2 c{2.0, 1.0, 0.3};
  const SurrogateSpec d = make_erf_derivative();
  const McEstimate e = mc_expect(c, d.eval, d.eval, 2'000'000, 17);
  CHECK(std::abs(e.estimate - tdot_erf(c)) < 4 * e.standard_error);
  const McEstimate f = mc_expect(c, erf_fn, erf_fn, 2'000'000, 18);
  CHECK(std::abs(f.estimate - t_erf(c)) < 4 * f.standard_error);
}

TEST_CASE("gaussian tilt and Dirac reductions") {
  const Cov2 c{1.1, 0.9, -0.4};
  const ScalarFn g = [](double z) { return std::cos(z) + z * z; };
  const SurrogateSpec d = make_erf_derivative(2.0);
  CHECK(erf_derivative_expect(c, 2.0, g) == doctest::Approx(gh_expect(c, d.eval, g, 128)).epsilon(1e-10));
  // E[2 delta(U) g(V)] by a narrow Gaussian in place of the delta
  const double det = c.det();
  const double ref = std::sqrt(2 / pi) / std::sqrt(c.s11) * oracle::gauss_1d(det / c.s11, g);
  CHECK(dirac_expect(c, g) == doctest::Approx(ref).epsilon(1e-10));
}
