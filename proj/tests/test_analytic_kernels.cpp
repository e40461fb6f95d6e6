#include <cmath>
#include <numbers>

#include <doctest.h>

#include "oracles.hpp"
#include "sgntk/analytic_kernels.hpp"
#include "sgntk/dataset.hpp"
#include "sgntk/errors.hpp"

using namespace sgntk;

namespace {
const double pi = std::numbers::pi;
const std::vector<double> e1{1.0, 0.0}, e2{0.0, 1.0}, u{0.6, 0.8};
const SurrogateSpec derf = make_erf_derivative();
}  // namespace

TEST_CASE("nngp base case and limits") {
  const KernelSpec s = KernelSpec::nngp(1, make_erf_m(1.0), KernelMode::ClosedForm);
  CHECK(nngp(s, 1, e1, e2) == doctest::Approx(0.01));
  const KernelSpec sign = KernelSpec::nngp(3, make_sign(), KernelMode::SignLimit);
  CHECK(nngp(sign, 3, u, u) == doctest::Approx(1.01).epsilon(1e-15));
  const KernelSpec big = KernelSpec::nngp(3, make_erf_m(1e4), KernelMode::ClosedForm);
  CHECK(std::abs(nngp(big, 3, e1, u) - nngp(sign, 3, e1, u)) < 1e-3);
  CHECK(nngp(KernelSpec::nngp(3, make_erf_m(2.0), KernelMode::ClosedForm), 3, e1, u) ==
        doctest::Approx(nngp(KernelSpec::nngp(3, make_erf_m(2.0), KernelMode::Quadrature), 3, e1, u)).epsilon(1e-8));
}

TEST_CASE("ntk values") {
  const KernelSpec one = KernelSpec::ntk(1, make_erf_m(1.0), KernelMode::ClosedForm);
  CHECK(ntk(one, 1, e1, u).get() == doctest::Approx(0.31));
  // m = 1, L = 2 derivative factor on the diagonal
  const Triple t = base_covariance(one, e1, e1);
  const KernelValue d = derivative_expectation(KernelSpec::ntk(2, make_erf_m(1.0), KernelMode::ClosedForm), t);
  CHECK(d.value == doctest::Approx(2 / pi / std::sqrt((0.51 + 0.5) * (0.51 + 0.5) - 0.51 * 0.51)));
  const KernelSpec erf2 = KernelSpec::ntk(3, make_erf_m(2.0), KernelMode::ClosedForm);
  CHECK(ntk(erf2, 3, e1, u).get() == doctest::Approx(oracle::erf_kernel({}, 2.0, 0.0, e1, u)).epsilon(1e-11));
}

TEST_CASE("sign-limit ntk") {
  const KernelSpec s = KernelSpec::ntk(3, make_sign(), KernelMode::SignLimit);
  CHECK(ntk(s, 3, e1, u).get() == doctest::Approx(oracle::sign_kernel({}, 0.0, e1, u)).epsilon(1e-12));
  // L = 3 derivative factor at a generic pair
  const KernelSpec s2 = KernelSpec::nngp(3, make_sign(), KernelMode::SignLimit);
  const double sig = nngp(s2, 2, e1, u);
  const KernelSpec s3 = KernelSpec::ntk(3, make_sign(), KernelMode::SignLimit);
  const Triple t{1.01, 1.01, sig, 1.01 * 1.01 - sig * sig};
  CHECK(derivative_expectation(s3, t).value == doctest::Approx(2 / pi / std::sqrt(1.01 * 1.01 - sig * sig)));
  const KernelValue diag = ntk(s, 3, u, u);
  CHECK(diag.divergent);
  CHECK(diag.rate > 0.0);
  CHECK_THROWS_AS(diag.get(), Error);
}

TEST_CASE("finite-m diagonal growth") {
  for (std::size_t depth : {2u, 3u}) {
    const auto th = [&](double m) { return ntk(KernelSpec::ntk(depth, make_erf_m(m), KernelMode::ClosedForm), depth, u, u).get(); };
    CHECK(th(512) / th(256) == doctest::Approx(std::pow(2.0, depth - 1.0)).epsilon(0.1));
  }
}

TEST_CASE("dot-product kernels depend only on the inner product") {
  const std::vector<double> x{0.48, 0.6, 0.64}, y{0.0, 0.6, 0.8};
  const std::vector<double> xp{0.64, 0.48, 0.6}, yp{0.8, 0.0, 0.6};
  const KernelSpec s = KernelSpec::ntk(3, make_erf_m(2.0), KernelMode::ClosedForm);
  CHECK(std::abs(ntk(s, 3, x, y).get() - ntk(s, 3, xp, yp).get()) < 1e-12);
}

TEST_CASE("cross nngp") {
  const KernelSpec same = KernelSpec::cross_nngp(3, make_erf_m(2.0), make_erf_m(2.0), KernelMode::ClosedForm);
  CHECK(cross_nngp(same, 3, e1, u) == doctest::Approx(nngp(KernelSpec::nngp(3, make_erf_m(2.0), KernelMode::ClosedForm), 3, e1, u)));
  const KernelSpec mix = KernelSpec::cross_nngp(2, make_erf_m(2.0), make_erf_m(5.0), KernelMode::ClosedForm);
  CHECK(cross_nngp(mix, 1, e1, u) == doctest::Approx(0.31));
  CHECK(cross_nngp(mix, 2, e1, u) == doctest::Approx(oracle::cross_nngp2({2, 1.0, 0.1}, 2, 5, e1, u)).epsilon(1e-11));
}

TEST_CASE("sg-ntk") {
  const KernelSpec s = KernelSpec::sg_ntk(3, make_sign(), derf, KernelMode::SignLimit);
  const double diag = sg_ntk(s, 3, u, u);
  CHECK(std::isfinite(diag));
  const Triple t{1.01, 1.01, 1.01, 0.0};
  CHECK(derivative_expectation(s, t).value == doctest::Approx(std::sqrt(2.0) * 2 / pi / std::sqrt(1.01)));
  const double sig = nngp(KernelSpec::nngp(3, make_sign(), KernelMode::SignLimit), 2, e1, u);
  const Triple g{1.01, 1.01, sig, 1.01 * 1.01 - sig * sig};
  CHECK(derivative_expectation(s, g).value == doctest::Approx(2 / pi / std::sqrt(g.det + 1.01 / 2)));
  CHECK(sg_ntk(s, 1, e1, u) == doctest::Approx(0.31));
  CHECK(sg_ntk(s, 3, e1, u) == doctest::Approx(oracle::sign_kernel({}, 1.0, e1, u)).epsilon(1e-12));
  const KernelSpec f = KernelSpec::sg_ntk(3, make_erf_m(2.0), derf, KernelMode::ClosedForm);
  CHECK(sg_ntk(f, 3, e1, u) == doctest::Approx(oracle::erf_kernel({}, 2.0, 1.0, e1, u)).epsilon(1e-11));
}

TEST_CASE("sg-ntk limit in the erf scale converges like 1/m") {
  const Points grid = circle_points(angle_grid(64));
  const Points x{e1};
  const KernelMatrix lim = analytic_gram(KernelSpec::sg_ntk(3, make_sign(), derf, KernelMode::SignLimit), x, grid);
  double prev = 0.0;
  for (double m : {400.0, 1600.0}) {
    const KernelMatrix k = analytic_gram(KernelSpec::sg_ntk(3, make_erf_m(m), derf, KernelMode::ClosedForm), x, grid);
    const double gap = (k.values - lim.values).max_abs();
    if (prev > 0.0) CHECK(prev / gap == doctest::Approx(4.0).epsilon(0.05));
    prev = gap;
  }
  CHECK(prev < 1e-2);
}

TEST_CASE("sg-ntk at m = 100 within 1e-2 of the sign limit" * doctest::should_fail()) {
  const Points grid = circle_points(angle_grid(64));
  const Points x{e1};
  const KernelMatrix lim = analytic_gram(KernelSpec::sg_ntk(3, make_sign(), derf, KernelMode::SignLimit), x, grid);
  const KernelMatrix k = analytic_gram(KernelSpec::sg_ntk(3, make_erf_m(100), derf, KernelMode::ClosedForm), x, grid);
  CHECK((k.values - lim.values).max_abs() <= 1e-2);
}

TEST_CASE("sg-ntk Cauchy gap between m = 50 and m = 200 within 1e-2" * doctest::should_fail()) {
  const Points grid = circle_points(angle_grid(64));
  const Points x{e1};
  const SurrogateSpec sech = make_sech2(1.0);
  const KernelMatrix a = analytic_gram(KernelSpec::sg_ntk(3, make_erf_m(50), sech, KernelMode::ClosedForm), x, grid);
  const KernelMatrix b = analytic_gram(KernelSpec::sg_ntk(3, make_erf_m(200), sech, KernelMode::ClosedForm), x, grid);
  CHECK((a.values - b.values).max_abs() <= 1e-2);
}

TEST_CASE("quadrature path matches the closed forms") {
  KernelSpec s = KernelSpec::sg_ntk(3, make_erf_m(3.0), derf, KernelMode::ClosedForm);
  const double closed = sg_ntk(s, 3, e1, u);
  s.closed_form_surrogates = false;
  CHECK(sg_ntk(s, 3, e1, u) == doctest::Approx(closed).epsilon(1e-10));
  KernelSpec r = KernelSpec::sg_ntk(3, make_sign(), make_rect(0.8), KernelMode::SignLimit);
  CHECK(std::isfinite(sg_ntk(r, 3, u, u)));
}

TEST_CASE("preconditions") {
  KernelSpec s = KernelSpec::ntk(3, make_sign(), KernelMode::SignLimit);
  s.sigma_b = 0.0;
  const std::vector<double> minus{-1.0, 0.0};
  try {
    ntk(s, 3, e1, minus);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::NonParallelRequired);
  }
  CHECK(ntk(s, 3, e1, e1).divergent);
  CHECK_NOTHROW(ntk(s, 3, e1, u));
  CHECK_THROWS_AS(KernelSpec::ntk(3, make_erf_m(2.0), KernelMode::SignLimit).validate(), Error);
  CHECK_THROWS_AS(ntk(KernelSpec::ntk(3, make_erf_m(1.0), KernelMode::ClosedForm), 3, e1, std::vector<double>{1, 0, 0}), Error);
}

TEST_CASE("grams mirror pairwise evaluation and flag divergence") {
  const Points pts{e1, u, e2};
  const KernelSpec s = KernelSpec::ntk(3, make_sign(), KernelMode::SignLimit);
  const KernelMatrix k = analytic_gram(s, pts);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(k.is_divergent(i, i));
    for (std::size_t j = 0; j < 3; ++j)
      if (i != j) CHECK(k.values(i, j) == evaluate(s, pts[i], pts[j]).get());
  }
  CHECK_THROWS_AS(k.finite(), Error);
}

TEST_CASE("singular exponent") {
  for (std::size_t depth : {2u, 3u, 4u}) {
    const ExponentFit f = singular_exponent(KernelSpec::ntk(depth, make_sign(), KernelMode::SignLimit), depth);
    CHECK(f.exponent == doctest::Approx(1.0 - std::pow(0.5, depth - 1.0)).epsilon(0.05));
  }
}
