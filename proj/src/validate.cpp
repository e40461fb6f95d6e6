#include "sgntk/validate.hpp"

#include <cmath>
#include <sstream>

#include "sgntk/analytic_kernels.hpp"
#include "sgntk/empirical_kernels.hpp"
#include "sgntk/errors.hpp"
#include "sgntk/network.hpp"
#include "sgntk/rng.hpp"

namespace sgntk {

bool ValidationReport::passed() const noexcept {
  for (const ValidationCheck& c : checks)
    if (!c.passed) return false;
  return !checks.empty();
}

namespace {

std::string describe(const char* what, double value, double bound) {
  std::ostringstream os;
  os << what << " = " << value << " (bound " << bound << ")";
  return os.str();
}

/// Well-conditioned covariance: variances in [0.2, 1.5], |rho| <= 0.8.
Cov2 random_cov(const CounterRng& rng, std::uint64_t k) {
  const double v1 = 0.2 + 1.3 * rng.uniform(3 * k);
  const double v2 = 0.2 + 1.3 * rng.uniform(3 * k + 1);
  const double rho = -0.8 + 1.6 * rng.uniform(3 * k + 2);
  return {v1, v2, rho * std::sqrt(v1 * v2)};
}

ScalarFn erf_fn() { return [](double z) { return std::erf(z); }; }

ValidationCheck closed_vs_quadrature(const ValidateOptions& o) {
  const CounterRng rng = CounterRng(o.seed).stream("validate-cov");
  double worst = 0.0;
  const SurrogateSpec derf = make_erf_derivative();
  for (std::uint64_t k = 0; k < 100; ++k) {
    const Cov2 c = random_cov(rng, k);
    worst = std::max(worst, std::abs(o.t_erf(c) - gh_expect(c, erf_fn(), erf_fn(), 64)));
    worst = std::max(worst, std::abs(tdot_erf(c) - gh_expect(c, derf.eval, derf.eval, 64)));
  }
  return {"closed form vs Gauss-Hermite (Q=64)", worst <= 1e-8, describe("max gap", worst, 1e-8)};
}

ValidationCheck closed_vs_monte_carlo(const ValidateOptions& o) {
  const Cov2 covs[] = {{1.0, 1.0, 0.5}, {2.0, 1.0, 0.3}, {0.5, 1.2, -0.4}};
  double worst = 0.0;
  std::uint64_t k = 0;
  for (const Cov2& c : covs) {
    const McEstimate mc = mc_expect(c, erf_fn(), erf_fn(), o.monte_carlo_samples, derive_seed(o.seed, "mc", k++));
    worst = std::max(worst, std::abs(o.t_erf(c) - mc.estimate) / mc.standard_error);
  }
  return {"closed form vs Monte Carlo", worst <= 4.0, describe("max |gap| / SE", worst, 4.0)};
}

ValidationCheck finite_difference_jacobian(const ValidateOptions& o) {
  NetworkConfig nc = NetworkConfig::mlp(3, 16, 3, 2, make_erf_m(2.0), derive_seed(o.seed, "fd-net", 0));
  Network net = Network::init(nc);
  const std::vector<double> x{0.3, -0.7, 0.5};
  const QuasiJacobian j = quasi_jacobian(net, nc.activation.derivative(), x);
  std::vector<double> theta = net.parameters();
  const double h = 1e-5;
  double worst = 0.0;
  for (std::size_t p = 0; p < theta.size(); ++p) {
    const double keep = theta[p];
    theta[p] = keep + h;
    net.set_parameters(theta);
    const std::vector<double> up = net.output(x);
    theta[p] = keep - h;
    net.set_parameters(theta);
    const std::vector<double> down = net.output(x);
    theta[p] = keep;
    for (std::size_t i = 0; i < up.size(); ++i) {
      const double fd = (up[i] - down[i]) / (2.0 * h);
      const double exact = j.matrix(i, p);
      worst = std::max(worst, std::abs(fd - exact) / std::max(1.0, std::abs(exact)));
    }
  }
  return {"quasi-Jacobian vs central differences", worst <= 1e-6, describe("max relative gap", worst, 1e-6)};
}

ValidationCheck depth_one_exactness(const ValidateOptions& o) {
  const CounterRng rng = CounterRng(o.seed).stream("validate-depth1");
  NetworkConfig nc = NetworkConfig::mlp(4, 1, 1, 3, make_erf_m(1.0), derive_seed(o.seed, "depth1", 0));
  const Network net = Network::init(nc);
  const SurrogateSpec d = nc.activation.derivative();
  double worst = 0.0;
  for (std::uint64_t k = 0; k < 20; ++k) {
    std::vector<double> x(4);
    std::vector<double> y(4);
    double dot = 0.0;
    for (std::size_t i = 0; i < 4; ++i) {
      x[i] = rng.normal(8 * k + i);
      y[i] = rng.normal(8 * k + 4 + i);
      dot += x[i] * y[i];
    }
    const Matrix k1 = empirical_generalized_ntk(net, d, d, x, y);
    const double expect = nc.sigma_w * nc.sigma_w / 4.0 * dot + nc.sigma_b * nc.sigma_b;
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 3; ++j) worst = std::max(worst, std::abs(k1(i, j) - (i == j ? expect : 0.0)));
  }
  return {"depth-1 kernel exactness", worst <= 1e-12, describe("max gap", worst, 1e-12)};
}

ValidationCheck ensemble_covariance(const ValidateOptions& o) {
  NetworkConfig nc = NetworkConfig::mlp(2, 512, 2, 1, make_erf_m(2.0), derive_seed(o.seed, "ensemble-check", 0));
  const Points pts{{1.0, 0.0}, {0.6, 0.8}};
  const EnsembleStatistics stats = ensemble_statistics_paired(nc, make_erf_m(5.0), o.ensemble_count, pts);
  KernelSpec spec = KernelSpec::cross_nngp(2, make_erf_m(2.0), make_erf_m(5.0), KernelMode::ClosedForm);
  double worst = 0.0;
  for (std::size_t p = 0; p < 2; ++p)
    for (std::size_t q = 0; q < 2; ++q) {
      const double expect = cross_nngp(spec, 2, pts[p], pts[q]);
      worst = std::max(worst, std::abs(stats.cov[0](p, q) - expect) / stats.cov_se[0](p, q));
    }
  return {"paired ensemble covariance vs cross NNGP", worst <= 4.0, describe("max |gap| / SE", worst, 4.0)};
}

ValidationCheck exponents(const ValidateOptions&) {
  double worst = 0.0;
  for (std::size_t depth : {2u, 3u, 4u}) {
    const KernelSpec spec = KernelSpec::ntk(depth, make_sign(), KernelMode::SignLimit);
    const double expect = 1.0 - std::ldexp(1.0, -static_cast<int>(depth - 1));
    worst = std::max(worst, std::abs(singular_exponent(spec, depth).exponent / expect - 1.0));
  }
  return {"singular exponent fits", worst <= 0.05, describe("max relative error", worst, 0.05)};
}

}  // namespace

ValidationReport validate(const ValidateOptions& options) {
  ValidationReport report;
  using Check = ValidationCheck (*)(const ValidateOptions&);
  const Check checks[] = {closed_vs_quadrature, closed_vs_monte_carlo, finite_difference_jacobian,
                          depth_one_exactness, ensemble_covariance, exponents};
  for (Check check : checks) {
    try {
      report.checks.push_back(check(options));
    } catch (const std::exception& e) {
      report.checks.push_back({"check raised", false, e.what()});
    }
  }
  return report;
}

}  // namespace sgntk
