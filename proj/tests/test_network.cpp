#include <cmath>
#include <sstream>

#include <doctest.h>

#include "sgntk/analytic_kernels.hpp"
#include "sgntk/errors.hpp"
#include "sgntk/network.hpp"
#include "sgntk/network_io.hpp"

using namespace sgntk;

TEST_CASE("initialization is seeded and standard normal") {
  const NetworkConfig nc = NetworkConfig::mlp(2, 100, 2, 1, make_erf_m(1.0), 5);
  const Network a = Network::init(nc);
  CHECK(a.parameters() == Network::init(nc).parameters());
  CHECK(nc.parameter_count() == 100 * 3 + 101);
  const auto& w = a.layer(1).weights;
  // 2 x 100 is too small; use a wide first layer
  const Network wide = Network::init(NetworkConfig::mlp(100, 100, 1, 100, make_erf_m(1.0), 6));
  const auto& big = wide.layer(1).weights;
  double s = 0, s2 = 0;
  for (double v : big.entries()) {
    s += v;
    s2 += v * v;
  }
  const double n = static_cast<double>(big.size());
  CHECK(std::abs(s / n) < 4 / std::sqrt(n));
  CHECK(std::abs(s2 / n - 1.0) < 4 * std::sqrt(2.0 / n));
  CHECK(w.rows() == 100);
}

TEST_CASE("kappa scales the last layer") {
  NetworkConfig nc = NetworkConfig::mlp(2, 400, 2, 50, make_erf_m(1.0), 8);
  nc.kappa = 0.2;
  const Network net = Network::init(nc);
  double s2 = 0;
  for (double v : net.layer(2).weights.entries()) s2 += v * v;
  CHECK(std::sqrt(s2 / net.layer(2).weights.size()) == doctest::Approx(0.2).epsilon(0.02));
  nc.kappa = 0.0;
  CHECK_THROWS_AS(nc.validate(), Error);
}

TEST_CASE("forward pass by hand") {
  NetworkConfig nc = NetworkConfig::mlp(1, 2, 2, 1, make_erf_m(1.0), 0);
  Network net = Network::init(nc);
  net.layer(1).weights = Matrix(2, 1, std::vector<double>{0.5, -1.0});
  net.layer(1).biases = {0.2, 0.0};
  net.layer(2).weights = Matrix(1, 2, std::vector<double>{1.0, 2.0});
  net.layer(2).biases = {-1.0};
  const std::vector<double> x{0.7};
  const double h1 = 0.5 * 0.7 + 0.1 * 0.2, h2 = -0.7;
  const double expect = (std::erf(h1) + 2 * std::erf(h2)) / std::sqrt(2.0) - 0.1;
  CHECK(net.output(x)[0] == doctest::Approx(expect).epsilon(1e-15));

  NetworkConfig lin = NetworkConfig::mlp(3, 1, 1, 2, make_erf_m(1.0), 4);
  const Network one = Network::init(lin);
  const std::vector<double> y{0.2, -0.4, 1.0};
  for (std::size_t i = 0; i < 2; ++i) {
    double v = one.layer(1).biases[i] * 0.1;
    for (std::size_t j = 0; j < 3; ++j) v += one.layer(1).weights(i, j) * y[j] / std::sqrt(3.0);
    CHECK(one.output(y)[i] == doctest::Approx(v).epsilon(1e-15));
  }
}

TEST_CASE("zero input propagates to zero output without biases") {
  NetworkConfig nc = NetworkConfig::mlp(3, 16, 3, 2, make_erf_m(2.0), 1);
  nc.sigma_b = 0.0;
  const Network net = Network::init(nc);
  for (double v : net.output(std::vector<double>{0, 0, 0})) CHECK(v == 0.0);
  CHECK_THROWS_AS(net.output(std::vector<double>{1.0}), Error);
}

TEST_CASE("ensemble statistics") {
  const NetworkConfig nc = NetworkConfig::mlp(2, 1024, 2, 1, make_erf_m(2.0), 12);
  const Points pts{{1.0, 0.0}, {0.6, 0.8}};
  const EnsembleStatistics st = ensemble_statistics(nc, 2000, pts, 0);
  const KernelSpec spec = KernelSpec::nngp(2, make_erf_m(2.0), KernelMode::ClosedForm);
  for (std::size_t p = 0; p < 2; ++p) {
    CHECK(std::abs(st.mean(p, 0)) < 4 * std::sqrt(st.cov[0](p, p) / 2000));
    for (std::size_t q = 0; q < 2; ++q)
      CHECK(std::abs(st.cov[0](p, q) - nngp(spec, 2, pts[p], pts[q])) < 4 * st.cov_se[0](p, q));
  }
  const EnsembleStatistics same = ensemble_statistics_paired(nc, make_erf_m(2.0), 50, pts, 0);
  CHECK((same.mean - same.mean_second).max_abs() == 0.0);
}

TEST_CASE("serialization round trips") {
  NetworkConfig nc = NetworkConfig::mlp(2, 7, 3, 2, make_erf_m(2.5), 3);
  nc.kappa = 0.5;
  const Network net = Network::init(nc);
  const Network back = network_from_json(network_to_json(net));
  CHECK(back.parameters() == net.parameters());
  CHECK(back.config().activation.scale == 2.5);
  CHECK(back.config().kappa == 0.5);
  std::stringstream bin;
  write_network_binary(net, bin);
  const Network again = read_network_binary(bin);
  CHECK(again.parameters() == net.parameters());
  std::stringstream junk("NOTANET.........");
  CHECK_THROWS_AS(read_network_binary(junk), Error);
}
