#include <cmath>

#include <doctest.h>

#include "sgntk/dataset.hpp"
#include "sgntk/errors.hpp"
#include "sgntk/training.hpp"

using namespace sgntk;

namespace {
const Dataset data = make_sphere_dataset(15, 77);
}

TEST_CASE("zero steps leave the network unchanged") {
  const Network net = Network::init(NetworkConfig::mlp(2, 16, 3, 1, make_erf_m(2.0), 1));
  TrainConfig tc;
  tc.record_kernel_every = 1;
  const TrainTrace t = train(net, data, tc);
  CHECK(t.final_network.parameters() == net.parameters());
  REQUIRE(t.loss.size() == 1);
  CHECK(t.loss[0] == doctest::Approx(training_loss(net, data)));
  CHECK(t.max_drift() == 0.0);
}

TEST_CASE("one step matches a finite-difference gradient step") {
  const Network net = Network::init(NetworkConfig::mlp(2, 6, 2, 1, make_erf_m(2.0), 2));
  TrainConfig tc;
  tc.steps = 1;
  tc.eta = 0.05;
  const Network after = train(net, data, tc).final_network;
  std::vector<double> p = net.parameters();
  const std::vector<double> q = after.parameters();
  Network probe = net;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double keep = p[i];
    p[i] = keep + 1e-6;
    probe.set_parameters(p);
    const double up = training_loss(probe, data);
    p[i] = keep - 1e-6;
    probe.set_parameters(p);
    const double down = training_loss(probe, data);
    p[i] = keep;
    const double grad = (up - down) / 2e-6;
    CHECK(q[i] == doctest::Approx(keep - 0.05 * grad).epsilon(1e-7));
  }
}

TEST_CASE("sgl with the true derivative equals gradient descent") {
  const Network net = Network::init(NetworkConfig::mlp(2, 10, 3, 1, make_erf_m(2.0), 3));
  TrainConfig gd;
  gd.steps = 20;
  TrainConfig sgl = gd;
  sgl.rule = UpdateRule::Sgl;
  sgl.surrogate = make_erf_m(2.0).derivative();
  CHECK(train(net, data, gd).final_network.parameters() == train(net, data, sgl).final_network.parameters());
  sgl.surrogate.reset();
  CHECK_THROWS_AS(train(net, data, sgl), Error);
}

TEST_CASE("wide erf network fits the sphere targets") {
  const Network net = Network::init(NetworkConfig::mlp(2, 500, 2, 1, make_erf_m(2.0), 4));
  TrainConfig tc;
  tc.steps = 10000;
  tc.record_loss_every = 1000;
  const TrainTrace t = train(net, data, tc);
  CHECK(2.0 * t.loss.back() / data.size() <= 1e-3);
  CHECK(t.loss.back() < t.loss.front());
}

TEST_CASE("sign network trained with a surrogate reduces its loss") {
  const Network net = Network::init(NetworkConfig::mlp(2, 128, 3, 1, make_sign(), 5));
  TrainConfig tc;
  tc.rule = UpdateRule::Sgl;
  tc.surrogate = make_erf_derivative();
  tc.steps = 2000;
  tc.record_loss_every = 500;
  const TrainTrace t = train(net, data, tc);
  CHECK(t.loss.back() < 0.5 * t.loss.front());
}

TEST_CASE("divergence and learning-rate warnings") {
  const Network net = Network::init(NetworkConfig::mlp(2, 64, 3, 1, make_erf_m(2.0), 6));
  TrainConfig tc;
  tc.eta = 5.0;
  tc.steps = 200;
  tc.eta_critical = 0.2;
  try {
    train(net, data, tc);
    FAIL("expected divergence");
  } catch (const TrainingDiverged& e) {
    CHECK(e.code() == Errc::NonFiniteLoss);
    CHECK(!e.trace().warnings.empty());
  }
  CHECK(critical_learning_rate(1.0, 3.0) == 0.5);
}

TEST_CASE("kernel drift shrinks with width") {
  double last = 1e9;
  for (std::size_t w : {50u, 400u}) {
    double sum = 0.0;
    for (std::uint64_t s = 0; s < 2; ++s) {
      const Network net = Network::init(NetworkConfig::mlp(2, w, 3, 1, make_erf_m(2.0), 10 + s));
      TrainConfig tc;
      tc.rule = UpdateRule::Sgl;
      tc.surrogate = make_erf_derivative();
      tc.steps = 200;
      tc.record_kernel_every = 20;
      sum += train(net, data, tc).max_drift();
    }
    CHECK(sum < last);
    last = sum;
  }
}
