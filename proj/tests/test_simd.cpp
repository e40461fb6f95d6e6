#include <random>
#include <vector>

#include <doctest.h>

#include "sgntk/dataset.hpp"
#include "sgntk/empirical_kernels.hpp"
#include "sgntk/simd.hpp"
#include "sgntk/training.hpp"

using namespace sgntk;

TEST_CASE("scalar and AVX2 kernels agree bit for bit") {
  if (!simd::avx2::supported()) return;
  std::mt19937_64 gen(11);
  std::normal_distribution<double> n01;
  for (std::size_t n : {0u, 1u, 3u, 15u, 16u, 17u, 31u, 64u, 257u, 1000u}) {
    std::vector<double> a(n), b(n);
    for (std::size_t i = 0; i < n; ++i) {
      a[i] = n01(gen);
      b[i] = n01(gen);
    }
    CAPTURE(n);
    CHECK(simd::scalar::dot(a.data(), b.data(), n) == simd::avx2::dot(a.data(), b.data(), n));
    std::vector<double> y1 = b, y2 = b;
    simd::scalar::axpy(0.37, a.data(), y1.data(), n);
    simd::avx2::axpy(0.37, a.data(), y2.data(), n);
    CHECK(y1 == y2);
  }
}

TEST_CASE("dispatch honours the selected set") {
  const simd::Isa keep = simd::active_isa();
  simd::set_active_isa(simd::Isa::Scalar);
  CHECK(simd::active_isa() == simd::Isa::Scalar);
  const std::vector<double> a{1, 2, 3}, b{4, 5, 6};
  CHECK(simd::dot(a, b) == 32.0);
  simd::set_active_isa(keep);
}

TEST_CASE("training is identical under both instruction sets") {
  if (!simd::avx2::supported()) return;
  const simd::Isa keep = simd::active_isa();
  const Dataset data = make_sphere_dataset(15, 3);
  const Network net = Network::init(NetworkConfig::mlp(2, 37, 3, 1, make_erf_m(2.0), 4));
  TrainConfig tc;
  tc.steps = 30;
  tc.rule = UpdateRule::Sgl;
  tc.surrogate = make_erf_derivative();
  simd::set_active_isa(simd::Isa::Scalar);
  const TrainTrace a = train(net, data, tc);
  const KernelMatrix ka = kernel_gram(a.final_network, make_erf_m(2.0).derivative(), *tc.surrogate, data.inputs);
  simd::set_active_isa(simd::Isa::Avx2);
  const TrainTrace b = train(net, data, tc);
  const KernelMatrix kb = kernel_gram(b.final_network, make_erf_m(2.0).derivative(), *tc.surrogate, data.inputs);
  simd::set_active_isa(keep);
  CHECK(a.final_network.parameters() == b.final_network.parameters());
  CHECK(a.loss == b.loss);
  CHECK(ka.values == kb.values);
}
