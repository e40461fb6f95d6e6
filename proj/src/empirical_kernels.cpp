#include "sgntk/empirical_kernels.hpp"

#include <cmath>

#include "sgntk/errors.hpp"
#include "sgntk/parallel.hpp"
#include "sgntk/simd.hpp"

namespace sgntk {

ScalarFn pointwise(const SurrogateSpec& s) {
  if (s.is_dirac() || !s.eval) {
    raise(Errc::MissingSurrogate, "surrogate '" + s.name + "' has no pointwise values; supply a surrogate");
  }
  return s.eval;
}

KernelFactors kernel_factors(const Network& net, const ScalarFn& surrogate, std::span<const double> x) {
  const ForwardPass pass = net.forward(x);
  const std::size_t depth = net.depth();
  const std::size_t no = net.config().output_dim();
  KernelFactors f;
  f.acts = pass.acts;
  f.deltas.resize(depth);
  for (std::size_t l = 1; l <= depth; ++l) f.deltas[l - 1] = Matrix(no, net.config().widths[l]);
  std::vector<double> e(no, 0.0);
  for (std::size_t i = 0; i < no; ++i) {
    e[i] = 1.0;
    const auto g = backward(net, pass, e, surrogate);
    e[i] = 0.0;
    for (std::size_t l = 0; l < depth; ++l) {
      auto row = f.deltas[l].row(i);
      std::copy(g[l].begin(), g[l].end(), row.begin());
    }
  }
  return f;
}

Matrix factored_kernel(const Network& net, const KernelFactors& left, const KernelFactors& right) {
  const NetworkConfig& c = net.config();
  const std::size_t no = c.output_dim();
  const double sw2 = c.sigma_w * c.sigma_w;
  const double sb2 = c.sigma_b * c.sigma_b;
  Matrix k(no, no);
  for (std::size_t l = 1; l <= net.depth(); ++l) {
    const double fan_in = static_cast<double>(c.widths[l - 1]);
    const double coef = sw2 / fan_in * simd::dot(left.acts[l - 1], right.acts[l - 1]) + sb2;
    const Matrix& d1 = left.deltas[l - 1];
    const Matrix& d2 = right.deltas[l - 1];
    for (std::size_t i = 0; i < no; ++i)
      for (std::size_t j = 0; j < no; ++j) k(i, j) += coef * simd::dot(d1.row(i), d2.row(j));
  }
  return k;
}

QuasiJacobian quasi_jacobian(const Network& net, const ScalarFn& surrogate, std::span<const double> x,
                             const std::string& surrogate_name) {
  const KernelFactors f = kernel_factors(net, surrogate, x);
  const NetworkConfig& c = net.config();
  const std::size_t no = c.output_dim();
  QuasiJacobian q{Matrix(no, c.parameter_count()), c.activation.name, surrogate_name};
  for (std::size_t i = 0; i < no; ++i) {
    auto row = q.matrix.row(i);
    std::size_t pos = 0;
    for (std::size_t l = 1; l <= net.depth(); ++l) {
      const double scale = c.sigma_w / std::sqrt(static_cast<double>(c.widths[l - 1]));
      const auto delta = f.deltas[l - 1].row(i);
      const std::vector<double>& a = f.acts[l - 1];
      for (double d : delta)
        for (double v : a) row[pos++] = d * scale * v;
      for (double d : delta) row[pos++] = d * c.sigma_b;
    }
  }
  return q;
}

QuasiJacobian quasi_jacobian(const Network& net, const SurrogateSpec& surrogate, std::span<const double> x) {
  return quasi_jacobian(net, pointwise(surrogate), x, surrogate.name);
}

Matrix empirical_generalized_ntk(const Network& net, const SurrogateSpec& s1, const SurrogateSpec& s2,
                                 std::span<const double> x, std::span<const double> xp) {
  const KernelFactors left = kernel_factors(net, pointwise(s1), x);
  const KernelFactors right = kernel_factors(net, pointwise(s2), xp);
  return factored_kernel(net, left, right);
}

namespace {

std::vector<KernelFactors> all_factors(const Network& net, const ScalarFn& s,
                                       const std::vector<std::vector<double>>& points, std::size_t threads) {
  std::vector<KernelFactors> out(points.size());
  parallel_for(points.size(), [&](std::size_t p) { out[p] = kernel_factors(net, s, points[p]); }, threads);
  return out;
}

}  // namespace

Matrix kernel_cross(const Network& net, const ScalarFn& s1, const ScalarFn& s2,
                    const std::vector<std::vector<double>>& left, const std::vector<std::vector<double>>& right,
                    std::size_t threads) {
  const std::vector<KernelFactors> f1 = all_factors(net, s1, left, threads);
  const std::vector<KernelFactors> f2 = all_factors(net, s2, right, threads);
  const std::size_t no = net.config().output_dim();
  Matrix k(left.size() * no, right.size() * no);
  parallel_for(
      left.size(),
      [&](std::size_t p) {
        for (std::size_t q = 0; q < right.size(); ++q) {
          const Matrix block = factored_kernel(net, f1[p], f2[q]);
          for (std::size_t i = 0; i < no; ++i)
            for (std::size_t j = 0; j < no; ++j) k(p * no + i, q * no + j) = block(i, j);
        }
      },
      threads);
  return k;
}

KernelMatrix kernel_gram(const Network& net, const ScalarFn& s1, const ScalarFn& s2,
                         const std::vector<std::vector<double>>& points, std::size_t threads) {
  return KernelMatrix(kernel_cross(net, s1, s2, points, points, threads));
}

KernelMatrix kernel_gram(const Network& net, const SurrogateSpec& s1, const SurrogateSpec& s2,
                         const std::vector<std::vector<double>>& points, std::size_t threads) {
  return kernel_gram(net, pointwise(s1), pointwise(s2), points, threads);
}

}  // namespace sgntk
