#include "sgntk/network.hpp"

#include <cmath>
#include <string>

#include "sgntk/errors.hpp"
#include "sgntk/parallel.hpp"
#include "sgntk/rng.hpp"
#include "sgntk/simd.hpp"

namespace sgntk {

NetworkConfig NetworkConfig::mlp(std::size_t inputs, std::size_t width, std::size_t depth,
                                 std::size_t outputs, ActivationSpec activation, std::uint64_t seed) {
  if (depth < 1) raise(Errc::InvalidArgument, "depth must be >= 1");
  NetworkConfig c;
  c.widths.assign(depth + 1, width);
  c.widths.front() = inputs;
  c.widths.back() = outputs;
  c.activation = std::move(activation);
  c.seed = seed;
  return c;
}

std::size_t NetworkConfig::parameter_count() const noexcept {
  std::size_t p = 0;
  for (std::size_t l = 1; l < widths.size(); ++l) p += widths[l] * (widths[l - 1] + 1);
  return p;
}

void NetworkConfig::validate() const {
  if (widths.size() < 2) raise(Errc::InvalidArgument, "network needs depth >= 1");
  for (std::size_t w : widths)
    if (w == 0) raise(Errc::InvalidArgument, "layer widths must be >= 1");
  if (!(sigma_w > 0.0) || !std::isfinite(sigma_w)) raise(Errc::InvalidArgument, "sigma_w must be > 0");
  if (!(sigma_b >= 0.0) || !std::isfinite(sigma_b)) raise(Errc::InvalidArgument, "sigma_b must be >= 0");
  if (!(kappa > 0.0) || kappa > 1.0) raise(Errc::InvalidScale, "kappa must lie in (0, 1]");
  if (!activation.eval) raise(Errc::InvalidArgument, "activation has no evaluator");
}

Network Network::init(const NetworkConfig& config) {
  config.validate();
  const CounterRng root = CounterRng(config.seed).stream("layer");
  std::vector<Layer> layers;
  const std::size_t depth = config.depth();
  for (std::size_t l = 1; l <= depth; ++l) {
    const CounterRng layer_rng = root.stream(l);
    const CounterRng w_rng = layer_rng.stream("W");
    const CounterRng b_rng = layer_rng.stream("b");
    const double scale = l == depth ? config.kappa : 1.0;
    Layer layer{Matrix(config.widths[l], config.widths[l - 1]), std::vector<double>(config.widths[l])};
    auto w = layer.weights.entries();
    for (std::size_t k = 0; k < w.size(); ++k) w[k] = scale * w_rng.normal(k);
    for (std::size_t k = 0; k < layer.biases.size(); ++k) layer.biases[k] = scale * b_rng.normal(k);
    layers.push_back(std::move(layer));
  }
  return Network(config, std::move(layers));
}

Network::Network(NetworkConfig config, std::vector<Layer> layers)
    : config_(std::move(config)), layers_(std::move(layers)) {
  config_.validate();
  if (layers_.size() != config_.depth()) raise(Errc::DimensionMismatch, "layer count != depth");
  for (std::size_t l = 1; l <= layers_.size(); ++l) {
    const Layer& layer = layers_[l - 1];
    if (layer.weights.rows() != config_.widths[l] || layer.weights.cols() != config_.widths[l - 1] ||
        layer.biases.size() != config_.widths[l]) {
      raise(Errc::DimensionMismatch, "layer " + std::to_string(l) + " shape does not match widths");
    }
  }
}

ForwardPass Network::forward(std::span<const double> x) const { return forward(x, config_.activation); }

ForwardPass Network::forward(std::span<const double> x, const ActivationSpec& activation) const {
  if (x.size() != config_.input_dim()) raise(Errc::DimensionMismatch, "input dimension mismatch");
  ForwardPass pass;
  pass.acts.emplace_back(x.begin(), x.end());
  const double sw = config_.sigma_w;
  const double sb = config_.sigma_b;
  for (std::size_t l = 1; l <= layers_.size(); ++l) {
    const Layer& layer = layers_[l - 1];
    const std::vector<double>& in = pass.acts.back();
    const double c = sw / std::sqrt(static_cast<double>(in.size()));
    std::vector<double> h(layer.biases.size());
    for (std::size_t i = 0; i < h.size(); ++i) h[i] = c * simd::dot(layer.weights.row(i), in) + sb * layer.biases[i];
    if (l < layers_.size()) {
      std::vector<double> a(h.size());
      for (std::size_t i = 0; i < h.size(); ++i) a[i] = activation.eval(h[i]);
      pass.acts.push_back(std::move(a));
    }
    pass.preacts.push_back(std::move(h));
  }
  return pass;
}

std::vector<double> Network::output(std::span<const double> x) const { return forward(x).output(); }

std::vector<double> Network::parameters() const {
  std::vector<double> flat;
  flat.reserve(config_.parameter_count());
  for (const Layer& layer : layers_) {
    flat.insert(flat.end(), layer.weights.entries().begin(), layer.weights.entries().end());
    flat.insert(flat.end(), layer.biases.begin(), layer.biases.end());
  }
  return flat;
}

void Network::set_parameters(std::span<const double> flat) {
  if (flat.size() != config_.parameter_count()) raise(Errc::DimensionMismatch, "parameter count mismatch");
  std::size_t pos = 0;
  for (Layer& layer : layers_) {
    auto w = layer.weights.entries();
    for (double& v : w) v = flat[pos++];
    for (double& v : layer.biases) v = flat[pos++];
  }
}

std::vector<std::vector<double>> backward(const Network& net, const ForwardPass& pass,
                                          std::span<const double> cotangent, const ScalarFn& surrogate) {
  const std::size_t depth = net.depth();
  if (cotangent.size() != net.config().output_dim()) raise(Errc::DimensionMismatch, "cotangent size");
  std::vector<std::vector<double>> g(depth);
  g[depth - 1].assign(cotangent.begin(), cotangent.end());
  const double sw = net.config().sigma_w;
  for (std::size_t l = depth; l >= 2; --l) {
    const Matrix& w = net.layer(l).weights;
    const std::vector<double>& upper = g[l - 1];
    std::vector<double> lower(w.cols(), 0.0);
    for (std::size_t i = 0; i < w.rows(); ++i) {
      if (upper[i] != 0.0) simd::axpy(upper[i], w.row(i), lower);
    }
    const double c = sw / std::sqrt(static_cast<double>(w.cols()));
    const std::vector<double>& h = pass.preacts[l - 2];
    for (std::size_t j = 0; j < lower.size(); ++j) lower[j] *= c * surrogate(h[j]);
    g[l - 2] = std::move(lower);
  }
  return g;
}

namespace {

EnsembleStatistics collect(const NetworkConfig& config, const ActivationSpec* second, std::size_t count,
                           const std::vector<std::vector<double>>& points, std::size_t threads) {
  config.validate();
  if (count < 2) raise(Errc::InvalidArgument, "ensemble needs count >= 2");
  const std::size_t np = points.size();
  const std::size_t no = config.output_dim();
  // samples[k] holds f(x_p)_j at p*no + j, then g(x_p)_j for the paired slot
  std::vector<std::vector<double>> samples(count);
  parallel_for(
      count,
      [&](std::size_t k) {
        NetworkConfig member = config;
        member.seed = derive_seed(config.seed, "ensemble", k);
        const Network net = Network::init(member);
        std::vector<double> out(2 * np * no);
        for (std::size_t p = 0; p < np; ++p) {
          const std::vector<double> f = net.forward(points[p]).output();
          const std::vector<double> g = second ? net.forward(points[p], *second).output() : f;
          for (std::size_t j = 0; j < no; ++j) {
            out[p * no + j] = f[j];
            out[np * no + p * no + j] = g[j];
          }
        }
        samples[k] = std::move(out);
      },
      threads);

  EnsembleStatistics s;
  s.count = count;
  s.points = np;
  s.outputs = no;
  s.mean = Matrix(np, no);
  s.mean_second = Matrix(np, no);
  const double n = static_cast<double>(count);
  for (const auto& out : samples)
    for (std::size_t p = 0; p < np; ++p)
      for (std::size_t j = 0; j < no; ++j) {
        s.mean(p, j) += out[p * no + j] / n;
        s.mean_second(p, j) += out[np * no + p * no + j] / n;
      }
  for (std::size_t j = 0; j < no; ++j) {
    Matrix cov(np, np);
    Matrix se(np, np);
    for (std::size_t p = 0; p < np; ++p)
      for (std::size_t q = 0; q < np; ++q) {
        double sum = 0.0;
        double sum2 = 0.0;
        for (const auto& out : samples) {
          const double z = (out[p * no + j] - s.mean(p, j)) * (out[np * no + q * no + j] - s.mean_second(q, j));
          sum += z;
          sum2 += z * z;
        }
        cov(p, q) = sum / (n - 1.0);
        const double var = std::max(0.0, (sum2 - sum * sum / n) / (n - 1.0));
        se(p, q) = std::sqrt(var / n);
      }
    s.cov.push_back(std::move(cov));
    s.cov_se.push_back(std::move(se));
  }
  if (!second) s.mean_second = Matrix();
  return s;
}

}  // namespace

EnsembleStatistics ensemble_statistics(const NetworkConfig& config, std::size_t count,
                                       const std::vector<std::vector<double>>& points, std::size_t threads) {
  return collect(config, nullptr, count, points, threads);
}

EnsembleStatistics ensemble_statistics_paired(const NetworkConfig& config, const ActivationSpec& second,
                                              std::size_t count,
                                              const std::vector<std::vector<double>>& points,
                                              std::size_t threads) {
  return collect(config, &second, count, points, threads);
}

}  // namespace sgntk
