#include "sgntk/training.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "sgntk/empirical_kernels.hpp"
#include "sgntk/simd.hpp"

namespace sgntk {

double TrainTrace::max_drift() const noexcept {
  double m = 0.0;
  for (const DriftSample& s : drift) m = std::max(m, s.from_init);
  return m;
}

TrainingDiverged::TrainingDiverged(const std::string& what, TrainTrace trace)
    : Error(Errc::NonFiniteLoss, what), trace_(std::move(trace)) {}

double critical_learning_rate(double lambda_min, double lambda_max) {
  if (!(lambda_min + lambda_max > 0.0)) raise(Errc::InvalidArgument, "spectrum must be positive");
  return 2.0 / (lambda_min + lambda_max);
}

namespace {

/// Activations and preactivations of a whole batch, layer by layer.
struct Batch {
  std::vector<Points> acts;     // acts[l][p], l = 0 .. L-1
  std::vector<Points> preacts;  // preacts[l-1][p], l = 1 .. L
};

void forward_batch(const Network& net, const Points& inputs, Batch& b) {
  const NetworkConfig& c = net.config();
  const std::size_t depth = net.depth();
  const std::size_t d = inputs.size();
  b.acts.resize(depth);
  b.preacts.resize(depth);
  b.acts[0] = inputs;
  for (std::size_t l = 1; l <= depth; ++l) {
    const Layer& layer = net.layer(l);
    const double scale = c.sigma_w / std::sqrt(static_cast<double>(c.widths[l - 1]));
    Points& h = b.preacts[l - 1];
    h.assign(d, std::vector<double>(c.widths[l]));
    for (std::size_t i = 0; i < c.widths[l]; ++i) {
      const auto row = layer.weights.row(i);
      const double bias = c.sigma_b * layer.biases[i];
      for (std::size_t p = 0; p < d; ++p) h[p][i] = scale * simd::dot(row, b.acts[l - 1][p]) + bias;
    }
    if (l < depth) {
      Points& a = b.acts[l];
      a.assign(d, std::vector<double>(c.widths[l]));
      for (std::size_t p = 0; p < d; ++p)
        for (std::size_t i = 0; i < c.widths[l]; ++i) a[p][i] = c.activation.eval(h[p][i]);
    }
  }
}

double batch_loss(const Batch& b, const Dataset& data, double loss_scale, Points* residuals) {
  double loss = 0.0;
  const Points& out = b.preacts.back();
  if (residuals) residuals->assign(out.size(), {});
  for (std::size_t p = 0; p < out.size(); ++p) {
    std::vector<double> r(out[p].size());
    for (std::size_t j = 0; j < r.size(); ++j) {
      r[j] = out[p][j] - data.targets[p][j];
      loss += r[j] * r[j];
    }
    if (residuals) (*residuals)[p] = std::move(r);
  }
  return 0.5 * loss / loss_scale;
}

/// One Euler step given the batch at the current parameters. Each weight
/// row is used for back-propagation before it is updated.
void update(Network& net, const Batch& b, Points g, const ScalarFn& surrogate, double eta) {
  const NetworkConfig& c = net.config();
  const std::size_t d = g.size();
  for (std::size_t l = net.depth(); l >= 1; --l) {
    Layer& layer = net.layer(l);
    const std::size_t fan_in = c.widths[l - 1];
    const double scale = c.sigma_w / std::sqrt(static_cast<double>(fan_in));
    const bool propagate = l > 1;
    Points lower;
    if (propagate) lower.assign(d, std::vector<double>(fan_in, 0.0));
    for (std::size_t i = 0; i < c.widths[l]; ++i) {
      const auto row = layer.weights.row(i);
      double bias_grad = 0.0;
      for (std::size_t p = 0; p < d; ++p) {
        const double gi = g[p][i];
        if (gi == 0.0) continue;
        if (propagate) simd::axpy(gi, row, lower[p]);
        bias_grad += gi;
      }
      for (std::size_t p = 0; p < d; ++p) {
        const double gi = g[p][i];
        if (gi != 0.0) simd::axpy(-eta * scale * gi, b.acts[l - 1][p], row);
      }
      layer.biases[i] -= eta * c.sigma_b * bias_grad;
    }
    if (!propagate) break;
    for (std::size_t p = 0; p < d; ++p) {
      const std::vector<double>& h = b.preacts[l - 2][p];
      for (std::size_t j = 0; j < fan_in; ++j) lower[p][j] *= scale * surrogate(h[j]);
    }
    g = std::move(lower);
  }
}

SurrogateSpec update_surrogate(const Network& net, const TrainConfig& cfg) {
  if (cfg.rule == UpdateRule::Sgl) {
    if (!cfg.surrogate) raise(Errc::MissingSurrogate, "SGL needs a surrogate derivative");
    return *cfg.surrogate;
  }
  const SurrogateSpec d = net.config().activation.derivative();
  if (d.is_dirac()) {
    raise(Errc::MissingSurrogate, net.config().activation.name + " has no usable derivative; train with SGL");
  }
  return d;
}

}  // namespace

double training_loss(const Network& net, const Dataset& data, double loss_scale) {
  Batch b;
  forward_batch(net, data.inputs, b);
  return batch_loss(b, data, loss_scale, nullptr);
}

TrainTrace train(Network net, const Dataset& data, const TrainConfig& cfg) {
  data.validate();
  if (!(cfg.eta > 0.0)) raise(Errc::InvalidArgument, "eta must be > 0");
  if (!(cfg.loss_scale > 0.0)) raise(Errc::InvalidArgument, "loss_scale must be > 0");
  if (data.inputs.front().size() != net.config().input_dim() ||
      data.targets.front().size() != net.config().output_dim()) {
    raise(Errc::DimensionMismatch, "dataset does not match the network's input/output widths");
  }
  const SurrogateSpec surrogate = update_surrogate(net, cfg);
  const ScalarFn s = pointwise(surrogate);

  TrainTrace trace{{}, {}, {}, {}, net};
  if (cfg.eta_critical && cfg.eta >= *cfg.eta_critical) {
    std::ostringstream os;
    os << "learning rate " << cfg.eta << " >= critical " << *cfg.eta_critical;
    trace.warnings.push_back(os.str());
  }

  const bool track = cfg.record_kernel_every > 0;
  ScalarFn k1;
  ScalarFn k2;
  Matrix k0;
  auto record_kernel = [&](std::size_t step) {
    const Matrix k = kernel_gram(net, k1, k2, data.inputs).values;
    if (step == 0) k0 = k;
    DriftSample sample{step, (k - k0).frobenius_norm(), std::numeric_limits<double>::quiet_NaN()};
    if (cfg.drift_reference) sample.from_reference = (k - *cfg.drift_reference).frobenius_norm();
    trace.drift.push_back(sample);
  };
  if (track) {
    k1 = pointwise(cfg.drift_slot1 ? *cfg.drift_slot1 : net.config().activation.derivative());
    k2 = pointwise(cfg.drift_slot2 ? *cfg.drift_slot2 : surrogate);
    record_kernel(0);
  }

  Batch batch;
  Points residuals;
  double initial = 0.0;
  const std::size_t every = std::max<std::size_t>(cfg.record_loss_every, 1);
  for (std::size_t step = 0;; ++step) {
    forward_batch(net, data.inputs, batch);
    const double loss = batch_loss(batch, data, cfg.loss_scale, &residuals);
    if (step == 0) initial = loss;
    if (step % every == 0 || step == cfg.steps) {
      trace.loss_steps.push_back(step);
      trace.loss.push_back(loss);
    }
    if (!std::isfinite(loss) || loss > cfg.divergence_factor * std::max(initial, 1e-300)) {
      trace.final_network = net;
      std::ostringstream os;
      os << "training diverged at step " << step << " (loss " << loss << ")";
      throw TrainingDiverged(os.str(), std::move(trace));
    }
    if (step == cfg.steps) break;
    for (auto& r : residuals)
      for (double& v : r) v /= cfg.loss_scale;
    update(net, batch, std::move(residuals), s, cfg.eta);
    if (track && ((step + 1) % cfg.record_kernel_every == 0 || step + 1 == cfg.steps)) record_kernel(step + 1);
  }
  trace.final_network = std::move(net);
  return trace;
}

std::vector<DriftSample> kernel_drift(std::span<const Network> trajectory, const Points& points,
                                      const SurrogateSpec& s1, const SurrogateSpec& s2, const Matrix* reference) {
  std::vector<DriftSample> out;
  Matrix k0;
  for (std::size_t t = 0; t < trajectory.size(); ++t) {
    const Matrix k = kernel_gram(trajectory[t], s1, s2, points).values;
    if (t == 0) k0 = k;
    out.push_back({t, (k - k0).frobenius_norm(),
                   reference ? (k - *reference).frobenius_norm() : std::numeric_limits<double>::quiet_NaN()});
  }
  return out;
}

}  // namespace sgntk
