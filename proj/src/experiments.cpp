#include "sgntk/experiments.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "sgntk/dataset.hpp"
#include "sgntk/empirical_kernels.hpp"
#include "sgntk/errors.hpp"
#include "sgntk/format.hpp"
#include "sgntk/gp_regression.hpp"
#include "sgntk/network.hpp"
#include "sgntk/parallel.hpp"
#include "sgntk/rng.hpp"
#include "sgntk/training.hpp"

namespace sgntk {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string num(double v) { return format_real(v); }
std::string num(std::size_t v) { return std::to_string(v); }

std::string kernel_cell(const KernelMatrix& k, std::size_t r, std::size_t c) {
  return k.is_divergent(r, c) ? "DIV" : num(k.values(r, c));
}

Dataset training_set(std::uint64_t root, std::size_t count) {
  return make_sphere_dataset(count, derive_seed(root, "dataset", 0));
}

struct CurveJob {
  std::size_t mi = 0;
  std::size_t wi = 0;
  std::size_t seed = 0;
  std::vector<double> init;
  std::vector<double> trained;
  double final_loss = kNaN;
  bool diverged = false;
};

ExperimentReport run_convergence(const ConvergenceConfig& cfg, bool sgl, const std::optional<SurrogateSpec>& surrogate,
                                 const std::string& name) {
  if (cfg.widths.empty() || cfg.m_values.empty() || cfg.seeds == 0) {
    raise(Errc::InvalidArgument, "need at least one width, scale and seed");
  }
  const Dataset data = training_set(cfg.seed, cfg.train_points);
  const double loss_scale = cfg.loss_scale > 0.0 ? cfg.loss_scale : static_cast<double>(data.size());
  const std::vector<double> angles = angle_grid(cfg.grid);
  const Points grid = circle_points(angles);
  const Points reference{{1.0, 0.0}};

  // analytic curves per scale plus the sign limit
  auto make_spec = [&](ActivationSpec act, KernelMode mode) {
    KernelSpec s = (sgl && surrogate) ? KernelSpec::sg_ntk(cfg.depth, std::move(act), *surrogate, mode)
                                      : KernelSpec::ntk(cfg.depth, std::move(act), mode);
    s.sigma_w = cfg.sigma_w;
    s.sigma_b = cfg.sigma_b;
    return s;
  };
  std::vector<KernelMatrix> analytic;
  for (double m : cfg.m_values) {
    analytic.push_back(analytic_gram(make_spec(make_erf_m(m), KernelMode::ClosedForm), reference, grid));
  }
  const KernelMatrix limit = analytic_gram(make_spec(make_sign(), KernelMode::SignLimit), reference, grid);

  std::vector<CurveJob> jobs;
  for (std::size_t mi = 0; mi < cfg.m_values.size(); ++mi)
    for (std::size_t wi = 0; wi < cfg.widths.size(); ++wi)
      for (std::size_t s = 0; s < cfg.seeds; ++s) jobs.push_back({mi, wi, s, {}, {}, kNaN, false});

  parallel_for(
      jobs.size(),
      [&](std::size_t j) {
        CurveJob& job = jobs[j];
        const ActivationSpec act = make_erf_m(cfg.m_values[job.mi]);
        NetworkConfig nc = NetworkConfig::mlp(2, cfg.widths[job.wi], cfg.depth, 1, act,
                                              derive_seed(cfg.seed, "network", job.seed));
        nc.sigma_w = cfg.sigma_w;
        nc.sigma_b = cfg.sigma_b;
        Network net = Network::init(nc);
        const ScalarFn s1 = pointwise(act.derivative());
        const ScalarFn s2 = pointwise(sgl && surrogate ? *surrogate : act.derivative());
        const Matrix k0 = kernel_cross(net, s1, s2, reference, grid);
        job.init.assign(k0.entries().begin(), k0.entries().end());

        TrainConfig tc;
        tc.eta = cfg.eta;
        tc.steps = cfg.steps;
        tc.loss_scale = loss_scale;
        tc.record_loss_every = std::max<std::size_t>(cfg.steps, 1);
        if (sgl) {
          tc.rule = UpdateRule::Sgl;
          tc.surrogate = surrogate ? *surrogate : act.derivative();
        }
        try {
          TrainTrace trace = train(std::move(net), data, tc);
          const Matrix k1 = kernel_cross(trace.final_network, s1, s2, reference, grid);
          job.trained.assign(k1.entries().begin(), k1.entries().end());
          job.final_loss = trace.loss.back();
        } catch (const TrainingDiverged&) {
          job.diverged = true;
          job.trained.assign(grid.size(), kNaN);
        }
      },
      cfg.threads);

  ExperimentReport report;
  report.name = name;
  report.metadata = {{"experiment", name},
                     {"rule", sgl ? "sgl" : "gradient-descent"},
                     {"surrogate", sgl ? (surrogate ? surrogate->name : std::string("true-derivative")) : "none"},
                     {"widths", cfg.widths},
                     {"m_values", cfg.m_values},
                     {"seeds", cfg.seeds},
                     {"steps", cfg.steps},
                     {"depth", cfg.depth},
                     {"grid_points", cfg.grid},
                     {"grid", "delta_alpha_k = -pi + 2 pi k / N, x = (1, 0), x' = (cos, sin)(delta_alpha)"},
                     {"train_points", cfg.train_points},
                     {"eta", cfg.eta},
                     {"loss_scale", loss_scale},
                     {"sigma_w", cfg.sigma_w},
                     {"sigma_b", cfg.sigma_b},
                     {"root_seed", cfg.seed}};

  Table& curves = report.table(name + "_kernels", {"seed", "width", "m", "angle", "empirical_init",
                                                   "empirical_trained", "analytic", "sign_limit"});
  Table& mse = report.table(name + "_mse", {"seed", "width", "m", "mse_init", "mse_trained", "final_loss", "diverged"});
  for (const CurveJob& job : jobs) {
    const KernelMatrix& a = analytic[job.mi];
    double e0 = 0.0;
    double e1 = 0.0;
    for (std::size_t k = 0; k < grid.size(); ++k) {
      const double target = a.values(0, k);
      curves.add_row({num(job.seed), num(cfg.widths[job.wi]), num(cfg.m_values[job.mi]), num(angles[k]),
                      num(job.init[k]), num(job.trained[k]), num(target), kernel_cell(limit, 0, k)});
      e0 += (job.init[k] - target) * (job.init[k] - target);
      e1 += (job.trained[k] - target) * (job.trained[k] - target);
    }
    const double n = static_cast<double>(grid.size());
    mse.add_row({num(job.seed), num(cfg.widths[job.wi]), num(cfg.m_values[job.mi]), num(e0 / n), num(e1 / n),
                 num(job.final_loss), job.diverged ? "1" : "0"});
  }
  Table& points = report.table(name + "_train", {"seed", "index", "x", "y", "target"});
  for (std::size_t i = 0; i < data.size(); ++i) {
    points.add_row({num(cfg.seed), num(i), num(data.inputs[i][0]), num(data.inputs[i][1]), num(data.targets[i][0])});
  }
  return report;
}

}  // namespace

ConvergenceConfig ConvergenceConfig::paper_scale() {
  ConvergenceConfig c;
  c.widths = {10, 100, 500, 1000};
  c.seeds = 10;
  c.steps = 10000;
  return c;
}

ExperimentReport run_fig1(const ConvergenceConfig& cfg) { return run_convergence(cfg, false, std::nullopt, "fig1"); }

ExperimentReport run_fig2(const ConvergenceConfig& cfg, std::optional<SurrogateSpec> surrogate) {
  return run_convergence(cfg, true, surrogate, "fig2");
}

EnsembleConfig EnsembleConfig::paper_scale() {
  EnsembleConfig c;
  c.width = 500;
  c.count = 500;
  c.steps = 30000;
  return c;
}

EnsembleResult run_ensemble(const EnsembleConfig& cfg) {
  if (cfg.count < 1) raise(Errc::InvalidArgument, "ensemble needs count >= 1");
  const Dataset data = training_set(cfg.seed, cfg.train_points);
  EnsembleResult r;
  r.angles = angle_grid(cfg.test_points);
  const Points grid = circle_points(r.angles);
  r.outputs.assign(cfg.count, {});
  r.losses.assign(cfg.count, {});
  std::vector<std::vector<std::size_t>> steps(cfg.count);
  std::vector<char> diverged(cfg.count, 0);

  parallel_for(
      cfg.count,
      [&](std::size_t k) {
        NetworkConfig nc = NetworkConfig::mlp(2, cfg.width, cfg.depth, 1, cfg.activation,
                                              derive_seed(cfg.seed, "member", k));
        nc.sigma_w = cfg.sigma_w;
        nc.sigma_b = cfg.sigma_b;
        nc.kappa = cfg.kappa;
        TrainConfig tc;
        tc.eta = cfg.eta;
        tc.steps = cfg.steps;
        tc.loss_scale = cfg.loss_scale;
        tc.record_loss_every = cfg.record_loss_every;
        if (cfg.surrogate) {
          tc.rule = UpdateRule::Sgl;
          tc.surrogate = cfg.surrogate;
        }
        std::vector<double> out(grid.size(), kNaN);
        try {
          const TrainTrace trace = train(Network::init(nc), data, tc);
          for (std::size_t p = 0; p < grid.size(); ++p) out[p] = trace.final_network.output(grid[p])[0];
          r.losses[k] = trace.loss;
          steps[k] = trace.loss_steps;
        } catch (const TrainingDiverged& e) {
          diverged[k] = 1;
          r.losses[k] = e.trace().loss;
          steps[k] = e.trace().loss_steps;
        }
        r.outputs[k] = std::move(out);
      },
      cfg.threads);

  for (std::size_t k = 0; k < cfg.count; ++k) {
    r.diverged += diverged[k];
    if (steps[k].size() > r.loss_steps.size()) r.loss_steps = steps[k];
  }
  const std::size_t np = grid.size();
  r.mean.assign(np, 0.0);
  r.std.assign(np, kNaN);
  r.se.assign(np, kNaN);
  const std::size_t live = cfg.count - r.diverged;
  for (std::size_t p = 0; p < np; ++p) {
    if (live == 0) {
      r.mean[p] = kNaN;
      continue;
    }
    double sum = 0.0;
    for (std::size_t k = 0; k < cfg.count; ++k)
      if (!diverged[k]) sum += r.outputs[k][p];
    const double mean = sum / static_cast<double>(live);
    r.mean[p] = mean;
    if (live < 2) continue;
    double ss = 0.0;
    for (std::size_t k = 0; k < cfg.count; ++k)
      if (!diverged[k]) ss += (r.outputs[k][p] - mean) * (r.outputs[k][p] - mean);
    r.std[p] = std::sqrt(ss / static_cast<double>(live - 1));
    r.se[p] = r.std[p] / std::sqrt(static_cast<double>(live));
  }
  return r;
}

KernelSpec ensemble_kernel(const EnsembleConfig& cfg) {
  const KernelMode mode = cfg.activation.kind == ActivationKind::Sign ? KernelMode::SignLimit
                          : cfg.activation.kind == ActivationKind::Erf ? KernelMode::ClosedForm
                                                                        : KernelMode::Quadrature;
  KernelSpec s = cfg.surrogate ? KernelSpec::sg_ntk(cfg.depth, cfg.activation, *cfg.surrogate, mode)
                               : KernelSpec::ntk(cfg.depth, cfg.activation, mode);
  s.sigma_w = cfg.sigma_w;
  s.sigma_b = cfg.sigma_b;
  return s;
}

namespace {

nlohmann::json ensemble_metadata(const EnsembleConfig& cfg, const std::string& name, const EnsembleResult& r) {
  return {{"experiment", name},
          {"activation", cfg.activation.name},
          {"surrogate", cfg.surrogate ? cfg.surrogate->name : std::string("none")},
          {"rule", cfg.surrogate ? "sgl" : "gradient-descent"},
          {"width", cfg.width},
          {"depth", cfg.depth},
          {"count", cfg.count},
          {"steps", cfg.steps},
          {"test_points", cfg.test_points},
          {"train_points", cfg.train_points},
          {"eta", cfg.eta},
          {"kappa", cfg.kappa},
          {"loss_scale", cfg.loss_scale},
          {"sigma_w", cfg.sigma_w},
          {"sigma_b", cfg.sigma_b},
          {"root_seed", cfg.seed},
          {"member_seeds", "derive_seed(root_seed, \"member\", k)"},
          {"diverged_members", r.diverged}};
}

void ensemble_tables(ExperimentReport& report, const EnsembleConfig& cfg, const EnsembleResult& r,
                     const std::string& name) {
  Table& members = report.table(name + "_members", {"seed", "member", "angle", "output"});
  for (std::size_t k = 0; k < r.outputs.size(); ++k)
    for (std::size_t p = 0; p < r.angles.size(); ++p) {
      members.add_row({num(cfg.seed), num(k), num(r.angles[p]), num(r.outputs[k][p])});
    }
  Table& losses = report.table(name + "_loss", {"seed", "member", "step", "loss"});
  for (std::size_t k = 0; k < r.losses.size(); ++k)
    for (std::size_t i = 0; i < r.losses[k].size() && i < r.loss_steps.size(); ++i) {
      losses.add_row({num(cfg.seed), num(k), num(r.loss_steps[i]), num(r.losses[k][i])});
    }
  const Dataset data = training_set(cfg.seed, cfg.train_points);
  Table& points = report.table(name + "_train", {"seed", "index", "x", "y", "angle", "target"});
  for (std::size_t i = 0; i < data.size(); ++i) {
    points.add_row({num(cfg.seed), num(i), num(data.inputs[i][0]), num(data.inputs[i][1]),
                    num(std::atan2(data.inputs[i][1], data.inputs[i][0])), num(data.targets[i][0])});
  }
}

}  // namespace

ExperimentReport run_train_ensemble(const EnsembleConfig& cfg) {
  const EnsembleResult r = run_ensemble(cfg);
  ExperimentReport report;
  report.name = "ensemble";
  report.metadata = ensemble_metadata(cfg, "ensemble", r);
  ensemble_tables(report, cfg, r, "ensemble");
  Table& summary = report.table("ensemble_summary", {"seed", "angle", "mean", "std", "se"});
  for (std::size_t p = 0; p < r.angles.size(); ++p) {
    summary.add_row({num(cfg.seed), num(r.angles[p]), num(r.mean[p]), num(r.std[p]), num(r.se[p])});
  }
  return report;
}

ExperimentReport run_fig3(const EnsembleConfig& cfg) {
  const EnsembleResult r = run_ensemble(cfg);
  const Dataset data = training_set(cfg.seed, cfg.train_points);
  const Points grid = circle_points(r.angles);
  const KernelSpec spec = ensemble_kernel(cfg);
  const GPPosterior gp(spec, data, std::nullopt, cfg.eta, cfg.kappa, cfg.threads == 0 ? 1 : cfg.threads);
  const Matrix gp_mean = gp.mean(grid);
  const std::vector<double> gp_var = gp.variance(grid);
  const GPPosterior baseline(prior_spec(spec), data, std::nullopt, cfg.eta, 1.0);
  const Matrix nngp_mean = baseline.mean(grid);

  ExperimentReport report;
  report.name = "fig3";
  report.metadata = ensemble_metadata(cfg, "fig3", r);
  report.metadata["gp_kernel"] = std::string(to_string(spec.kind)) + "/" + to_string(spec.mode);
  report.metadata["gp_time"] = "inf";
  ensemble_tables(report, cfg, r, "fig3");
  Table& summary = report.table("fig3_summary", {"seed", "angle", "ensemble_mean", "ensemble_std", "ensemble_se",
                                                 "gp_mean", "gp_std", "nngp_mean"});
  for (std::size_t p = 0; p < r.angles.size(); ++p) {
    summary.add_row({num(cfg.seed), num(r.angles[p]), num(r.mean[p]), num(r.std[p]), num(r.se[p]),
                     num(gp_mean(p, 0)), num(std::sqrt(std::max(gp_var[p], 0.0))), num(nngp_mean(p, 0))});
  }
  return report;
}

}  // namespace sgntk
