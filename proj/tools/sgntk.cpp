#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sgntk/analytic_kernels.hpp"
#include "sgntk/dataset.hpp"
#include "sgntk/errors.hpp"
#include "sgntk/experiments.hpp"
#include "sgntk/format.hpp"
#include "sgntk/gp_regression.hpp"
#include "sgntk/report.hpp"
#include "sgntk/validate.hpp"

namespace {

using nlohmann::json;
using namespace sgntk;

/// JSON config files: nested objects address subcommands.
class ConfigJson : public CLI::Config {
 public:
  std::string to_config(const CLI::App* app, bool default_also, bool, std::string) const override {
    json j;
    for (const CLI::Option* opt : app->get_options({})) {
      if (opt->get_lnames().empty() || !opt->get_configurable()) continue;
      const std::string name = opt->get_lnames()[0];
      if (opt->count() > 0 || default_also) j[name] = opt->as<std::string>();
    }
    for (const CLI::App* sub : app->get_subcommands({})) j[sub->get_name()] = json::parse(to_config(sub, default_also, false, ""));
    return j.dump(2);
  }

  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    json j;
    try {
      input >> j;
    } catch (const json::exception& e) {
      throw CLI::ConversionError(std::string("config: ") + e.what());
    }
    return flatten(j, "", {});
  }

 private:
  static std::string scalar(const json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    return v.dump();
  }

  std::vector<CLI::ConfigItem> flatten(const json& j, const std::string& name, std::vector<std::string> prefix) const {
    std::vector<CLI::ConfigItem> out;
    if (j.is_object()) {
      if (!name.empty()) prefix.push_back(name);
      for (auto it = j.begin(); it != j.end(); ++it) {
        auto sub = flatten(*it, it.key(), prefix);
        out.insert(out.end(), sub.begin(), sub.end());
      }
      return out;
    }
    if (name.empty()) throw CLI::ConversionError("config root must be a JSON object");
    CLI::ConfigItem item;
    item.name = name;
    item.parents = prefix;
    if (j.is_array()) {
      for (const json& v : j) item.inputs.push_back(scalar(v));
    } else {
      item.inputs = {scalar(j)};
    }
    out.push_back(std::move(item));
    return out;
  }
};

struct Globals {
  std::uint64_t seed = 0;
  std::string out_dir = "out";
  bool paper_scale = false;
  std::size_t threads = 0;
  std::string config_path;
};

json config_echo(const Globals& g) {
  if (g.config_path.empty()) return nullptr;
  std::ifstream in(g.config_path);
  std::stringstream buf;
  buf << in.rdbuf();
  if (g.config_path.ends_with(".json")) return json::parse(buf.str(), nullptr, false);
  return buf.str();
}

void finish(ExperimentReport& report, const Globals& g, const std::string& dir) {
  report.metadata["config_file"] = config_echo(g);
  report.write(dir);
  std::cout << "wrote " << report.tables.size() << " tables to " << dir << "\n";
}

KernelKind parse_kind(const std::string& s) {
  for (KernelKind k : {KernelKind::Nngp, KernelKind::NngpDot, KernelKind::Ntk, KernelKind::CrossNngp,
                       KernelKind::SurrogateSigma, KernelKind::SgNtk}) {
    if (s == to_string(k)) return k;
  }
  raise(Errc::ParseError, "unknown kernel kind '" + s + "'");
}

KernelMode default_mode(const ActivationSpec& a) {
  return a.kind == ActivationKind::Sign ? KernelMode::SignLimit : KernelMode::ClosedForm;
}

KernelMode parse_mode(const std::string& s, const ActivationSpec& a) {
  if (s == "auto") return default_mode(a);
  for (KernelMode m : {KernelMode::ClosedForm, KernelMode::Quadrature, KernelMode::SignLimit}) {
    if (s == to_string(m)) return m;
  }
  raise(Errc::ParseError, "unknown kernel mode '" + s + "'");
}

std::optional<SurrogateSpec> optional_surrogate(const std::string& s) {
  if (s.empty() || s == "none") return std::nullopt;
  return parse_surrogate(s);
}

/// Numeric CSV with a header row.
std::vector<std::vector<double>> read_csv(const std::string& path, std::vector<std::string>* header) {
  std::ifstream in(path);
  if (!in) raise(Errc::InvalidArgument, "cannot open " + path);
  std::string line;
  std::vector<std::vector<double>> rows;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (first) {
      first = false;
      if (header) *header = cells;
      continue;
    }
    std::vector<double> row;
    for (const std::string& c : cells) {
      try {
        row.push_back(std::stod(c));
      } catch (const std::exception&) {
        raise(Errc::ParseError, path + ": bad number '" + c + "'");
      }
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

int run_kernel_table(const Globals& g, const std::string& kind, const std::string& act1, const std::string& act2,
                     const std::string& surrogate, const std::string& mode, std::size_t depth, double sigma_w,
                     double sigma_b, std::size_t points, std::size_t order, const std::string& out_path) {
  KernelSpec spec;
  spec.kind = parse_kind(kind);
  spec.depth = depth;
  spec.sigma_w = sigma_w;
  spec.sigma_b = sigma_b;
  spec.activation1 = parse_activation(act1);
  spec.activation2 = act2.empty() ? spec.activation1 : parse_activation(act2);
  if (auto s = optional_surrogate(surrogate)) spec.surrogate2 = *s;
  spec.mode = parse_mode(mode, spec.activation1);
  spec.order = order;
  const std::vector<double> angles = angle_grid(points);
  const KernelMatrix k = analytic_gram(spec, Points{{1.0, 0.0}}, circle_points(angles), g.threads);

  std::ofstream file;
  std::ostream* out = &std::cout;
  if (out_path != "-") {
    const std::string path = out_path.empty() ? g.out_dir + "/kernel_table.csv" : out_path;
    std::filesystem::create_directories(std::filesystem::path(path).parent_path().empty()
                                            ? std::filesystem::path(".")
                                            : std::filesystem::path(path).parent_path());
    file.open(path);
    if (!file) raise(Errc::InvalidArgument, "cannot write " + path);
    out = &file;
  }
  *out << "angle,value\n";
  for (std::size_t i = 0; i < angles.size(); ++i) {
    *out << format_real(angles[i]) << ',' << (k.is_divergent(0, i) ? "DIV" : format_real(k.values(0, i))) << '\n';
  }
  return 0;
}

int run_gp_predict(const Globals& g, const std::string& kind, const std::string& activation, const std::string& surrogate,
                   std::size_t depth, double sigma_w, double sigma_b, const std::string& train_csv,
                   const std::string& test_csv, const std::string& time, double eta, double kappa,
                   const std::string& out_path) {
  const ActivationSpec act = parse_activation(activation);
  const KernelMode mode = default_mode(act);
  KernelSpec spec;
  if (kind == "ntk") {
    spec = KernelSpec::ntk(depth, act, mode);
  } else if (kind == "sgntk") {
    const auto s = optional_surrogate(surrogate);
    if (!s) raise(Errc::MissingSurrogate, "--kernel sgntk needs --surrogate");
    spec = KernelSpec::sg_ntk(depth, act, *s, mode);
  } else if (kind == "nngp") {
    spec = KernelSpec::nngp(depth, act, mode);
  } else {
    raise(Errc::ParseError, "--kernel must be ntk, sgntk or nngp");
  }
  spec.sigma_w = sigma_w;
  spec.sigma_b = sigma_b;

  std::vector<std::string> header;
  const auto train_rows = read_csv(train_csv, &header);
  if (train_rows.empty() || train_rows.front().size() < 2) raise(Errc::InvalidArgument, "train CSV needs inputs and a target");
  Dataset data;
  for (const auto& row : train_rows) {
    data.inputs.emplace_back(row.begin(), row.end() - 1);
    data.targets.push_back({row.back()});
  }
  std::vector<std::string> test_header;
  const Points test = read_csv(test_csv, &test_header);
  std::optional<double> t;
  if (time != "inf") t = std::stod(time);

  const GPPosterior gp(spec, data, t, eta, kappa, g.threads);
  const Matrix mean = gp.mean(test);
  const std::vector<double> var = gp.variance(test);

  const std::string path = out_path.empty() ? g.out_dir + "/gp_predict.csv" : out_path;
  if (std::filesystem::path(path).has_parent_path()) std::filesystem::create_directories(std::filesystem::path(path).parent_path());
  std::ofstream out(path);
  if (!out) raise(Errc::InvalidArgument, "cannot write " + path);
  for (std::size_t c = 0; c < data.inputs.front().size(); ++c) out << "x" << c << ',';
  out << "mean,std\n";
  for (std::size_t p = 0; p < test.size(); ++p) {
    for (double v : test[p]) out << format_real(v) << ',';
    out << format_real(mean(p, 0)) << ',' << format_real(std::sqrt(std::max(var[p], 0.0))) << '\n';
  }
  std::cout << "wrote " << test.size() << " predictions to " << path << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Neural tangent kernels and surrogate-gradient NTKs"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--seed", g.seed, "Root seed")->capture_default_str();
  app.add_option("--out-dir", g.out_dir, "Output directory")->capture_default_str();
  app.add_flag("--paper-scale", g.paper_scale, "Use the full experiment sizes");
  app.add_option("--threads", g.threads, "Worker threads (0 = all cores)")->capture_default_str();
  const bool json_config = [&] {
    for (int i = 1; i + 1 < argc; ++i)
      if (std::string(argv[i]) == "--config") return std::string(argv[i + 1]).ends_with(".json");
    for (int i = 1; i < argc; ++i)
      if (std::string(argv[i]).starts_with("--config=")) return std::string(argv[i]).ends_with(".json");
    return false;
  }();
  if (json_config) app.config_formatter(std::make_shared<ConfigJson>());
  app.set_config("--config", "", "JSON or TOML file with option values")->check(CLI::ExistingFile);

  // kernel-table
  auto* kt = app.add_subcommand("kernel-table", "Analytic kernel over an angle grid on the circle");
  std::string kt_kind = "ntk", kt_act = "erf:m=2", kt_act2, kt_sur, kt_mode = "auto", kt_out;
  std::size_t kt_depth = 3, kt_points = 128, kt_order = 64;
  double kt_sw = 1.0, kt_sb = 0.1;
  kt->add_option("--kernel", kt_kind, "nngp | nngp-dot | ntk | cross-nngp | surrogate-sigma | sgntk")->capture_default_str();
  kt->add_option("--activation", kt_act, "erf:m=<float> | sign")->capture_default_str();
  kt->add_option("--activation2", kt_act2, "Second activation for cross kernels");
  kt->add_option("--surrogate", kt_sur, "derf | rect:w=<float> | sech2:b=<float>");
  kt->add_option("--mode", kt_mode, "auto | closed-form | quadrature | sign-limit")->capture_default_str();
  kt->add_option("--depth", kt_depth)->capture_default_str();
  kt->add_option("--sigma-w", kt_sw)->capture_default_str();
  kt->add_option("--sigma-b", kt_sb)->capture_default_str();
  kt->add_option("--points", kt_points, "Angle grid size")->capture_default_str();
  kt->add_option("--order", kt_order, "Gauss-Hermite order")->capture_default_str();
  kt->add_option("--out", kt_out, "CSV path, '-' for stdout");

  // train-ensemble
  auto* te = app.add_subcommand("train-ensemble", "Train independently initialized networks");
  EnsembleConfig ec;
  std::string te_act = "sign", te_sur = "derf", te_out;
  ec.count = 20;
  ec.steps = 2000;
  te->add_option("--width", ec.width)->capture_default_str();
  te->add_option("--depth", ec.depth)->capture_default_str();
  te->add_option("--activation", te_act)->capture_default_str();
  te->add_option("--surrogate", te_sur, "Surrogate derivative for SGL, 'none' for gradient descent")->capture_default_str();
  te->add_option("--eta", ec.eta)->capture_default_str();
  te->add_option("--steps", ec.steps)->capture_default_str();
  te->add_option("--count", ec.count)->capture_default_str();
  te->add_option("--kappa", ec.kappa)->capture_default_str();
  te->add_option("--loss-scale", ec.loss_scale)->capture_default_str();
  te->add_option("--test-points", ec.test_points)->capture_default_str();
  te->add_option("--out", te_out, "Output directory (default <out-dir>/ensemble)");

  // gp-predict
  auto* gp = app.add_subcommand("gp-predict", "Infinite-width posterior mean and std");
  std::string gp_kind = "ntk", gp_act = "erf:m=2", gp_sur, gp_train, gp_test, gp_t = "inf", gp_out;
  std::size_t gp_depth = 3;
  double gp_sw = 1.0, gp_sb = 0.1, gp_eta = 0.1, gp_kappa = 1.0;
  gp->add_option("--kernel", gp_kind, "ntk | sgntk | nngp")->capture_default_str();
  gp->add_option("--mode", gp_act, "Activation: erf:m=<float> | sign")->capture_default_str();
  gp->add_option("--surrogate", gp_sur);
  gp->add_option("--depth", gp_depth)->capture_default_str();
  gp->add_option("--sigma-w", gp_sw)->capture_default_str();
  gp->add_option("--sigma-b", gp_sb)->capture_default_str();
  gp->add_option("--train-csv", gp_train, "Header row, input columns, target last")->required();
  gp->add_option("--test-csv", gp_test, "Header row, input columns")->required();
  gp->add_option("--t", gp_t, "Training time or 'inf'")->capture_default_str();
  gp->add_option("--eta", gp_eta)->capture_default_str();
  gp->add_option("--kappa", gp_kappa)->capture_default_str();
  gp->add_option("--out", gp_out);

  // figures
  ConvergenceConfig cc;
  std::vector<std::size_t> widths;
  std::optional<std::size_t> fig_seeds, fig_steps;
  auto add_convergence = [&](CLI::App* sub) {
    sub->add_option("--widths", widths, "Hidden widths")->delimiter(',');
    sub->add_option("--seeds", fig_seeds, "Networks per (width, m)");
    sub->add_option("--steps", fig_steps, "Training steps");
    sub->add_option("--m", cc.m_values, "erf scales")->delimiter(',');
    sub->add_option("--grid", cc.grid)->capture_default_str();
    sub->add_option("--loss-scale", cc.loss_scale, "0 = number of training points")->capture_default_str();
  };
  auto* f1 = app.add_subcommand("fig1", "NTK convergence curves and MSEs");
  add_convergence(f1);
  auto* f2 = app.add_subcommand("fig2", "SG-NTK convergence curves and MSEs");
  add_convergence(f2);
  std::string f2_sur = "derf";
  f2->add_option("--surrogate", f2_sur)->capture_default_str();

  auto* f3 = app.add_subcommand("fig3", "SGL-trained sign networks vs the SG-NTK GP");
  std::optional<std::size_t> f3_width, f3_count, f3_steps;
  double f3_kappa = 1.0;
  std::size_t f3_points = 256;
  f3->add_option("--width", f3_width);
  f3->add_option("--count", f3_count);
  f3->add_option("--steps", f3_steps);
  f3->add_option("--kappa", f3_kappa)->capture_default_str();
  f3->add_option("--test-points", f3_points)->capture_default_str();

  auto* val = app.add_subcommand("validate", "Run the oracle suite");
  std::size_t val_samples = 1000000;
  val->add_option("--mc-samples", val_samples)->capture_default_str();

  CLI11_PARSE(app, argc, argv);
  if (auto* opt = app.get_config_ptr(); opt && opt->count() > 0) g.config_path = opt->as<std::string>();

  try {
    if (*kt) {
      return run_kernel_table(g, kt_kind, kt_act, kt_act2, kt_sur, kt_mode, kt_depth, kt_sw, kt_sb, kt_points, kt_order,
                              kt_out);
    }
    if (*gp) {
      return run_gp_predict(g, gp_kind, gp_act, gp_sur, gp_depth, gp_sw, gp_sb, gp_train, gp_test, gp_t, gp_eta,
                            gp_kappa, gp_out);
    }
    if (*te) {
      ec.activation = parse_activation(te_act);
      ec.surrogate = optional_surrogate(te_sur);
      ec.seed = g.seed;
      ec.threads = g.threads;
      ExperimentReport report = run_train_ensemble(ec);
      finish(report, g, te_out.empty() ? g.out_dir + "/ensemble" : te_out);
      return 0;
    }
    if (*f1 || *f2) {
      ConvergenceConfig c = g.paper_scale ? ConvergenceConfig::paper_scale() : ConvergenceConfig{};
      c.m_values = cc.m_values;
      c.grid = cc.grid;
      c.loss_scale = cc.loss_scale;
      if (!widths.empty()) c.widths = widths;
      if (fig_seeds) c.seeds = *fig_seeds;
      if (fig_steps) c.steps = *fig_steps;
      c.seed = g.seed;
      c.threads = g.threads;
      ExperimentReport report = *f1 ? run_fig1(c) : run_fig2(c, optional_surrogate(f2_sur));
      report.metadata["paper_scale"] = g.paper_scale;
      finish(report, g, g.out_dir + (*f1 ? "/fig1" : "/fig2"));
      return 0;
    }
    if (*f3) {
      EnsembleConfig c = g.paper_scale ? EnsembleConfig::paper_scale() : EnsembleConfig{};
      if (f3_width) c.width = *f3_width;
      if (f3_count) c.count = *f3_count;
      if (f3_steps) c.steps = *f3_steps;
      c.kappa = f3_kappa;
      c.test_points = f3_points;
      c.seed = g.seed;
      c.threads = g.threads;
      ExperimentReport report = run_fig3(c);
      report.metadata["paper_scale"] = g.paper_scale;
      finish(report, g, g.out_dir + "/fig3");
      return 0;
    }
    if (*val) {
      ValidateOptions o;
      o.seed = g.seed;
      o.monte_carlo_samples = val_samples;
      const ValidationReport r = validate(o);
      for (const ValidationCheck& c : r.checks) {
        std::cout << (c.passed ? "PASS " : "FAIL ") << c.name << ": " << c.detail << "\n";
      }
      return r.passed() ? 0 : 1;
    }
  } catch (const sgntk::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
