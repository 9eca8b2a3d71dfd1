#include <CLI11.hpp>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <string>

#include "ddlab/errors.hpp"
#include "ddlab/experiments.hpp"
#include "ddlab/gd_linear.hpp"
#include "ddlab/grid.hpp"
#include "ddlab/jacobian_split.hpp"
#include "ddlab/linear_model.hpp"
#include "ddlab/ntk_kernels.hpp"
#include "ddlab/rng.hpp"
#include "ddlab/stepsize_opt.hpp"
#include "ddlab/two_layer.hpp"

namespace {

using ddlab::ConfigError;

nlohmann::json load_json(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open file: " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

double require_number(const nlohmann::json& doc, const std::string& key) {
  if (!doc.contains(key)) throw ConfigError("missing key '" + key + "'");
  if (!doc[key].is_number()) throw ConfigError("key '" + key + "' must be a number");
  return doc[key].get<double>();
}

double number_or(const nlohmann::json& doc, const std::string& key, double fallback) {
  return doc.contains(key) ? require_number(doc, key) : fallback;
}

Eigen::VectorXd require_vector(const nlohmann::json& doc, const std::string& key) {
  if (!doc.contains(key) || !doc[key].is_array())
    throw ConfigError("missing array key '" + key + "'");
  Eigen::VectorXd out(doc[key].size());
  Eigen::Index i = 0;
  for (const auto& v : doc[key]) {
    if (!v.is_number()) throw ConfigError("key '" + key + "' must hold numbers");
    out[i++] = v.get<double>();
  }
  return out;
}

ddlab::LinearModelSpec load_spec(const std::filesystem::path& path) {
  const nlohmann::json doc = load_json(path);
  ddlab::LinearModelSpec spec;
  spec.feature_stds = require_vector(doc, "feature_stds");
  spec.theta_star = require_vector(doc, "theta_star");
  spec.noise_std = number_or(doc, "noise_std", 0.0);
  if (doc.contains("d") &&
      std::llround(require_number(doc, "d")) != spec.feature_stds.size())
    throw ConfigError("key 'd' does not match the length of feature_stds");
  spec.validate();
  return spec;
}

// Shared state filled by CLI11 options.
struct CommonArgs {
  std::uint64_t seed = 0;
  std::string out = "out";
  std::string config_path;
  std::string format = "csv";
};

ddlab::ExperimentConfig build_experiment_config(const CommonArgs& args,
                                                const std::string& name,
                                                bool seed_given, bool out_given) {
  ddlab::ExperimentConfig config;
  if (!args.config_path.empty())
    config = ddlab::parse_experiment_config(load_json(args.config_path));
  config.name = name;
  if (seed_given || args.config_path.empty()) config.seed = args.seed;
  if (out_given || args.config_path.empty()) config.out_dir = args.out;
  if (config.out_dir.empty()) config.out_dir = args.out;
  return config;
}

Eigen::MatrixXd sample_unit_rows(Eigen::Index n, Eigen::Index d, std::uint64_t seed) {
  ddlab::Rng rng(seed);
  Eigen::MatrixXd x(n, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) x(i, j) = rng.next_gaussian();
    x.row(i) /= x.row(i).norm();
  }
  return x;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "ddlab: risk dynamics of early-stopped gradient descent, double-descent\n"
      "detection and elimination, and two-layer network spectral analysis.\n"
      "All randomness is derived from --seed; outputs land under --out."};
  app.require_subcommand(1);

  CommonArgs args;

  auto add_common = [&](CLI::App* sub, bool with_config) {
    sub->add_option("--seed", args.seed,
                    "64-bit seed; fully determines stochastic output (default 0)");
    sub->add_option("--out", args.out, "output directory (default ./out)");
    sub->add_option("--format", args.format, "output format (csv only)")
        ->check(CLI::IsMember({"csv"}));
    if (with_config)
      sub->add_option("--config", args.config_path,
                      "JSON config {name, seed, out_dir, overrides}; explicit "
                      "flags win over the file");
    return sub;
  };

  auto run_named = [&](CLI::App* sub, const std::string& name) {
    ddlab::run_experiment(build_experiment_config(
        args, name, sub->count("--seed") > 0, sub->count("--out") > 0));
  };

  // --- experiment reproductions ---------------------------------------
  CLI::App* fig2 = add_common(
      app.add_subcommand("fig2",
                         "Two-feature U-curve superposition and its alignment; "
                         "fixed values from the reproduced setup, noise_over_n "
                         "is an artifact default (0.1)"),
      true);
  fig2->callback([&] { run_named(fig2, "fig2"); });

  CLI::App* fig3 = add_common(
      app.add_subcommand("fig3",
                         "Two-layer network risk curves under shared vs per-layer "
                         "stepsizes (8e-5 / 1e-6 fixed); dimensions are artifact "
                         "defaults, see report.txt"),
      true);
  fig3->callback([&] { run_named(fig3, "fig3"); });

  CLI::App* appa = add_common(
      app.add_subcommand("appendix-a",
                         "Monte-Carlo risk vs the closed form at n=5d and n=10d "
                         "(100 replicates fixed); noise_std=1 and eta=0.1 are "
                         "artifact defaults"),
      true);
  double scale = -1.0;
  appa->add_option("--scale", scale,
                   "shrink d = 700*scale to a multiple of 7 (default 0.1 -> d=70)");
  appa->callback([&] {
    ddlab::ExperimentConfig config = build_experiment_config(
        args, "appendix_a", appa->count("--seed") > 0, appa->count("--out") > 0);
    if (appa->count("--scale") > 0) config.overrides["scale"] = scale;
    ddlab::run_experiment(config);
  });

  // --- primitive operations -------------------------------------------
  std::string spec_path, etas_path;
  long n_value = 1000;
  long t_max = 10000;
  double t_target = 1.0;

  CLI::App* risk_curve = add_common(
      app.add_subcommand("risk-curve",
                         "Closed-form risk curve (risk = noise^2 + bias + "
                         "variance) on a log grid; writes risk_curve.csv"),
      false);
  risk_curve->add_option("--spec", spec_path, "model JSON {feature_stds, theta_star, noise_std}")
      ->required();
  risk_curve->add_option("--etas", etas_path, "schedule JSON {etas}")->required();
  risk_curve->add_option("--n", n_value, "training-set size entering the noise ratio")
      ->required();
  risk_curve->add_option("--t-max", t_max, "iteration horizon (default 10000)");
  risk_curve->callback([&] {
    const ddlab::LinearModelSpec spec = load_spec(spec_path);
    const ddlab::StepsizeSchedule schedule{require_vector(load_json(etas_path), "etas")};
    const std::vector<long> pts = ddlab::log_grid(t_max);
    const ddlab::RiskCurve curve = ddlab::risk_expression(spec, schedule, n_value, pts);
    std::filesystem::create_directories(args.out);
    ddlab::csv::write_file(std::filesystem::path(args.out) / "risk_curve.csv",
                           ddlab::to_table(curve));
  });

  CLI::App* opt = add_common(
      app.add_subcommand("optimal-stepsizes",
                         "Stepsizes aligning all per-feature risk minima at "
                         "--t-target; writes stepsizes.csv"),
      false);
  opt->add_option("--spec", spec_path, "model JSON")->required();
  opt->add_option("--n", n_value, "training-set size entering the noise ratio")
      ->required();
  opt->add_option("--t-target", t_target, "target early-stopping iteration (> 0)")
      ->required();
  opt->callback([&] {
    const ddlab::LinearModelSpec spec = load_spec(spec_path);
    const ddlab::StepsizeSchedule schedule =
        ddlab::optimal_stepsizes(spec, n_value, t_target);
    ddlab::csv::Table t;
    t.header = {"i", "eta"};
    for (Eigen::Index i = 0; i < schedule.etas.size(); ++i)
      t.rows.push_back({ddlab::csv::format(static_cast<long>(i + 1)),
                        ddlab::csv::format(schedule.etas[i])});
    std::filesystem::create_directories(args.out);
    ddlab::csv::write_file(std::filesystem::path(args.out) / "stepsizes.csv", t);
  });

  CLI::App* train_cmd = add_common(
      app.add_subcommand("train-two-layer",
                         "Train the width-k ReLU network on linear-model data; "
                         "config keys d,k,omega,nu,eta_w,eta_v,t_max,n_train,"
                         "n_test,decay,theta_coef,noise_std (artifact defaults "
                         "mirror fig3); writes train_log.csv"),
      true);
  train_cmd->callback([&] {
    const nlohmann::json doc =
        args.config_path.empty() ? nlohmann::json::object() : load_json(args.config_path);
    const auto d = static_cast<Eigen::Index>(number_or(doc, "d", 10));
    const auto k = static_cast<Eigen::Index>(number_or(doc, "k", 2048));
    const double decay = number_or(doc, "decay", 0.8);
    ddlab::LinearModelSpec spec;
    spec.feature_stds.resize(d);
    for (Eigen::Index i = 0; i < d; ++i) spec.feature_stds[i] = std::pow(decay, i);
    spec.theta_star = Eigen::VectorXd::Constant(d, number_or(doc, "theta_coef", 1.0));
    spec.noise_std = number_or(doc, "noise_std", 0.0);

    const ddlab::Rng master(args.seed);
    const ddlab::RawSample train_set = ddlab::sample_raw(
        spec, static_cast<Eigen::Index>(number_or(doc, "n_train", 100)),
        master.split(0).key());
    const ddlab::RawSample test_raw = ddlab::sample_raw(
        spec, static_cast<Eigen::Index>(number_or(doc, "n_test", 1000)),
        master.split(1).key());
    const ddlab::TestSet test_set{test_raw.x, test_raw.y};
    const ddlab::TwoLayerParams init =
        ddlab::init_params(d, k, number_or(doc, "omega", 1.0),
                           number_or(doc, "nu", 1.0), master.split(2).key());
    const std::vector<long> pts = ddlab::log_grid(
        std::llround(number_or(doc, "t_max", 1e5)), 40, /*include_zero=*/true);
    const ddlab::TrainLog log =
        ddlab::train(init, train_set.x, train_set.y, number_or(doc, "eta_w", 8e-5),
                     number_or(doc, "eta_v", 8e-5), pts, &test_set);
    std::filesystem::create_directories(args.out);
    ddlab::csv::write_file(std::filesystem::path(args.out) / "train_log.csv",
                           ddlab::to_table(log));
  });

  CLI::App* gram_cmd = add_common(
      app.add_subcommand("gram",
                         "Analytic Gram matrix of seeded unit-norm points and its "
                         "spectrum (projections against y from the config, ones "
                         "by default); config keys n,d,omega,nu,y; writes "
                         "gram.csv and spectrum.csv"),
      true);
  gram_cmd->callback([&] {
    const nlohmann::json doc =
        args.config_path.empty() ? nlohmann::json::object() : load_json(args.config_path);
    const auto n = static_cast<Eigen::Index>(number_or(doc, "n", 8));
    const auto d = static_cast<Eigen::Index>(number_or(doc, "d", 10));
    const Eigen::MatrixXd x = sample_unit_rows(n, d, args.seed);
    const Eigen::MatrixXd gram =
        ddlab::gram_matrix(x, number_or(doc, "omega", 1.0), number_or(doc, "nu", 1.0));
    const Eigen::VectorXd y =
        doc.contains("y") ? require_vector(doc, "y") : Eigen::VectorXd::Ones(n);
    const ddlab::GramSpectrum spec = ddlab::spectrum(gram, y);
    std::filesystem::create_directories(args.out);
    ddlab::csv::write_file(std::filesystem::path(args.out) / "gram.csv",
                           ddlab::gram_table(gram));
    ddlab::csv::write_file(std::filesystem::path(args.out) / "spectrum.csv",
                           ddlab::spectrum_table(spec));
  });

  CLI::App* split_cmd = add_common(
      app.add_subcommand("jacobian-split",
                         "Layer attribution of the init-Jacobian singular vectors "
                         "on seeded gaussian inputs; config keys n,d,k,omega,nu; "
                         "writes split.csv"),
      true);
  split_cmd->callback([&] {
    const nlohmann::json doc =
        args.config_path.empty() ? nlohmann::json::object() : load_json(args.config_path);
    const auto n = static_cast<Eigen::Index>(number_or(doc, "n", 50));
    const auto d = static_cast<Eigen::Index>(number_or(doc, "d", 10));
    const auto k = static_cast<Eigen::Index>(number_or(doc, "k", 512));
    ddlab::Rng rng(args.seed);
    Eigen::MatrixXd x(n, d);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < d; ++j) x(i, j) = rng.next_gaussian();
    const ddlab::TwoLayerParams params = ddlab::init_params(
        d, k, number_or(doc, "omega", 1.0), number_or(doc, "nu", 1.0),
        ddlab::Rng(args.seed).split(1).key());
    const ddlab::JacobianSplit split =
        ddlab::layer_split_svd(ddlab::jacobian(params, x), d, k);
    std::filesystem::create_directories(args.out);
    ddlab::csv::write_file(std::filesystem::path(args.out) / "split.csv",
                           ddlab::to_table(split));
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const ddlab::NumericalError& e) {
    std::fprintf(stderr, "numerical error: %s\n", e.what());
    return 2;
  } catch (const ddlab::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
