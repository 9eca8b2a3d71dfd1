#include "ddlab/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

#include "ddlab/errors.hpp"
#include "ddlab/gd_linear.hpp"
#include "ddlab/grid.hpp"
#include "ddlab/jacobian_split.hpp"
#include "ddlab/linear_model.hpp"
#include "ddlab/rng.hpp"
#include "ddlab/stepsize_opt.hpp"
#include "ddlab/two_layer.hpp"

namespace ddlab {

namespace {

// One experiment knob: a value, whether it came with the experiment
// definition (fixed), is an overridable artifact default, or is computed
// (derived). report.txt lists all of them.
struct Knob {
  double value = 0.0;
  const char* origin = "default";
};

class KnobSet {
public:
  void define(const std::string& key, double value, const char* origin) {
    knobs_[key] = Knob{value, origin};
    order_.push_back(key);
  }

  void apply_overrides(const nlohmann::json& overrides) {
    for (const auto& [key, value] : overrides.items()) {
      auto it = knobs_.find(key);
      if (it == knobs_.end())
        throw ConfigError("overrides: unknown key '" + key + "'");
      if (!value.is_number())
        throw ConfigError("overrides: key '" + key + "' must be a number");
      it->second.value = value.get<double>();
      it->second.origin = "override";
    }
  }

  double get(const std::string& key) const { return knobs_.at(key).value; }
  long get_long(const std::string& key) const {
    return std::llround(knobs_.at(key).value);
  }

  void describe(std::ostream& out) const {
    for (const auto& key : order_) {
      const Knob& k = knobs_.at(key);
      out << key << " = " << csv::format(k.value) << "  [" << k.origin << "]\n";
    }
  }

private:
  std::map<std::string, Knob> knobs_;
  std::vector<std::string> order_;
};

void write_table(const std::filesystem::path& dir, const std::string& name,
                 const csv::Table& table) {
  csv::write_file(dir / name, table);
}

csv::Table u_table(std::span<const long> pts, const Eigen::VectorXd& values) {
  csv::Table t;
  t.header = {"t", "u"};
  for (std::size_t i = 0; i < pts.size(); ++i)
    t.rows.push_back({csv::format(pts[i]),
                      csv::format(values[static_cast<Eigen::Index>(i)])});
  return t;
}

void describe_report(std::ostream& out, const std::string& label,
                     const DoubleDescentReport& report) {
  out << label << ": double_descent=" << (report.is_double_descent ? "true" : "false");
  out << "; minima:";
  for (const auto& m : report.minima)
    out << " (t=" << m.t << ", value=" << csv::format(m.value) << ")";
  if (!report.minima.empty())
    out << "; global_min=(t=" << report.global_min.t
        << ", value=" << csv::format(report.global_min.value) << ")";
  out << "\n";
}

std::string scale_tag(double x) {
  std::string s = csv::format(x);
  s.erase(std::remove(s.begin(), s.end(), '.'), s.end());
  return s;
}

}  // namespace

ExperimentConfig parse_experiment_config(const nlohmann::json& doc) {
  if (!doc.is_object()) throw ConfigError("config: document must be a JSON object");
  ExperimentConfig config;
  for (const auto& [key, value] : doc.items()) {
    if (key == "name") {
      config.name = value.get<std::string>();
    } else if (key == "seed") {
      config.seed = value.get<std::uint64_t>();
    } else if (key == "out_dir") {
      config.out_dir = value.get<std::string>();
    } else if (key == "overrides") {
      if (!value.is_object())
        throw ConfigError("overrides: must be a JSON object");
      config.overrides = value;
    } else {
      throw ConfigError("config: unknown key '" + key + "'");
    }
  }
  return config;
}

void run_fig2(const ExperimentConfig& config) {
  KnobSet knobs;
  knobs.define("theta1", 1.5, "fixed");
  knobs.define("sigma1", 1.0, "fixed");
  knobs.define("eta1", 0.05, "fixed");
  knobs.define("theta2", 10.0, "fixed");
  knobs.define("sigma2", 0.15, "fixed");
  knobs.define("eta2", 0.05, "fixed");
  // With the fixed curve parameters, a sum with two separated minima only
  // exists for noise ratios near the per-feature signal strength 2.25; the
  // reproduced plot matches ratio 2.0 up to an overall y-scale.
  knobs.define("noise_over_n", 2.0, "default");
  knobs.define("t_max", 1e4, "default");
  knobs.define("per_decade", 40, "default");
  knobs.define("window", 5, "default");
  knobs.define("prominence", 0.05, "default");
  knobs.apply_overrides(config.overrides);

  const double ratio = knobs.get("noise_over_n");
  const int window = static_cast<int>(knobs.get_long("window"));
  const double prominence = knobs.get("prominence");
  const std::vector<long> pts =
      log_grid(knobs.get_long("t_max"), static_cast<int>(knobs.get_long("per_decade")));

  Eigen::VectorXd sigmas(2), thetas(2), etas(2);
  sigmas << knobs.get("sigma1"), knobs.get("sigma2");
  thetas << knobs.get("theta1"), knobs.get("theta2");
  etas << knobs.get("eta1"), knobs.get("eta2");

  auto u_values = [&](int i, double eta) {
    Eigen::VectorXd out(static_cast<Eigen::Index>(pts.size()));
    for (std::size_t j = 0; j < pts.size(); ++j)
      out[static_cast<Eigen::Index>(j)] =
          u_term(sigmas[i], thetas[i], eta, ratio, static_cast<double>(pts[j]));
    return out;
  };

  const Eigen::VectorXd u1 = u_values(0, etas[0]);
  const Eigen::VectorXd u2 = u_values(1, etas[1]);

  // Align the second tradeoff at the grid argmin of the first one.
  Eigen::Index argmin1 = 0;
  u1.minCoeff(&argmin1);
  const double t_target = static_cast<double>(pts[static_cast<std::size_t>(argmin1)]);
  const double eta2_aligned =
      optimal_stepsize_from_ratio(sigmas[1], thetas[1], ratio, t_target);
  const Eigen::VectorXd u2_aligned = u_values(1, eta2_aligned);

  const RiskCurve sum = risk_curve_from_ratio(sigmas, thetas, etas, ratio, 0.0, pts);
  Eigen::VectorXd etas_aligned(2);
  etas_aligned << etas[0], eta2_aligned;
  const RiskCurve sum_aligned =
      risk_curve_from_ratio(sigmas, thetas, etas_aligned, ratio, 0.0, pts);

  const DoubleDescentReport report_sum = detect_double_descent(sum, window, prominence);
  const DoubleDescentReport report_aligned =
      detect_double_descent(sum_aligned, window, prominence);

  std::filesystem::create_directories(config.out_dir);
  write_table(config.out_dir, "u1.csv", u_table(pts, u1));
  write_table(config.out_dir, "u2.csv", u_table(pts, u2));
  write_table(config.out_dir, "u2_aligned.csv", u_table(pts, u2_aligned));
  write_table(config.out_dir, "sum.csv", to_table(sum));
  write_table(config.out_dir, "sum_aligned.csv", to_table(sum_aligned));

  std::ofstream report(config.out_dir / "report.txt", std::ios::binary);
  report << "# fig2 configuration\n";
  report << "seed = " << config.seed << "  [fixed]\n";
  knobs.describe(report);
  report << "t_target = " << csv::format(t_target) << "  [derived]\n";
  report << "eta2_aligned = " << csv::format(eta2_aligned) << "  [derived]\n";
  report << "\n# results\n";
  describe_report(report, "sum", report_sum);
  describe_report(report, "sum_aligned", report_aligned);
}

void run_fig3(const ExperimentConfig& config) {
  KnobSet knobs;
  knobs.define("d", 10, "default");
  knobs.define("decay", 0.8, "default");
  knobs.define("theta_coef", 1.0, "default");
  knobs.define("noise_std", 0.0, "fixed");
  knobs.define("n_train", 100, "default");
  knobs.define("n_test", 1000, "default");
  knobs.define("k", 2048, "default");
  knobs.define("eta", 8e-5, "fixed");
  knobs.define("eta_v_small", 1e-6, "fixed");
  knobs.define("t_max", 1e5, "default");
  knobs.define("per_decade", 40, "default");
  knobs.define("window", 5, "default");
  knobs.define("prominence", 0.05, "default");
  knobs.apply_overrides(config.overrides);

  const Eigen::Index d = knobs.get_long("d");
  const Eigen::Index k = knobs.get_long("k");
  const double decay = knobs.get("decay");
  const double eta = knobs.get("eta");
  const double eta_v_small = knobs.get("eta_v_small");
  const int window = static_cast<int>(knobs.get_long("window"));
  const double prominence = knobs.get("prominence");

  LinearModelSpec spec;
  spec.feature_stds.resize(d);
  for (Eigen::Index i = 0; i < d; ++i) spec.feature_stds[i] = std::pow(decay, i);
  spec.theta_star = Eigen::VectorXd::Constant(d, knobs.get("theta_coef"));
  spec.noise_std = knobs.get("noise_std");

  const Rng master(config.seed);
  const RawSample train_set =
      sample_raw(spec, knobs.get_long("n_train"), master.split(0).key());
  const RawSample test_raw =
      sample_raw(spec, knobs.get_long("n_test"), master.split(1).key());
  const TestSet test_set{test_raw.x, test_raw.y};

  std::vector<long> pts = log_grid(knobs.get_long("t_max"),
                                   static_cast<int>(knobs.get_long("per_decade")),
                                   /*include_zero=*/true);

  std::filesystem::create_directories(config.out_dir);
  std::ostringstream results;

  const std::vector<std::pair<double, double>> pairs = {
      {0.01, 1.0}, {1.0, 1.0}, {1.0, 0.01}};
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    const auto [omega, nu] = pairs[p];
    const std::string tag = "w" + scale_tag(omega) + "_v" + scale_tag(nu);
    const TwoLayerParams init =
        init_params(d, k, omega, nu, master.split(2 + p).key());

    const TrainLog log_same =
        train(init, train_set.x, train_set.y, eta, eta, pts, &test_set);
    const TrainLog log_diff =
        train(init, train_set.x, train_set.y, eta, eta_v_small, pts, &test_set);

    const JacobianSplit split = layer_split_svd(jacobian(init, train_set.x), d, k);

    write_table(config.out_dir, "risk_same_" + tag + ".csv", to_table(log_same));
    write_table(config.out_dir, "risk_diff_" + tag + ".csv", to_table(log_diff));
    if (omega == 1.0 && nu == 1.0) {
      write_table(config.out_dir, "risk_same.csv", to_table(log_same));
      write_table(config.out_dir, "risk_diff.csv", to_table(log_diff));
    }
    write_table(config.out_dir, "jac_split_" + tag + ".csv", to_table(split));

    // Detect on the test MSE from t >= 1 (log axis).
    auto detect_log = [&](const TrainLog& log) {
      std::vector<long> t1(log.record_points.begin() + 1, log.record_points.end());
      std::vector<double> v1(log.test_mse.begin() + 1, log.test_mse.end());
      return detect_double_descent(t1, v1, window, prominence);
    };
    describe_report(results, tag + " same_stepsize", detect_log(log_same));
    describe_report(results, tag + " diff_stepsize", detect_log(log_diff));
    const double min_same =
        *std::min_element(log_same.test_mse.begin(), log_same.test_mse.end());
    const double min_diff =
        *std::min_element(log_diff.test_mse.begin(), log_diff.test_mse.end());
    results << tag << " min_test_mse same=" << csv::format(min_same)
            << " diff=" << csv::format(min_diff) << "\n";
  }

  std::ofstream report(config.out_dir / "report.txt", std::ios::binary);
  report << "# fig3 configuration\n";
  report << "seed = " << config.seed << "  [fixed]\n";
  knobs.describe(report);
  report << "init pairs (omega, nu) = (0.01,1), (1,1), (1,0.01)  [fixed]\n";
  report << "\n# results\n" << results.str();
}

void run_appendix_a(const ExperimentConfig& config) {
  KnobSet knobs;
  knobs.define("scale", 0.1, "default");
  knobs.define("sigma_big", 1.0, "fixed");
  knobs.define("theta_big", 1.0, "fixed");
  knobs.define("sigma_small", 0.1, "fixed");
  knobs.define("theta_small", 10.0, "fixed");
  knobs.define("noise_std", 1.0, "default");
  knobs.define("eta", 0.1, "default");
  knobs.define("replicates", 100, "fixed");
  knobs.define("t_max", 1e4, "default");
  knobs.define("per_decade", 40, "default");
  knobs.apply_overrides(config.overrides);

  // d = 700 * scale, rounded to a multiple of 7 so the 6/7 : 1/7 feature
  // split stays exact.
  const long d = std::max<long>(7, std::llround(700.0 * knobs.get("scale") / 7.0) * 7);
  const long d_big = 6 * d / 7;

  LinearModelSpec spec;
  spec.feature_stds.resize(d);
  spec.theta_star.resize(d);
  for (long i = 0; i < d; ++i) {
    spec.feature_stds[i] = i < d_big ? knobs.get("sigma_big") : knobs.get("sigma_small");
    spec.theta_star[i] = i < d_big ? knobs.get("theta_big") : knobs.get("theta_small");
  }
  spec.noise_std = knobs.get("noise_std");
  const StepsizeSchedule schedule = constant_schedule(d, knobs.get("eta"));

  const std::vector<long> pts = log_grid(knobs.get_long("t_max"),
                                         static_cast<int>(knobs.get_long("per_decade")),
                                         /*include_zero=*/true);

  std::filesystem::create_directories(config.out_dir);
  const Rng master(config.seed);
  std::ostringstream results;

  for (const long factor : {5L, 10L}) {
    const long n = factor * d;
    const RiskCurve mc =
        mc_risk(spec, schedule, n, pts, static_cast<int>(knobs.get_long("replicates")),
                master.split(static_cast<std::uint64_t>(factor)).key());
    const RiskCurve rbar = risk_expression(spec, schedule, n, pts);

    csv::Table t;
    t.header = {"t", "risk", "bias", "variance", "std", "rbar"};
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const auto j = static_cast<Eigen::Index>(i);
      t.rows.push_back({csv::format(pts[i]), csv::format(mc.risk[j]),
                        csv::format(mc.bias[j]), csv::format(mc.variance[j]),
                        csv::format(mc.std_dev[j]), csv::format(rbar.risk[j])});
    }
    write_table(config.out_dir, "risk_n" + std::to_string(factor) + "d.csv", t);

    const double max_gap = (mc.risk - rbar.risk).cwiseAbs().maxCoeff();
    const Eigen::Index last = mc.risk.size() - 1;
    results << "n=" << factor << "d: max_abs_gap=" << csv::format(max_gap)
            << " plateau_mc=" << csv::format(mc.risk[last])
            << " plateau_rbar=" << csv::format(rbar.risk[last]) << "\n";
  }

  std::ofstream report(config.out_dir / "report.txt", std::ios::binary);
  report << "# appendix_a configuration\n";
  report << "seed = " << config.seed << "  [fixed]\n";
  knobs.describe(report);
  report << "d = " << d << "  [derived]\n";
  report << "n = 5d and 10d  [fixed]\n";
  report << "\n# results\n" << results.str();
}

void run_experiment(const ExperimentConfig& config) {
  if (config.name == "fig2") {
    run_fig2(config);
  } else if (config.name == "fig3") {
    run_fig3(config);
  } else if (config.name == "appendix_a") {
    run_appendix_a(config);
  } else {
    throw ConfigError("name: unknown experiment '" + config.name + "'");
  }
}

}  // namespace ddlab
