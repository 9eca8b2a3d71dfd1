#include "ddlab/stepsize_opt.hpp"

#include <algorithm>
#include <cmath>

#include "ddlab/errors.hpp"

namespace ddlab {

csv::Table to_table(const DoubleDescentReport& report) {
  csv::Table t;
  t.header = {"t_min", "value"};
  for (const auto& m : report.minima)
    t.rows.push_back({csv::format(m.t), csv::format(m.value)});
  t.rows.push_back({report.is_double_descent ? "double_descent=true"
                                             : "double_descent=false"});
  return t;
}

double optimal_stepsize_from_ratio(double sigma, double theta, double noise_over_n,
                                   double t_target) {
  if (t_target <= 0.0) throw ConfigError("t_target: must be positive");
  const double s2 = sigma * sigma;
  const double signal = s2 * theta * theta;
  const double rho = noise_over_n <= 0.0 ? 0.0 : noise_over_n / (signal + noise_over_n);
  return (1.0 - std::pow(rho, 1.0 / t_target)) / s2;
}

double u_min_from_ratio(double sigma, double theta, double noise_over_n) {
  const double signal = sigma * sigma * theta * theta;
  const double denom = signal + noise_over_n;
  if (denom == 0.0) return 0.0;
  return noise_over_n * signal / denom;
}

StepsizeSchedule optimal_stepsizes(const LinearModelSpec& spec, Eigen::Index n,
                                   double t_target) {
  spec.validate();
  if (n < 1) throw ConfigError("n: must be at least 1");
  const double ratio = spec.noise_std * spec.noise_std / static_cast<double>(n);
  StepsizeSchedule schedule;
  schedule.etas.resize(spec.d());
  for (Eigen::Index i = 0; i < spec.d(); ++i)
    schedule.etas[i] = optimal_stepsize_from_ratio(spec.feature_stds[i],
                                                   spec.theta_star[i], ratio, t_target);
  return schedule;
}

double u_min_value(const LinearModelSpec& spec, Eigen::Index n,
                   Eigen::Index feature_index) {
  spec.validate();
  if (feature_index < 0 || feature_index >= spec.d())
    throw ConfigError("feature_index: out of range");
  if (n < 1) throw ConfigError("n: must be at least 1");
  return u_min_from_ratio(spec.feature_stds[feature_index],
                          spec.theta_star[feature_index],
                          spec.noise_std * spec.noise_std / static_cast<double>(n));
}

DoubleDescentReport detect_double_descent(std::span<const long> record_points,
                                          std::span<const double> values, int window,
                                          double prominence) {
  if (window < 1) throw ConfigError("window: must be positive");
  if (prominence <= 0.0) throw ConfigError("prominence: must be positive");
  const std::size_t n = values.size();
  if (record_points.size() != n)
    throw ConfigError("record_points: length does not match values");
  if (n < 2 * static_cast<std::size_t>(window) + 1)
    throw ConfigError("curve too short for the requested window");

  const double lo = *std::min_element(values.begin(), values.end());
  const double hi = *std::max_element(values.begin(), values.end());
  const double threshold = prominence * (hi - lo);

  std::vector<std::size_t> candidates;
  for (std::size_t i = 1; i < n; ++i) {
    const std::size_t left = i >= static_cast<std::size_t>(window) ? i - window : 0;
    const std::size_t right = std::min(n - 1, i + static_cast<std::size_t>(window));
    bool is_min = true;
    for (std::size_t j = left; j <= right && is_min; ++j)
      if (j != i && values[j] <= values[i]) is_min = false;
    if (is_min) candidates.push_back(i);
  }

  DoubleDescentReport report;
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    const std::size_t i = candidates[c];
    const std::size_t prev = c == 0 ? 0 : candidates[c - 1];
    const std::size_t next = c + 1 < candidates.size() ? candidates[c + 1] : n - 1;
    double left_max = values[prev];
    for (std::size_t j = prev; j <= i; ++j) left_max = std::max(left_max, values[j]);
    double prom;
    if (i == n - 1) {
      prom = left_max - values[i];
    } else {
      double right_max = values[i];
      for (std::size_t j = i; j <= next; ++j) right_max = std::max(right_max, values[j]);
      prom = std::min(left_max, right_max) - values[i];
    }
    if (prom > threshold)
      report.minima.push_back({record_points[i], values[i]});
  }

  report.is_double_descent = report.minima.size() >= 2;
  if (!report.minima.empty())
    report.global_min = *std::min_element(
        report.minima.begin(), report.minima.end(),
        [](const CurveMinimum& a, const CurveMinimum& b) { return a.value < b.value; });
  return report;
}

DoubleDescentReport detect_double_descent(const RiskCurve& curve, int window,
                                          double prominence) {
  return detect_double_descent(curve.record_points,
                               std::span<const double>(curve.risk.data(),
                                                       static_cast<std::size_t>(curve.risk.size())),
                               window, prominence);
}

}  // namespace ddlab
