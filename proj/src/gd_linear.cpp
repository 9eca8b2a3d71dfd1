#include "ddlab/gd_linear.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "ddlab/errors.hpp"
#include "ddlab/rng.hpp"

namespace ddlab {

namespace {

void check_record_points(std::span<const long> pts) {
  if (pts.empty()) throw ConfigError("record_points: must be non-empty");
  if (pts.front() < 0) throw ConfigError("record_points: must be nonnegative");
  for (std::size_t i = 1; i < pts.size(); ++i)
    if (pts[i] <= pts[i - 1])
      throw ConfigError("record_points: must be strictly increasing");
}

}  // namespace

void StepsizeSchedule::validate() const {
  if (etas.size() == 0) throw ConfigError("etas: must be non-empty");
  if ((etas.array() <= 0.0).any())
    throw ConfigError("etas: entries must be strictly positive");
}

StepsizeSchedule constant_schedule(Eigen::Index d, double eta) {
  StepsizeSchedule s{Eigen::VectorXd::Constant(d, eta)};
  s.validate();
  return s;
}

csv::Table to_table(const RiskCurve& curve) {
  csv::Table t;
  t.header = {"t", "risk", "bias", "variance"};
  const Eigen::Index d = curve.has_u() ? curve.u_curves.cols() : 0;
  for (Eigen::Index j = 0; j < d; ++j)
    t.header.push_back("u_" + std::to_string(j + 1));
  if (curve.has_std()) t.header.push_back("std");
  for (std::size_t i = 0; i < curve.record_points.size(); ++i) {
    std::vector<std::string> row;
    row.push_back(csv::format(curve.record_points[i]));
    row.push_back(csv::format(curve.risk[static_cast<Eigen::Index>(i)]));
    row.push_back(csv::format(curve.bias[static_cast<Eigen::Index>(i)]));
    row.push_back(csv::format(curve.variance[static_cast<Eigen::Index>(i)]));
    for (Eigen::Index j = 0; j < d; ++j)
      row.push_back(csv::format(curve.u_curves(static_cast<Eigen::Index>(i), j)));
    if (curve.has_std())
      row.push_back(csv::format(curve.std_dev[static_cast<Eigen::Index>(i)]));
    t.rows.push_back(std::move(row));
  }
  return t;
}

Trajectory gd_fit(const Dataset& data, const StepsizeSchedule& schedule,
                  std::span<const long> record_points) {
  schedule.validate();
  check_record_points(record_points);
  if (schedule.etas.size() != data.x.cols())
    throw ConfigError("etas: length does not match dataset dimension");

  const long t_max = record_points.back();
  Trajectory out;
  out.record_points.assign(record_points.begin(), record_points.end());
  out.thetas.reserve(record_points.size());

  Eigen::VectorXd theta = Eigen::VectorXd::Zero(data.x.cols());
  const double r0 = data.y.norm();
  const double guard = 1e6 * r0 + std::numeric_limits<double>::min();

  std::size_t next = 0;
  for (long t = 0; t <= t_max; ++t) {
    if (next < record_points.size() && record_points[next] == t) {
      out.thetas.push_back(theta);
      ++next;
    }
    if (t == t_max) break;
    Eigen::VectorXd residual = data.x * theta - data.y;
    if (residual.norm() > guard)
      throw DivergenceError("gd_fit: residual exceeded 1e6 x initial at iteration " +
                            std::to_string(t));
    theta.array() -= schedule.etas.array() * (data.x.transpose() * residual).array();
  }
  return out;
}

Trajectory proximal_trajectory(const LinearModelSpec& spec, const Dataset& data,
                               const StepsizeSchedule& schedule,
                               std::span<const long> record_points) {
  spec.validate();
  schedule.validate();
  check_record_points(record_points);
  if (schedule.etas.size() != spec.d() || data.x.cols() != spec.d())
    throw ConfigError("etas: dimension mismatch between spec, data and schedule");

  const Eigen::VectorXd noise = data.y - data.x * spec.theta_star;  // scaled z
  const Eigen::VectorXd drive =
      schedule.etas.array() * (data.x.transpose() * noise).array();
  const Eigen::ArrayXd contraction =
      1.0 - schedule.etas.array() * spec.feature_stds.array().square();

  Trajectory out;
  out.record_points.assign(record_points.begin(), record_points.end());
  out.thetas.reserve(record_points.size());

  Eigen::VectorXd err = -spec.theta_star;  // theta~^t - theta*
  const long t_max = record_points.back();
  std::size_t next = 0;
  for (long t = 0; t <= t_max; ++t) {
    if (next < record_points.size() && record_points[next] == t) {
      out.thetas.push_back(spec.theta_star + err);
      ++next;
    }
    if (t == t_max) break;
    err = (contraction * err.array()).matrix() + drive;
  }
  return out;
}

double u_bias_term(double sigma, double theta, double eta, double t) {
  const double b = 1.0 - eta * sigma * sigma;
  return sigma * sigma * theta * theta * std::pow(b, 2.0 * t);
}

double u_var_term(double sigma, double eta, double noise_over_n, double t) {
  const double b = 1.0 - eta * sigma * sigma;
  const double g = 1.0 - std::pow(b, t);
  return noise_over_n * g * g;
}

double u_term(double sigma, double theta, double eta, double noise_over_n, double t) {
  return u_bias_term(sigma, theta, eta, t) + u_var_term(sigma, eta, noise_over_n, t);
}

RiskCurve risk_curve_from_ratio(const Eigen::VectorXd& sigmas,
                                const Eigen::VectorXd& thetas,
                                const Eigen::VectorXd& etas, double noise_over_n,
                                double noise_variance,
                                std::span<const long> record_points, bool with_u) {
  check_record_points(record_points);
  const Eigen::Index d = sigmas.size();
  if (thetas.size() != d || etas.size() != d)
    throw ConfigError("etas: dimension mismatch in risk curve inputs");

  const Eigen::Index T = static_cast<Eigen::Index>(record_points.size());
  RiskCurve curve;
  curve.record_points.assign(record_points.begin(), record_points.end());
  curve.risk.resize(T);
  curve.bias.resize(T);
  curve.variance.resize(T);
  curve.noise_variance = noise_variance;
  if (with_u) curve.u_curves.resize(T, d);

  const Eigen::ArrayXd contraction = 1.0 - etas.array() * sigmas.array().square();
  const Eigen::ArrayXd bias0 = sigmas.array().square() * thetas.array().square();
  for (Eigen::Index i = 0; i < T; ++i) {
    const double t = static_cast<double>(record_points[static_cast<std::size_t>(i)]);
    const Eigen::ArrayXd bt = contraction.pow(t);
    const Eigen::ArrayXd bias_i = bias0 * bt.square();
    const Eigen::ArrayXd var_i = noise_over_n * (1.0 - bt).square();
    curve.bias[i] = bias_i.sum();
    curve.variance[i] = var_i.sum();
    curve.risk[i] = noise_variance + curve.bias[i] + curve.variance[i];
    if (with_u) curve.u_curves.row(i) = (bias_i + var_i).transpose();
  }
  return curve;
}

RiskCurve risk_expression(const LinearModelSpec& spec, const StepsizeSchedule& schedule,
                          Eigen::Index n, std::span<const long> record_points,
                          bool with_u) {
  spec.validate();
  schedule.validate();
  if (schedule.etas.size() != spec.d())
    throw ConfigError("etas: length does not match spec dimension");
  if (n < 1) throw ConfigError("n: must be at least 1");

  const Eigen::ArrayXd products =
      schedule.etas.array() * spec.feature_stds.array().square();
  if ((products > 1.0).any())
    std::fprintf(stderr,
                 "warning: risk_expression: some eta_i sigma_i^2 exceed 1; the "
                 "closed form is outside its guaranteed regime\n");

  const double noise_var = spec.noise_std * spec.noise_std;
  return risk_curve_from_ratio(spec.feature_stds, spec.theta_star, schedule.etas,
                               noise_var / static_cast<double>(n), noise_var,
                               record_points, with_u);
}

Eigen::VectorXd u_curve(const LinearModelSpec& spec, const StepsizeSchedule& schedule,
                        Eigen::Index n, Eigen::Index feature_index,
                        std::span<const long> record_points) {
  spec.validate();
  schedule.validate();
  check_record_points(record_points);
  if (feature_index < 0 || feature_index >= spec.d())
    throw ConfigError("feature_index: out of range");
  if (schedule.etas.size() != spec.d())
    throw ConfigError("etas: length does not match spec dimension");

  const double sigma = spec.feature_stds[feature_index];
  const double theta = spec.theta_star[feature_index];
  const double eta = schedule.etas[feature_index];
  const double ratio =
      spec.noise_std * spec.noise_std / static_cast<double>(n);

  Eigen::VectorXd out(static_cast<Eigen::Index>(record_points.size()));
  for (Eigen::Index i = 0; i < out.size(); ++i)
    out[i] = u_term(sigma, theta, eta, ratio,
                    static_cast<double>(record_points[static_cast<std::size_t>(i)]));
  return out;
}

RiskCurve mc_risk(const LinearModelSpec& spec, const StepsizeSchedule& schedule,
                  Eigen::Index n, std::span<const long> record_points,
                  int replicates, std::uint64_t seed) {
  spec.validate();
  schedule.validate();
  check_record_points(record_points);
  if (replicates < 2) throw ConfigError("replicates: must be at least 2");

  const Eigen::Index T = static_cast<Eigen::Index>(record_points.size());
  const Eigen::Index d = spec.d();
  Eigen::VectorXd risk_sum = Eigen::VectorXd::Zero(T);
  Eigen::VectorXd risk_sq_sum = Eigen::VectorXd::Zero(T);
  Eigen::MatrixXd theta_sum = Eigen::MatrixXd::Zero(T, d);
  Eigen::MatrixXd theta_sq_sum = Eigen::MatrixXd::Zero(T, d);

  const Rng master(seed);
  for (int r = 0; r < replicates; ++r) {
    const Dataset data = sample_dataset(spec, n, master.split(static_cast<std::uint64_t>(r)).key());
    const Trajectory traj = gd_fit(data, schedule, record_points);
    for (Eigen::Index i = 0; i < T; ++i) {
      const Eigen::VectorXd& theta = traj.thetas[static_cast<std::size_t>(i)];
      const double risk = population_risk(spec, theta);
      risk_sum[i] += risk;
      risk_sq_sum[i] += risk * risk;
      theta_sum.row(i) += theta.transpose();
      theta_sq_sum.row(i) += theta.array().square().matrix().transpose();
    }
  }

  const double R = static_cast<double>(replicates);
  RiskCurve curve;
  curve.record_points.assign(record_points.begin(), record_points.end());
  curve.noise_variance = spec.noise_std * spec.noise_std;
  curve.risk = risk_sum / R;
  curve.std_dev.resize(T);
  curve.bias.resize(T);
  curve.variance.resize(T);
  const Eigen::ArrayXd weights = spec.feature_stds.array().square();
  for (Eigen::Index i = 0; i < T; ++i) {
    const double var_of_risk =
        std::max(0.0, (risk_sq_sum[i] - R * curve.risk[i] * curve.risk[i]) / (R - 1.0));
    curve.std_dev[i] = std::sqrt(var_of_risk);
    const Eigen::ArrayXd mean = theta_sum.row(i).transpose().array() / R;
    const Eigen::ArrayXd second = theta_sq_sum.row(i).transpose().array() / R;
    curve.bias[i] = (weights * (spec.theta_star.array() - mean).square()).sum();
    curve.variance[i] = (weights * (second - mean.square()).max(0.0)).sum();
  }
  return curve;
}

}  // namespace ddlab
