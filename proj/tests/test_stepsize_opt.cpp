#include <doctest.h>

#include <cmath>
#include <vector>

#include "ddlab/errors.hpp"
#include "ddlab/gd_linear.hpp"
#include "ddlab/grid.hpp"
#include "ddlab/stepsize_opt.hpp"

using namespace ddlab;

namespace {

LinearModelSpec varied_spec() {
  LinearModelSpec spec;
  spec.feature_stds.resize(4);
  spec.feature_stds << 1.0, 0.15, 0.5, 2.0;
  spec.theta_star.resize(4);
  spec.theta_star << 1.5, 10.0, -3.0, 0.7;
  spec.noise_std = 1.0;
  return spec;
}

// Continuous-t derivative of U_i from the optimality argument:
// dU/dt = 2 ln(b) b^t [ b^t (sigma^2 theta^2 + r) - r ],  b = 1 - eta sigma^2.
double u_derivative(double sigma, double theta, double eta, double r, double t) {
  const double b = 1.0 - eta * sigma * sigma;
  const double bt = std::pow(b, t);
  return 2.0 * std::log(b) * bt * (bt * (sigma * sigma * theta * theta + r) - r);
}

}  // namespace

TEST_CASE("optimal_stepsizes: zero noise gives eta = 1/sigma^2") {
  LinearModelSpec spec = varied_spec();
  spec.noise_std = 0.0;
  for (const double t_target : {1.0, 7.0, 300.0}) {
    const StepsizeSchedule schedule = optimal_stepsizes(spec, 1000, t_target);
    for (Eigen::Index i = 0; i < spec.d(); ++i)
      CHECK(schedule.etas[i] ==
            doctest::Approx(1.0 / (spec.feature_stds[i] * spec.feature_stds[i]))
                .epsilon(1e-14));
  }
}

TEST_CASE("optimal_stepsizes: t_target = 1 reduces to the one-step ratio") {
  const LinearModelSpec spec = varied_spec();
  const Eigen::Index n = 50;
  const double r = spec.noise_std * spec.noise_std / static_cast<double>(n);
  const StepsizeSchedule schedule = optimal_stepsizes(spec, n, 1.0);
  for (Eigen::Index i = 0; i < spec.d(); ++i) {
    const double s2 = spec.feature_stds[i] * spec.feature_stds[i];
    const double signal = s2 * spec.theta_star[i] * spec.theta_star[i];
    CHECK(schedule.etas[i] ==
          doctest::Approx(signal / (signal + r) / s2).epsilon(1e-13));
  }
}

TEST_CASE("optimal_stepsizes: range 0 < eta <= 1/sigma^2") {
  const LinearModelSpec spec = varied_spec();
  for (const double t_target : {0.5, 1.0, 10.0, 1e4}) {
    const StepsizeSchedule schedule = optimal_stepsizes(spec, 100, t_target);
    for (Eigen::Index i = 0; i < spec.d(); ++i) {
      CHECK(schedule.etas[i] > 0.0);
      CHECK(schedule.etas[i] <=
            1.0 / (spec.feature_stds[i] * spec.feature_stds[i]) + 1e-15);
    }
  }
  CHECK_THROWS_AS(optimal_stepsizes(spec, 100, 0.0), ConfigError);
}

TEST_CASE("u_min_value: degenerate and symmetric cases") {
  LinearModelSpec spec = varied_spec();
  spec.noise_std = 0.0;
  CHECK(u_min_value(spec, 10, 0) == 0.0);

  // sigma^2 theta*^2 = sigma_noise^2 / n = 1 -> minimum 1/2.
  LinearModelSpec sym;
  sym.feature_stds = Eigen::VectorXd::Ones(1);
  sym.theta_star = Eigen::VectorXd::Ones(1);
  sym.noise_std = 2.0;
  CHECK(u_min_value(sym, 4, 0) == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("u_min_value: studied two-feature configuration at ratio 0.1") {
  // sigma_1^2 theta_1*^2 = 2.25 against sigma^2/n = 0.1: 0.225/2.35.
  LinearModelSpec spec = varied_spec();
  spec.noise_std = 1.0;
  const double value = u_min_value(spec, 10, 0);
  CHECK(value == doctest::Approx(0.225 / 2.35).epsilon(1e-12));
  CHECK(value <= 0.1);
  CHECK(value <= 2.25);
  CHECK_THROWS_AS(u_min_value(spec, 10, 9), ConfigError);
}

TEST_CASE("u_min_value: matches a grid search of the aligned U-curve") {
  const LinearModelSpec spec = varied_spec();
  const Eigen::Index n = 40;
  const double t_target = 100.0;  // a point of the 40/decade grid
  const StepsizeSchedule schedule = optimal_stepsizes(spec, n, t_target);
  const std::vector<long> pts = log_grid(100000);
  for (Eigen::Index i = 0; i < spec.d(); ++i) {
    const Eigen::VectorXd u = u_curve(spec, schedule, n, i, pts);
    CHECK(u.minCoeff() ==
          doctest::Approx(u_min_value(spec, n, i)).epsilon(1e-6));
  }
}

TEST_CASE("optimal_stepsizes: stationarity of every U-curve at t_target") {
  const LinearModelSpec spec = varied_spec();
  const Eigen::Index n = 40;
  const double r = spec.noise_std * spec.noise_std / static_cast<double>(n);
  for (const double t_target : {1.0, 31.0, 1000.0}) {
    const StepsizeSchedule schedule = optimal_stepsizes(spec, n, t_target);
    for (Eigen::Index i = 0; i < spec.d(); ++i) {
      const double deriv = u_derivative(spec.feature_stds[i], spec.theta_star[i],
                                        schedule.etas[i], r, t_target);
      const double value = u_term(spec.feature_stds[i], spec.theta_star[i],
                                  schedule.etas[i], r, t_target);
      CHECK(std::abs(deriv) <= 1e-8 * value);
    }
  }
}

TEST_CASE("optimal_stepsizes: grid argmins of all U-curves coincide") {
  const LinearModelSpec spec = varied_spec();
  const Eigen::Index n = 40;
  const StepsizeSchedule schedule = optimal_stepsizes(spec, n, 100.0);
  const std::vector<long> pts = log_grid(100000);
  std::vector<Eigen::Index> argmins;
  for (Eigen::Index i = 0; i < spec.d(); ++i) {
    const Eigen::VectorXd u = u_curve(spec, schedule, n, i, pts);
    Eigen::Index arg = 0;
    u.minCoeff(&arg);
    argmins.push_back(arg);
  }
  for (std::size_t i = 1; i < argmins.size(); ++i)
    CHECK(std::abs(static_cast<long>(argmins[i]) - static_cast<long>(argmins[0])) <= 1);
}

TEST_CASE("u_min_value: invariant under the choice of t_target") {
  const LinearModelSpec spec = varied_spec();
  const Eigen::Index n = 40;
  const double r = spec.noise_std * spec.noise_std / static_cast<double>(n);
  for (Eigen::Index i = 0; i < spec.d(); ++i) {
    double reference = -1.0;
    for (const double t_target : {1.0, 10.0, 100.0}) {
      const StepsizeSchedule schedule = optimal_stepsizes(spec, n, t_target);
      const double value = u_term(spec.feature_stds[i], spec.theta_star[i],
                                  schedule.etas[i], r, t_target);
      if (reference < 0.0)
        reference = value;
      else
        CHECK(value == doctest::Approx(reference).epsilon(1e-10));
    }
  }
}

TEST_CASE("optimal_stepsizes: alignment beats every constant schedule tried") {
  LinearModelSpec spec;
  spec.feature_stds.resize(2);
  spec.feature_stds << 1.0, 0.15;
  spec.theta_star.resize(2);
  spec.theta_star << 1.5, 10.0;
  spec.noise_std = 2.0;
  const Eigen::Index n = 2;
  const std::vector<long> pts = log_grid(100000);
  const StepsizeSchedule aligned = optimal_stepsizes(spec, n, 100.0);
  const double aligned_min = risk_expression(spec, aligned, n, pts).risk.minCoeff();
  for (const double eta : {0.005, 0.02, 0.05, 0.2, 0.9}) {
    const double const_min =
        risk_expression(spec, constant_schedule(2, eta), n, pts).risk.minCoeff();
    CHECK(aligned_min <= const_min + 1e-12);
  }
}

TEST_CASE("detect_double_descent: monotone decreasing curve ends in one minimum") {
  std::vector<long> t;
  std::vector<double> v;
  for (long i = 1; i <= 60; ++i) {
    t.push_back(i);
    v.push_back(100.0 / static_cast<double>(i));
  }
  const DoubleDescentReport report = detect_double_descent(t, v);
  CHECK(report.minima.size() == 1);
  CHECK(report.minima[0].t == 60);
  CHECK_FALSE(report.is_double_descent);
}

TEST_CASE("detect_double_descent: synthetic two-valley curve") {
  std::vector<long> t;
  std::vector<double> v;
  for (long i = 0; i < 200; ++i) {
    t.push_back(i + 1);
    const double x = static_cast<double>(i) / 10.0;
    // Valleys near x = 5 and x = 15, ridge between them.
    v.push_back(0.1 * (x - 5.0) * (x - 5.0) * (x - 15.0) * (x - 15.0) / 100.0 + 1.0);
  }
  const DoubleDescentReport report = detect_double_descent(t, v);
  CHECK(report.is_double_descent);
  CHECK(report.minima.size() == 2);
  CHECK(report.minima[0].t < report.minima[1].t);
  CHECK(report.global_min.value ==
        doctest::Approx(std::min(report.minima[0].value, report.minima[1].value)));
}

TEST_CASE("detect_double_descent: shallow wiggles are filtered by prominence") {
  std::vector<long> t;
  std::vector<double> v;
  for (long i = 0; i < 100; ++i) {
    t.push_back(i + 1);
    const double x = static_cast<double>(i);
    v.push_back(100.0 - x + 0.2 * std::sin(x));  // tiny ripples on a big descent
  }
  const DoubleDescentReport report = detect_double_descent(t, v, 2, 0.05);
  CHECK(report.minima.size() == 1);  // only the boundary minimum survives
  CHECK_FALSE(report.is_double_descent);
}

TEST_CASE("detect_double_descent: rejects short curves and bad parameters") {
  const std::vector<long> t = {1, 2, 3};
  const std::vector<double> v = {3.0, 1.0, 2.0};
  CHECK_THROWS_AS(detect_double_descent(t, v, 5, 0.05), ConfigError);
  const std::vector<long> t2 = {1, 2};
  const std::vector<double> v2 = {3.0};
  CHECK_THROWS_AS(detect_double_descent(t2, v2, 1, 0.05), ConfigError);
}

TEST_CASE("double-descent report CSV carries the summary line") {
  std::vector<long> t;
  std::vector<double> v;
  for (long i = 1; i <= 30; ++i) {
    t.push_back(i);
    v.push_back(1.0 / static_cast<double>(i));
  }
  const DoubleDescentReport report = detect_double_descent(t, v, 3, 0.05);
  const csv::Table table = to_table(report);
  CHECK(table.header == std::vector<std::string>{"t_min", "value"});
  CHECK(table.rows.back() == std::vector<std::string>{"double_descent=false"});
}
