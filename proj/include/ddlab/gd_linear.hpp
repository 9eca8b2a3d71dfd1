#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <span>
#include <vector>

#include "ddlab/csv.hpp"
#include "ddlab/linear_model.hpp"

namespace ddlab {

// Per-feature stepsizes eta_1 .. eta_d (the diagonal of the stepsize
// matrix).
struct StepsizeSchedule {
  Eigen::VectorXd etas;

  void validate() const;  // every eta > 0
};

StepsizeSchedule constant_schedule(Eigen::Index d, double eta);

// Iterate snapshots at the requested iteration indices. Gradient descent
// always starts from theta^0 = 0, so a requested point 0 holds the
// all-zeros vector.
struct Trajectory {
  std::vector<long> record_points;
  std::vector<Eigen::VectorXd> thetas;
};

// Sampled risk series. `risk` always equals
// noise_variance + bias + variance for the closed-form producers.
struct RiskCurve {
  std::vector<long> record_points;
  Eigen::VectorXd risk;
  Eigen::VectorXd bias;
  Eigen::VectorXd variance;
  double noise_variance = 0.0;
  Eigen::MatrixXd u_curves;  // optional, T x d
  Eigen::VectorXd std_dev;   // optional, Monte-Carlo runs only

  bool has_u() const { return u_curves.size() > 0; }
  bool has_std() const { return std_dev.size() > 0; }
};

// CSV with header t,risk,bias,variance[,u_1..u_d][,std].
csv::Table to_table(const RiskCurve& curve);

// Gradient descent on the empirical loss ||X theta - y||^2 with update
// theta <- theta - H X^T (X theta - y). Aborts with DivergenceError once
// the residual norm exceeds 1e6 times its initial value.
Trajectory gd_fit(const Dataset& data, const StepsizeSchedule& schedule,
                  std::span<const long> record_points);

// Oracle recursion with X^T X replaced by its expectation diag(sigma_i^2):
//   e^{t+1} = (I - H Sigma^2) e^t + H X^T (y - X theta*),   e^0 = -theta*,
// reported as theta^t = theta* + e^t. Coincides with gd_fit whenever
// X^T X = Sigma^2 holds exactly.
Trajectory proximal_trajectory(const LinearModelSpec& spec, const Dataset& data,
                               const StepsizeSchedule& schedule,
                               std::span<const long> record_points);

// Closed-form per-feature risk contribution
//   U_i(t) = sigma^2 theta^2 (1 - eta sigma^2)^{2t}
//          + noise_over_n (1 - (1 - eta sigma^2)^t)^2
// and its bias/variance halves. noise_over_n is sigma_noise^2 / n.
double u_bias_term(double sigma, double theta, double eta, double t);
double u_var_term(double sigma, double eta, double noise_over_n, double t);
double u_term(double sigma, double theta, double eta, double noise_over_n, double t);

// Risk-expression curve parameterized directly by the noise ratio; the
// additive noise floor is passed separately because only the ratio enters
// the curve shape.
RiskCurve risk_curve_from_ratio(const Eigen::VectorXd& sigmas,
                                const Eigen::VectorXd& thetas,
                                const Eigen::VectorXd& etas, double noise_over_n,
                                double noise_variance,
                                std::span<const long> record_points,
                                bool with_u = false);

// Closed-form risk expression: noise_std^2 + sum_i U_i(t). Warns on
// stderr (does not abort) if any eta_i sigma_i^2 exceeds 1.
RiskCurve risk_expression(const LinearModelSpec& spec, const StepsizeSchedule& schedule,
                          Eigen::Index n, std::span<const long> record_points,
                          bool with_u = false);

// Single-feature U-curve; `feature_index` is zero-based.
Eigen::VectorXd u_curve(const LinearModelSpec& spec, const StepsizeSchedule& schedule,
                        Eigen::Index n, Eigen::Index feature_index,
                        std::span<const long> record_points);

// Monte-Carlo risk estimate: mean and sample standard deviation of
// population_risk(theta^t) over independently sampled training sets.
// Replicate r draws its data from split(seed, r), so results do not depend
// on evaluation order. bias/variance columns hold the textbook
// decomposition estimated from the replicate mean of theta^t.
RiskCurve mc_risk(const LinearModelSpec& spec, const StepsizeSchedule& schedule,
                  Eigen::Index n, std::span<const long> record_points,
                  int replicates, std::uint64_t seed);

}  // namespace ddlab
