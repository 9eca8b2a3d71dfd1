#pragma once

#include <Eigen/Core>
#include <cstdint>

namespace ddlab {

// Ground-truth Gaussian linear model: features x_j ~ N(0, sigma_j^2)
// independently, label y = <x, theta_star> + N(0, noise_std^2).
struct LinearModelSpec {
  Eigen::VectorXd feature_stds;  // sigma_1 .. sigma_d, all > 0
  Eigen::VectorXd theta_star;    // theta_1* .. theta_d*
  double noise_std = 0.0;

  Eigen::Index d() const { return feature_stds.size(); }

  // Throws ConfigError on non-positive stds, negative noise or length
  // mismatch.
  void validate() const;
};

// Training set in the scaled convention: rows of `x` are x_i / sqrt(n) and
// `y` holds y_i / sqrt(n), so the empirical loss ||X theta - y||^2 matches
// the formulas downstream without extra factors.
struct Dataset {
  Eigen::MatrixXd x;  // n x d, scaled
  Eigen::VectorXd y;  // length n, scaled
  Eigen::Index n = 0;
  std::uint64_t seed = 0;
};

// Raw (unscaled) draw from the same model; the network experiments train
// directly on these.
struct RawSample {
  Eigen::MatrixXd x;  // n x d
  Eigen::VectorXd y;  // length n
};

// Draw order is fixed: for each example, the d feature gaussians then one
// noise gaussian, all from the stream derived from `seed`. Deterministic
// for fixed (spec, n, seed).
RawSample sample_raw(const LinearModelSpec& spec, Eigen::Index n, std::uint64_t seed);
Dataset sample_dataset(const LinearModelSpec& spec, Eigen::Index n, std::uint64_t seed);

// Exact population risk of a linear estimate, Eq. of the data model:
// sigma^2 + sum_i sigma_i^2 (theta_i* - theta_hat_i)^2.
double population_risk(const LinearModelSpec& spec, const Eigen::VectorXd& theta_hat);

}  // namespace ddlab
