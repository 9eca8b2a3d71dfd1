#include "ddlab/linear_model.hpp"

#include <cmath>

#include "ddlab/errors.hpp"
#include "ddlab/rng.hpp"

namespace ddlab {

void LinearModelSpec::validate() const {
  if (feature_stds.size() == 0)
    throw ConfigError("feature_stds: must be non-empty");
  if (theta_star.size() != feature_stds.size())
    throw ConfigError("theta_star: length does not match feature_stds");
  if ((feature_stds.array() <= 0.0).any())
    throw ConfigError("feature_stds: entries must be strictly positive");
  if (noise_std < 0.0) throw ConfigError("noise_std: must be nonnegative");
}

RawSample sample_raw(const LinearModelSpec& spec, Eigen::Index n, std::uint64_t seed) {
  spec.validate();
  if (n < 1) throw ConfigError("n: must be at least 1");
  const Eigen::Index d = spec.d();
  Rng rng(seed);
  RawSample out;
  out.x.resize(n, d);
  out.y.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < d; ++j)
      out.x(i, j) = spec.feature_stds[j] * rng.next_gaussian();
    const double z = spec.noise_std * rng.next_gaussian();
    out.y[i] = out.x.row(i).dot(spec.theta_star) + z;
  }
  return out;
}

Dataset sample_dataset(const LinearModelSpec& spec, Eigen::Index n, std::uint64_t seed) {
  RawSample raw = sample_raw(spec, n, seed);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  Dataset data;
  data.x = scale * raw.x;
  data.y = scale * raw.y;
  data.n = n;
  data.seed = seed;
  return data;
}

double population_risk(const LinearModelSpec& spec, const Eigen::VectorXd& theta_hat) {
  spec.validate();
  if (theta_hat.size() != spec.d())
    throw ConfigError("theta_hat: length does not match spec dimension");
  const Eigen::ArrayXd diff = spec.theta_star.array() - theta_hat.array();
  return spec.noise_std * spec.noise_std +
         (spec.feature_stds.array().square() * diff.square()).sum();
}

}  // namespace ddlab
