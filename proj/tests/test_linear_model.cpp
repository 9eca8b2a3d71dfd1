#include <doctest.h>

#include <cmath>

#include "ddlab/errors.hpp"
#include "ddlab/linear_model.hpp"

using namespace ddlab;

namespace {

LinearModelSpec two_feature_spec() {
  LinearModelSpec spec;
  spec.feature_stds.resize(2);
  spec.feature_stds << 1.0, 0.15;
  spec.theta_star.resize(2);
  spec.theta_star << 1.5, 10.0;
  spec.noise_std = 0.0;
  return spec;
}

}  // namespace

TEST_CASE("sample_dataset: noiseless labels lie on the model") {
  LinearModelSpec spec = two_feature_spec();
  const Dataset data = sample_dataset(spec, 50, 9);
  const Eigen::VectorXd residual = data.y - data.x * spec.theta_star;
  CHECK(residual.lpNorm<Eigen::Infinity>() < 1e-12);
}

TEST_CASE("sample_dataset: identical seed gives bit-identical data") {
  LinearModelSpec spec = two_feature_spec();
  spec.noise_std = 0.5;
  const Dataset a = sample_dataset(spec, 32, 1234);
  const Dataset b = sample_dataset(spec, 32, 1234);
  CHECK(a.x == b.x);
  CHECK(a.y == b.y);
  const Dataset c = sample_dataset(spec, 32, 1235);
  CHECK(a.x != c.x);
}

TEST_CASE("sample_dataset: rejects n = 0") {
  CHECK_THROWS_AS(sample_dataset(two_feature_spec(), 0, 1), ConfigError);
}

TEST_CASE("sample_raw: per-feature second moments match the spec scales") {
  // 700 features, 6/7 with sigma 1 / theta 1 and 1/7 with sigma 0.1 /
  // theta 10, n = 5d. Chi-square concentration puts 95% of the per-feature
  // variance estimates within 5 sqrt(2/n) sigma_i^2.
  const Eigen::Index d = 700;
  LinearModelSpec spec;
  spec.feature_stds.resize(d);
  spec.theta_star.resize(d);
  for (Eigen::Index i = 0; i < d; ++i) {
    spec.feature_stds[i] = i < 600 ? 1.0 : 0.1;
    spec.theta_star[i] = i < 600 ? 1.0 : 10.0;
  }
  spec.noise_std = 1.0;
  const Eigen::Index n = 5 * d;
  const RawSample raw = sample_raw(spec, n, 77);

  const double tol_factor = 5.0 * std::sqrt(2.0 / static_cast<double>(n));
  Eigen::Index ok = 0;
  for (Eigen::Index j = 0; j < d; ++j) {
    const double second = raw.x.col(j).squaredNorm() / static_cast<double>(n);
    const double target = spec.feature_stds[j] * spec.feature_stds[j];
    if (std::abs(second - target) <= tol_factor * target) ++ok;
  }
  CHECK(ok >= static_cast<Eigen::Index>(0.95 * static_cast<double>(d)));
}

TEST_CASE("population_risk: minimized at theta_star with value noise^2") {
  LinearModelSpec spec = two_feature_spec();
  spec.noise_std = 0.3;
  CHECK(population_risk(spec, spec.theta_star) == doctest::Approx(0.09).epsilon(1e-12));
}

TEST_CASE("population_risk: hand value at theta_hat = 0") {
  const LinearModelSpec spec = two_feature_spec();
  // 1^2 1.5^2 + 0.15^2 10^2 = 4.5
  CHECK(population_risk(spec, Eigen::VectorXd::Zero(2)) ==
        doctest::Approx(4.5).epsilon(1e-14));
}

TEST_CASE("population_risk: shrinking toward theta_star lowers risk") {
  const LinearModelSpec spec = two_feature_spec();
  const double half = population_risk(spec, 0.5 * spec.theta_star);
  const double full = population_risk(spec, spec.theta_star);
  CHECK(half >= full);
}

TEST_CASE("population_risk: rejects dimension mismatch") {
  CHECK_THROWS_AS(population_risk(two_feature_spec(), Eigen::VectorXd::Zero(3)),
                  ConfigError);
}

TEST_CASE("spec validation") {
  LinearModelSpec spec = two_feature_spec();
  spec.feature_stds[1] = 0.0;
  CHECK_THROWS_AS(spec.validate(), ConfigError);
  spec = two_feature_spec();
  spec.noise_std = -1.0;
  CHECK_THROWS_AS(spec.validate(), ConfigError);
  spec = two_feature_spec();
  spec.theta_star.resize(3);
  CHECK_THROWS_AS(spec.validate(), ConfigError);
}
