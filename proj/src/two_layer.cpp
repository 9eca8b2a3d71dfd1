#include "ddlab/two_layer.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "ddlab/errors.hpp"
#include "ddlab/rng.hpp"

namespace ddlab {

namespace {

void check_points(std::span<const long> pts) {
  if (pts.empty()) throw ConfigError("record_points: must be non-empty");
  if (pts.front() < 0) throw ConfigError("record_points: must be nonnegative");
  for (std::size_t i = 1; i < pts.size(); ++i)
    if (pts[i] <= pts[i - 1])
      throw ConfigError("record_points: must be strictly increasing");
}

inline Eigen::ArrayXXd relu_prime(const Eigen::MatrixXd& pre) {
  return (pre.array() >= 0.0).cast<double>();
}

}  // namespace

TwoLayerParams init_params(Eigen::Index d, Eigen::Index k, double omega, double nu,
                           std::uint64_t seed) {
  if (d < 1 || k < 1) throw ConfigError("d: network dimensions must be at least 1");
  if (omega < 0.0 || nu < 0.0)
    throw ConfigError("omega: initialization scales must be nonnegative");
  Rng rng(seed);
  TwoLayerParams p;
  p.omega = omega;
  p.nu = nu;
  p.w.resize(d, k);
  for (Eigen::Index r = 0; r < k; ++r)
    for (Eigen::Index j = 0; j < d; ++j) p.w(j, r) = omega * rng.next_gaussian();
  p.v.resize(k);
  for (Eigen::Index r = 0; r < k; ++r) p.v[r] = nu * rng.next_sign();
  return p;
}

Eigen::VectorXd forward(const TwoLayerParams& params, const Eigen::MatrixXd& x_rows) {
  if (x_rows.cols() != params.d())
    throw ConfigError("x_rows: column count does not match network input dimension");
  const double scale = 1.0 / std::sqrt(static_cast<double>(params.k()));
  return scale * ((x_rows * params.w).cwiseMax(0.0) * params.v);
}

Eigen::MatrixXd jacobian(const TwoLayerParams& params, const Eigen::MatrixXd& x_rows) {
  if (x_rows.cols() != params.d())
    throw ConfigError("x_rows: column count does not match network input dimension");
  const Eigen::Index n = x_rows.rows();
  const Eigen::Index d = params.d();
  const Eigen::Index k = params.k();
  const double scale = 1.0 / std::sqrt(static_cast<double>(k));

  const Eigen::MatrixXd pre = x_rows * params.w;  // n x k
  const Eigen::ArrayXXd gate = relu_prime(pre);

  Eigen::MatrixXd jac(n, d * k + k);
  for (Eigen::Index r = 0; r < k; ++r) {
    // d/dW_{j,r} f(x_i) = v_r relu'(pre_{i,r}) x_{i,j} / sqrt(k)
    jac.middleCols(r * d, d) =
        (scale * params.v[r]) * (gate.col(r).matrix().asDiagonal() * x_rows);
  }
  jac.rightCols(k) = scale * pre.cwiseMax(0.0);
  return jac;
}

csv::Table to_table(const TrainLog& log) {
  csv::Table t;
  t.header = {"t", "train_mse", "test_mae", "test_mse"};
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t i = 0; i < log.record_points.size(); ++i) {
    t.rows.push_back({csv::format(log.record_points[i]),
                      csv::format(log.train_mse[i]),
                      csv::format(log.has_test ? log.test_mae[i] : nan),
                      csv::format(log.has_test ? log.test_mse[i] : nan)});
  }
  return t;
}

TrainLog train(const TwoLayerParams& init, const Eigen::MatrixXd& x_rows,
               const Eigen::VectorXd& y, double eta_w, double eta_v,
               std::span<const long> record_points, const TestSet* test_set,
               bool keep_snapshots) {
  check_points(record_points);
  if (x_rows.cols() != init.d())
    throw ConfigError("x_rows: column count does not match network input dimension");
  if (y.size() != x_rows.rows())
    throw ConfigError("y: length does not match number of examples");
  if (eta_w < 0.0 || eta_v < 0.0)
    throw ConfigError("eta_w: stepsizes must be nonnegative");

  const Eigen::Index k = init.k();
  const double scale = 1.0 / std::sqrt(static_cast<double>(k));
  const long t_max = record_points.back();

  TrainLog log;
  log.record_points.assign(record_points.begin(), record_points.end());
  log.has_test = test_set != nullptr;

  Eigen::MatrixXd w = init.w;
  Eigen::VectorXd v = init.v;

  Eigen::MatrixXd pre(x_rows.rows(), k);
  Eigen::VectorXd residual(y.size());
  double guard = 0.0;

  std::size_t next = 0;
  for (long t = 0; t <= t_max; ++t) {
    pre.noalias() = x_rows * w;
    const Eigen::MatrixXd act = pre.cwiseMax(0.0);
    residual.noalias() = scale * (act * v) - y;
    const double rnorm = residual.norm();
    if (t == 0) guard = 1e6 * rnorm + std::numeric_limits<double>::min();
    if (rnorm > guard)
      throw DivergenceError("train: residual exceeded 1e6 x initial at iteration " +
                            std::to_string(t));

    if (next < record_points.size() && record_points[next] == t) {
      log.train_mse.push_back(0.5 * rnorm * rnorm);
      if (test_set) {
        TwoLayerParams snap{w, v, init.omega, init.nu};
        const auto [mae, mse] = test_risk(snap, test_set->x, test_set->y);
        log.test_mae.push_back(mae);
        log.test_mse.push_back(mse);
      }
      if (keep_snapshots)
        log.snapshots.push_back(TwoLayerParams{w, v, init.omega, init.nu});
      ++next;
    }
    if (t == t_max) break;

    // Simultaneous update: both gradients taken at (W_t, v_t).
    const Eigen::MatrixXd gated =
        relu_prime(pre) * (residual * v.transpose()).array();  // n x k
    const Eigen::MatrixXd grad_w = scale * (x_rows.transpose() * gated.matrix());
    const Eigen::VectorXd grad_v = scale * (act.transpose() * residual);
    w.noalias() -= eta_w * grad_w;
    v.noalias() -= eta_v * grad_v;
  }

  log.final_params = TwoLayerParams{std::move(w), std::move(v), init.omega, init.nu};
  return log;
}

std::pair<double, double> test_risk(const TwoLayerParams& params,
                                    const Eigen::MatrixXd& x_test,
                                    const Eigen::VectorXd& y_test) {
  if (x_test.rows() == 0) throw ConfigError("x_test: test set must be non-empty");
  if (y_test.size() != x_test.rows())
    throw ConfigError("y_test: length does not match number of test examples");
  const Eigen::VectorXd err = forward(params, x_test) - y_test;
  const double m = static_cast<double>(err.size());
  return {err.array().abs().sum() / m, err.squaredNorm() / m};
}

}  // namespace ddlab
