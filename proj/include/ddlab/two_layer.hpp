#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "ddlab/csv.hpp"

namespace ddlab {

// Width-k ReLU network f(x) = relu(x^T W) v / sqrt(k). No biases; the
// Jacobian below is hand-derived against exactly this parameterization.
struct TwoLayerParams {
  Eigen::MatrixXd w;  // d x k, first layer
  Eigen::VectorXd v;  // k, second layer
  double omega = 0.0;
  double nu = 0.0;

  Eigen::Index d() const { return w.rows(); }
  Eigen::Index k() const { return w.cols(); }
};

// W entries ~ N(0, omega^2), v entries uniform on {-nu, +nu}. Draw order:
// W column by column (neuron-major), then the k signs.
TwoLayerParams init_params(Eigen::Index d, Eigen::Index k, double omega, double nu,
                           std::uint64_t seed);

Eigen::VectorXd forward(const TwoLayerParams& params, const Eigen::MatrixXd& x_rows);

// n x (dk + k) Jacobian of the stacked predictions. Columns are vec(W) in
// neuron-major blocks (neuron r owns columns [r d, (r+1) d)), then v.
// relu'(0) = 1 (step-function convention).
Eigen::MatrixXd jacobian(const TwoLayerParams& params, const Eigen::MatrixXd& x_rows);

struct TestSet {
  Eigen::MatrixXd x;
  Eigen::VectorXd y;
};

struct TrainLog {
  std::vector<long> record_points;
  std::vector<double> train_mse;  // the objective 0.5 * sum of squared residuals
  std::vector<double> test_mae;
  std::vector<double> test_mse;
  bool has_test = false;
  std::vector<TwoLayerParams> snapshots;  // filled only when requested
  TwoLayerParams final_params;
};

// CSV with header t,train_mse,test_mae,test_mse (test columns are nan when
// no test set was supplied).
csv::Table to_table(const TrainLog& log);

// Full-batch gradient descent on 0.5 * sum_i (y_i - f(x_i))^2 with
// independent per-layer stepsizes and simultaneous updates: both gradients
// are evaluated at (W_t, v_t). A zero stepsize freezes that layer. Aborts
// with DivergenceError once the residual norm exceeds 1e6 x its initial
// value.
TrainLog train(const TwoLayerParams& init, const Eigen::MatrixXd& x_rows,
               const Eigen::VectorXd& y, double eta_w, double eta_v,
               std::span<const long> record_points, const TestSet* test_set = nullptr,
               bool keep_snapshots = false);

// (mean absolute error, mean squared error) over a non-empty test set.
std::pair<double, double> test_risk(const TwoLayerParams& params,
                                    const Eigen::MatrixXd& x_test,
                                    const Eigen::VectorXd& y_test);

}  // namespace ddlab
