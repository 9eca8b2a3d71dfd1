#pragma once

#include <span>
#include <vector>

#include "ddlab/csv.hpp"
#include "ddlab/gd_linear.hpp"
#include "ddlab/linear_model.hpp"

namespace ddlab {

struct CurveMinimum {
  long t = 0;
  double value = 0.0;
};

struct DoubleDescentReport {
  std::vector<CurveMinimum> minima;  // sorted by iteration
  bool is_double_descent = false;    // >= 2 detected minima
  CurveMinimum global_min;
};

// CSV with header t_min,value and a trailing double_descent=<bool> line.
csv::Table to_table(const DoubleDescentReport& report);

// Stepsize that parks the minimum of one U-curve at iteration t_target:
//   eta = (1/sigma^2) (1 - (r / (sigma^2 theta^2 + r))^{1/t_target}),
// with r the noise ratio sigma_noise^2 / n.
double optimal_stepsize_from_ratio(double sigma, double theta, double noise_over_n,
                                   double t_target);

// Minimum value of that U-curve; independent of t_target.
double u_min_from_ratio(double sigma, double theta, double noise_over_n);

// Schedule aligning the minima of all d U-curves at iteration t_target.
// t_target is continuous (> 0); integer epochs are the caller's rounding.
StepsizeSchedule optimal_stepsizes(const LinearModelSpec& spec, Eigen::Index n,
                                   double t_target);

double u_min_value(const LinearModelSpec& spec, Eigen::Index n,
                   Eigen::Index feature_index);

// Local-minimum scan over a sampled series. A point is a minimum when it is
// strictly below every sample within +-window (windows truncate at the
// edges; the first sample is never a candidate, the last one is when the
// series descends into it), and its rise to the lower flanking maximum
// exceeds prominence * (max - min) of the whole series.
DoubleDescentReport detect_double_descent(std::span<const long> record_points,
                                          std::span<const double> values,
                                          int window = 5, double prominence = 0.05);

DoubleDescentReport detect_double_descent(const RiskCurve& curve, int window = 5,
                                          double prominence = 0.05);

}  // namespace ddlab
