#pragma once

#include <Eigen/Core>
#include <vector>

#include "ddlab/csv.hpp"

namespace ddlab {

// Per-singular-vector attribution: how much of each right singular vector
// of a Jacobian lives in the first-layer columns versus the second-layer
// columns.
struct SplitRow {
  double sigma = 0.0;
  double norm_w_sq = 0.0;
  double norm_v_sq = 0.0;
  bool degenerate = false;  // sigma < 1e-10 * sigma_max: split is ill-conditioned
};

struct JacobianSplit {
  std::vector<SplitRow> rows;  // descending by sigma
};

// CSV with header sigma,norm_w_sq,norm_v_sq.
csv::Table to_table(const JacobianSplit& split);

// Thin SVD of `jac` with the column space partitioned at `split_col`: the
// first split_col columns belong to one block of weights, the rest to the
// other. Works for any such partition, not only the two-layer dk | k one.
JacobianSplit layer_split_svd(const Eigen::MatrixXd& jac, Eigen::Index split_col);

// Two-layer convenience: columns are vec(W) then v, so the boundary is d*k.
JacobianSplit layer_split_svd(const Eigen::MatrixXd& jac, Eigen::Index d,
                              Eigen::Index k);

}  // namespace ddlab
