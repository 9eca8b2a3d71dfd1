#include "ddlab/jacobian_split.hpp"

#include <Eigen/SVD>

#include "ddlab/errors.hpp"

namespace ddlab {

csv::Table to_table(const JacobianSplit& split) {
  csv::Table t;
  t.header = {"sigma", "norm_w_sq", "norm_v_sq"};
  for (const auto& row : split.rows)
    t.rows.push_back({csv::format(row.sigma), csv::format(row.norm_w_sq),
                      csv::format(row.norm_v_sq)});
  return t;
}

JacobianSplit layer_split_svd(const Eigen::MatrixXd& jac, Eigen::Index split_col) {
  if (split_col <= 0 || split_col >= jac.cols())
    throw ConfigError("split_col: partition boundary must lie inside the columns");
  if (jac.rows() > jac.cols())
    throw ConfigError("jac: expected a wide Jacobian (rows <= columns)");

  Eigen::BDCSVD<Eigen::MatrixXd> svd(jac, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.info() != Eigen::Success)
    throw NumericalError("layer_split_svd: SVD failed to converge");

  const Eigen::VectorXd& sigmas = svd.singularValues();
  const Eigen::MatrixXd& right = svd.matrixV();  // cols x rank, columns unit norm
  const double cutoff = sigmas.size() > 0 ? 1e-10 * sigmas[0] : 0.0;

  JacobianSplit split;
  split.rows.reserve(static_cast<std::size_t>(sigmas.size()));
  for (Eigen::Index i = 0; i < sigmas.size(); ++i) {
    SplitRow row;
    row.sigma = sigmas[i];
    row.norm_w_sq = right.col(i).head(split_col).squaredNorm();
    row.norm_v_sq = right.col(i).tail(right.rows() - split_col).squaredNorm();
    row.degenerate = sigmas[i] < cutoff;
    split.rows.push_back(row);
  }
  return split;
}

JacobianSplit layer_split_svd(const Eigen::MatrixXd& jac, Eigen::Index d,
                              Eigen::Index k) {
  if (jac.cols() != d * k + k)
    throw ConfigError("jac: column count does not equal d*k + k");
  return layer_split_svd(jac, d * k);
}

}  // namespace ddlab
