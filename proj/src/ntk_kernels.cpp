#include "ddlab/ntk_kernels.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <cstdio>

#include "ddlab/errors.hpp"
#include "ddlab/rng.hpp"
#include "ddlab/two_layer.hpp"

namespace ddlab {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kClampTol = 1e-12;

double clamp_rho(double rho) {
  if (rho > 1.0 + kClampTol || rho < -1.0 - kClampTol)
    throw ConfigError("rho: inner product outside [-1, 1]");
  return std::min(1.0, std::max(-1.0, rho));
}

void check_unit_rows(const Eigen::MatrixXd& x_rows) {
  for (Eigen::Index i = 0; i < x_rows.rows(); ++i)
    if (std::abs(x_rows.row(i).norm() - 1.0) > 1e-8)
      throw ConfigError("x_rows: row " + std::to_string(i) +
                        " is not unit norm; the kernels assume normalized inputs");
}

}  // namespace

double kernel_k1(double rho) {
  const double r = clamp_rho(rho);
  return 0.5 * (1.0 - std::acos(r) / kPi) * r;
}

double kernel_k2(double rho) {
  const double r = clamp_rho(rho);
  return 0.5 * (std::sqrt(std::max(0.0, 1.0 - r * r)) / kPi +
                (1.0 - std::acos(r) / kPi) * r);
}

Eigen::MatrixXd gram_matrix(const Eigen::MatrixXd& x_rows, double omega, double nu) {
  check_unit_rows(x_rows);
  const Eigen::Index n = x_rows.rows();
  const Eigen::MatrixXd rho = x_rows * x_rows.transpose();
  Eigen::MatrixXd gram(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) {
      const double value =
          nu * nu * kernel_k1(rho(i, j)) + omega * omega * kernel_k2(rho(i, j));
      gram(i, j) = value;
      gram(j, i) = value;
    }
  }
  return gram;
}

Eigen::MatrixXd mc_gram_estimate(const Eigen::MatrixXd& x_rows, double omega, double nu,
                                 Eigen::Index k, int replicates, std::uint64_t seed) {
  check_unit_rows(x_rows);
  if (k < 1) throw ConfigError("k: width must be at least 1");
  if (replicates < 1) throw ConfigError("replicates: must be at least 1");
  const Eigen::Index n = x_rows.rows();
  const Eigen::Index d = x_rows.cols();
  Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(n, n);
  const Rng master(seed);
  for (int r = 0; r < replicates; ++r) {
    const TwoLayerParams params =
        init_params(d, k, omega, nu, master.split(static_cast<std::uint64_t>(r)).key());
    const Eigen::MatrixXd jac = jacobian(params, x_rows);
    sum.noalias() += jac * jac.transpose();
  }
  return sum / static_cast<double>(replicates);
}

GramSpectrum spectrum(const Eigen::MatrixXd& gram, const Eigen::VectorXd& y) {
  if (gram.rows() != gram.cols()) throw ConfigError("gram: matrix must be square");
  if (y.size() != gram.rows())
    throw ConfigError("y: length does not match gram dimension");
  const double asym = (gram - gram.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-10)
    throw ConfigError("gram: matrix is asymmetric beyond 1e-10");

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(gram);
  if (solver.info() != Eigen::Success)
    throw NumericalError("spectrum: eigendecomposition failed");

  const Eigen::Index n = gram.rows();
  GramSpectrum out;
  out.eigenvalues.resize(n);
  out.eigenvectors.resize(n, n);
  out.projections.resize(n);
  const double clamp = 1e-12 * std::abs(gram.trace());
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Index src = n - 1 - i;  // solver returns ascending order
    double value = solver.eigenvalues()[src];
    if (value < 0.0 && value >= -clamp) value = 0.0;
    out.eigenvalues[i] = value;
    out.eigenvectors.col(i) = solver.eigenvectors().col(src);
    out.projections[i] = out.eigenvectors.col(i).dot(y);
  }
  out.alpha = out.eigenvalues[n - 1];
  return out;
}

csv::Table gram_table(const Eigen::MatrixXd& gram) {
  csv::Table t;
  t.header = {"i", "j", "value"};
  for (Eigen::Index i = 0; i < gram.rows(); ++i)
    for (Eigen::Index j = 0; j < gram.cols(); ++j)
      t.rows.push_back({csv::format(static_cast<long>(i + 1)),
                        csv::format(static_cast<long>(j + 1)),
                        csv::format(gram(i, j))});
  return t;
}

csv::Table spectrum_table(const GramSpectrum& spec) {
  csv::Table t;
  t.header = {"i", "eigenvalue", "projection"};
  for (Eigen::Index i = 0; i < spec.n(); ++i)
    t.rows.push_back({csv::format(static_cast<long>(i + 1)),
                      csv::format(spec.eigenvalues[i]),
                      csv::format(spec.projections[i])});
  return t;
}

namespace {

void warn_stepsize(const GramSpectrum& spec, double eta) {
  if (spec.n() > 0 && eta * spec.eigenvalues[0] > 1.0)
    std::fprintf(stderr,
                 "warning: eta * largest eigenvalue exceeds 1; the spectral "
                 "bounds are outside their guaranteed regime\n");
}

void check_positive_spectrum(const GramSpectrum& spec) {
  if (spec.n() == 0 || spec.alpha <= 0.0)
    throw NumericalError("degenerate Gram: smallest eigenvalue is not positive");
}

}  // namespace

RiskBoundTerms risk_bound_terms(const GramSpectrum& spec, double eta, double t,
                                Eigen::Index n) {
  if (n < 1) throw ConfigError("n: must be at least 1");
  warn_stepsize(spec, eta);
  check_positive_spectrum(spec);
  double fit = 0.0;
  double move = 0.0;
  for (Eigen::Index i = 0; i < spec.n(); ++i) {
    const double b = 1.0 - eta * spec.eigenvalues[i];
    const double p2 = spec.projections[i] * spec.projections[i];
    const double bt = std::pow(b, t);
    fit += p2 * bt * bt;
    move += p2 * (1.0 - bt) * (1.0 - bt) / spec.eigenvalues[i];
  }
  const double inv_n = 1.0 / static_cast<double>(n);
  return {std::sqrt(inv_n * fit), std::sqrt(inv_n * move)};
}

double risk_bound(const GramSpectrum& spec, double eta, double t, Eigen::Index n,
                  double slack) {
  const RiskBoundTerms terms = risk_bound_terms(spec, eta, t, n);
  return terms.fit_term + terms.movement_term + slack;
}

double train_error_bound(const GramSpectrum& spec, double eta, double t, double slack) {
  warn_stepsize(spec, eta);
  double sum = 0.0;
  for (Eigen::Index i = 0; i < spec.n(); ++i) {
    const double bt = std::pow(1.0 - eta * spec.eigenvalues[i], t);
    sum += bt * bt * spec.projections[i] * spec.projections[i];
  }
  return std::sqrt(sum) + slack;
}

double param_distance_bound(const GramSpectrum& spec, double eta, double t,
                            double slack) {
  warn_stepsize(spec, eta);
  check_positive_spectrum(spec);
  double sum = 0.0;
  for (Eigen::Index i = 0; i < spec.n(); ++i) {
    const double g = 1.0 - std::pow(1.0 - eta * spec.eigenvalues[i], t);
    sum += spec.projections[i] * spec.projections[i] * g * g / spec.eigenvalues[i];
  }
  return std::sqrt(sum) + slack;
}

}  // namespace ddlab
