#pragma once

#include <Eigen/Core>
#include <cstdint>

#include "ddlab/csv.hpp"

namespace ddlab {

// Kernels of the infinite-width network at initialization, as functions of
// the inner product rho of two unit-norm inputs. K1 belongs to the first
// (hidden) layer, K2 to the output layer:
//   K1(rho) = (1 - acos(rho)/pi) rho / 2
//   K2(rho) = (sqrt(1 - rho^2)/pi + (1 - acos(rho)/pi) rho) / 2
// Inputs within 1e-12 of [-1, 1] are clamped; anything further out is an
// error.
double kernel_k1(double rho);
double kernel_k2(double rho);

// Gram matrix Sigma_ij = nu^2 K1(rho_ij) + omega^2 K2(rho_ij) with
// rho_ij = <x_i, x_j>. Every row of x must have unit norm (within 1e-8).
Eigen::MatrixXd gram_matrix(const Eigen::MatrixXd& x_rows, double omega, double nu);

// Brute-force oracle for gram_matrix: the entrywise mean of J J^T over
// `replicates` random width-k initializations, with J the network Jacobian
// of two_layer. Replicate r uses split(seed, r).
Eigen::MatrixXd mc_gram_estimate(const Eigen::MatrixXd& x_rows, double omega, double nu,
                                 Eigen::Index k, int replicates, std::uint64_t seed);

struct GramSpectrum {
  Eigen::VectorXd eigenvalues;   // descending; sigma_i^2
  Eigen::MatrixXd eigenvectors;  // columns u_i, matching order
  Eigen::VectorXd projections;   // <u_i, y>
  double alpha = 0.0;            // smallest eigenvalue
  Eigen::Index n() const { return eigenvalues.size(); }
};

// Full eigendecomposition of a symmetric matrix (asymmetry beyond 1e-10 is
// an error). Eigenvalues within 1e-12 * trace below zero are clamped to 0.
GramSpectrum spectrum(const Eigen::MatrixXd& gram, const Eigen::VectorXd& y);

// CSV serializations: i,j,value triplets and i,eigenvalue,projection rows.
csv::Table gram_table(const Eigen::MatrixXd& gram);
csv::Table spectrum_table(const GramSpectrum& spec);

// Spectral risk bound of gradient-descent training, the two radical terms
//   sqrt(1/n sum_i p_i^2 (1 - eta s_i)^{2t})
// + sqrt(1/n sum_i p_i^2 (1 - (1 - eta s_i)^t)^2 / s_i)
// with s_i the Gram eigenvalues and p_i the label projections. The
// unanchored additive slacks are excluded; pass `slack` to add a constant.
// Warns when eta * s_1 > 1; a zero eigenvalue is a degenerate-Gram error.
double risk_bound(const GramSpectrum& spec, double eta, double t, Eigen::Index n,
                  double slack = 0.0);
struct RiskBoundTerms {
  double fit_term = 0.0;       // non-increasing in t
  double movement_term = 0.0;  // non-decreasing in t
};
RiskBoundTerms risk_bound_terms(const GramSpectrum& spec, double eta, double t,
                                Eigen::Index n);

// sqrt(sum_i (1 - eta s_i)^{2t} p_i^2): residual-norm bound of the
// linearized dynamics (exact when the dynamics are genuinely linear).
double train_error_bound(const GramSpectrum& spec, double eta, double t,
                         double slack = 0.0);

// sqrt(sum_i p_i^2 (1 - (1 - eta s_i)^t)^2 / s_i): distance of the
// parameters from initialization under the same dynamics.
double param_distance_bound(const GramSpectrum& spec, double eta, double t,
                            double slack = 0.0);

}  // namespace ddlab
