#pragma once

#include <Eigen/Core>

#include <optional>

#include "meanrev/panel.hpp"

namespace meanrev {

// Lag-0 and lag-1 autocovariance estimates of a panel. a0 includes the ridge
// on its diagonal and is symmetric positive definite; a1 is the raw lag-1
// estimate (not symmetric in general).
struct AutocovarianceSet {
  Eigen::MatrixXd a0;
  Eigen::MatrixXd a1;
  double ridge = 0.0;
  Eigen::VectorXd sample_mean;
  Eigen::Index sample_rows = 0;
};

// Sample lag-k autocovariance about the full-sample mean:
//   A_k = 1/(T-k-1) * sum_{t=1}^{T-k} (x_t - xbar)(x_{t+k} - xbar)^T.
// The k = 0 result is symmetrized to cancel round-off asymmetry.
// Throws LagTooLarge unless 0 <= k <= T-2.
Eigen::MatrixXd autocovariance(const AssetPanel& panel, Eigen::Index k);

// Relative default ridge, 1e-8 * trace(a0)/n, and the positive-definiteness
// tolerance 1e-12 * trace(a0)/n used by estimate(). Both scale with the
// panel so that rescaling the data rescales them identically.
double default_ridge(const Eigen::MatrixXd& a0);
double pd_tolerance(const Eigen::MatrixXd& a0);

// Computes both autocovariances and applies ridge regularization to a0
// (default_ridge when `ridge` is unset). Throws SingularCovariance when the
// smallest eigenvalue of the ridged a0 is at or below pd_tolerance of the
// raw estimate.
AutocovarianceSet estimate(const AssetPanel& panel,
                           std::optional<double> ridge = std::nullopt);

}  // namespace meanrev
