#include "meanrev/stats.hpp"

#include <Eigen/Eigenvalues>

#include <string>

#include "meanrev/errors.hpp"

namespace meanrev {

Eigen::MatrixXd autocovariance(const AssetPanel& panel, Eigen::Index k) {
  const Eigen::Index t = panel.rows();
  const Eigen::Index n = panel.cols();
  if (t < 2 || n < 1) {
    throw InvalidPanel("autocovariance needs a panel with T >= 2, n >= 1");
  }
  if (k < 0 || k > t - 2) {
    throw LagTooLarge("lag " + std::to_string(k) + " outside [0, " +
                      std::to_string(t - 2) + "] for T = " +
                      std::to_string(t));
  }
  const Eigen::RowVectorXd mean = panel.values.colwise().mean();
  const Eigen::MatrixXd centered = panel.values.rowwise() - mean;
  // sum_t x~_t x~_{t+k}^T over the T-k overlapping pairs, divided by T-k-1.
  Eigen::MatrixXd a =
      centered.topRows(t - k).transpose() * centered.bottomRows(t - k) /
      static_cast<double>(t - k - 1);
  if (k == 0) {
    a = ((a + a.transpose()) * 0.5).eval();
  }
  return a;
}

double default_ridge(const Eigen::MatrixXd& a0) {
  return 1e-8 * a0.trace() / static_cast<double>(a0.rows());
}

double pd_tolerance(const Eigen::MatrixXd& a0) {
  return 1e-12 * a0.trace() / static_cast<double>(a0.rows());
}

AutocovarianceSet estimate(const AssetPanel& panel,
                           std::optional<double> ridge) {
  AutocovarianceSet cov;
  Eigen::MatrixXd a0 = autocovariance(panel, 0);
  cov.ridge = ridge.value_or(default_ridge(a0));
  if (cov.ridge < 0.0) {
    throw SingularCovariance("ridge must be non-negative");
  }
  const double tolerance = pd_tolerance(a0);
  a0.diagonal().array() += cov.ridge;

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(
      a0, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw EigenFailure("eigensolver failed on the lag-0 autocovariance");
  }
  const double min_eig = solver.eigenvalues().minCoeff();
  if (min_eig <= tolerance) {
    throw SingularCovariance(
        "lag-0 autocovariance is singular: smallest eigenvalue " +
        std::to_string(min_eig) + " <= tolerance " +
        std::to_string(tolerance) + "; raise the ridge");
  }

  cov.a0 = std::move(a0);
  cov.a1 = autocovariance(panel, 1);
  cov.sample_mean = panel.values.colwise().mean();
  cov.sample_rows = panel.rows();
  return cov;
}

}  // namespace meanrev
