#include "meanrev/basket.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <string>

#include "meanrev/errors.hpp"

namespace meanrev {

namespace {

constexpr double kTieGap = 1e-10;

// Index of the largest-magnitude entry; the smallest index wins ties.
Eigen::Index leading_coordinate(const Eigen::VectorXd& y) {
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < y.size(); ++i) {
    if (std::abs(y(i)) > std::abs(y(best))) {
      best = i;
    }
  }
  return best;
}

}  // namespace

Eigen::MatrixXd predictability_matrix(const AutocovarianceSet& cov) {
  if (cov.a0.rows() != cov.a1.rows() || cov.a0.cols() != cov.a1.cols()) {
    throw DimensionMismatch("a0 and a1 must have identical shapes");
  }
  const Eigen::MatrixXd m =
      cov.a1 * cov.a0.ldlt().solve(cov.a1.transpose());
  return (m + m.transpose()) * 0.5;
}

double predictability(const Eigen::VectorXd& y, const Eigen::MatrixXd& m,
                      const Eigen::MatrixXd& a0) {
  if (y.size() != m.rows() || y.size() != a0.rows()) {
    throw DimensionMismatch("weight vector does not match matrix order");
  }
  if (y.norm() == 0.0) {
    throw ZeroVector("predictability of a zero basket is undefined");
  }
  const double denom = y.dot(a0 * y);
  if (denom <= 0.0) {
    throw SingularCovariance("basket variance is not positive");
  }
  const double value = y.dot(m * y) / denom;
  return value < 0.0 ? 0.0 : value;  // M is PSD; round-off can dip below
}

double predictability(const Eigen::VectorXd& y, const AutocovarianceSet& cov) {
  return predictability(y, predictability_matrix(cov), cov.a0);
}

Eigen::VectorXd apply_sign_convention(Eigen::VectorXd y) {
  const double norm = y.norm();
  if (norm == 0.0 || !std::isfinite(norm)) {
    throw ZeroVector("cannot normalize a zero or non-finite weight vector");
  }
  y /= norm;
  if (y(leading_coordinate(y)) < 0.0) {
    y = -y;
  }
  return y;
}

std::vector<Eigen::Index> support_of(const Eigen::VectorXd& y, double eps) {
  std::vector<Eigen::Index> support;
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    if (std::abs(y(i)) > eps) {
      support.push_back(i);
    }
  }
  return support;
}

BasketWeights make_basket(Eigen::VectorXd y, const Eigen::MatrixXd& m,
                          const Eigen::MatrixXd& a0) {
  BasketWeights basket;
  basket.weights = apply_sign_convention(std::move(y));
  basket.support = support_of(basket.weights);
  basket.predictability = predictability(basket.weights, m, a0);
  return basket;
}

BasketWeights closed_form_min(const AutocovarianceSet& cov) {
  const Eigen::Index n = cov.a0.rows();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> a0_eig(cov.a0);
  if (a0_eig.info() != Eigen::Success) {
    throw EigenFailure("eigensolver failed on a0");
  }
  if (a0_eig.eigenvalues().minCoeff() <= 0.0) {
    throw SingularCovariance("a0 is not positive definite; raise the ridge");
  }

  // Whiten: with y = A0^{-1/2} z the quotient becomes a plain Rayleigh
  // quotient of B = A0^{-1/2} M A0^{-1/2}.
  const Eigen::MatrixXd a0_isqrt =
      a0_eig.eigenvectors() *
      a0_eig.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() *
      a0_eig.eigenvectors().transpose();
  const Eigen::MatrixXd m = predictability_matrix(cov);
  Eigen::MatrixXd b = a0_isqrt * m * a0_isqrt;
  b = ((b + b.transpose()) * 0.5).eval();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> b_eig(b);
  if (b_eig.info() != Eigen::Success) {
    throw EigenFailure("eigensolver failed on the whitened matrix");
  }

  // Eigenvalues ascend; every vector within kTieGap of the bottom is a
  // candidate and the leading-coordinate rule picks one deterministically.
  const Eigen::VectorXd& eigenvalues = b_eig.eigenvalues();
  Eigen::Index pick = 0;
  Eigen::Index pick_coord = leading_coordinate(b_eig.eigenvectors().col(0));
  for (Eigen::Index i = 1;
       i < n && eigenvalues(i) - eigenvalues(0) < kTieGap; ++i) {
    const Eigen::Index coord = leading_coordinate(b_eig.eigenvectors().col(i));
    if (coord < pick_coord) {
      pick = i;
      pick_coord = coord;
    }
  }

  return make_basket(a0_isqrt * b_eig.eigenvectors().col(pick), m, cov.a0);
}

}  // namespace meanrev
