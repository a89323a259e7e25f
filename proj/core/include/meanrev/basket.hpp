#pragma once

#include <Eigen/Core>

#include <vector>

#include "meanrev/stats.hpp"

namespace meanrev {

// Entries with |w_i| at or below this threshold do not count as support.
inline constexpr double kSupportEpsilon = 1e-6;

// A portfolio weight vector under the canonical normalization: unit l2 norm
// with the largest-magnitude entry positive.
struct BasketWeights {
  Eigen::VectorXd weights;
  std::vector<Eigen::Index> support;  // indices with |w_i| > kSupportEpsilon
  double predictability = 0.0;        // Rayleigh quotient at `weights`
};

// M = A1 A0^{-1} A1^T, symmetrized. The one-step predictability of basket y
// is the Rayleigh quotient y^T M y / y^T A0 y.
Eigen::MatrixXd predictability_matrix(const AutocovarianceSet& cov);

// Rayleigh quotient clamped at zero (M is PSD; round-off can dip below).
// Throws ZeroVector when y has zero norm.
double predictability(const Eigen::VectorXd& y, const Eigen::MatrixXd& m,
                      const Eigen::MatrixXd& a0);
double predictability(const Eigen::VectorXd& y, const AutocovarianceSet& cov);

// Scales to unit norm and flips sign so the largest-magnitude entry is
// positive (smallest index wins a magnitude tie). Throws ZeroVector.
Eigen::VectorXd apply_sign_convention(Eigen::VectorXd y);

std::vector<Eigen::Index> support_of(const Eigen::VectorXd& y,
                                     double eps = kSupportEpsilon);

// Normalizes y and packages it with its support and predictability.
BasketWeights make_basket(Eigen::VectorXd y, const Eigen::MatrixXd& m,
                          const Eigen::MatrixXd& a0);

// Global minimizer of the predictability quotient: whiten with A0^{-1/2}
// (symmetric eigendecomposition), take the eigenvector of the smallest
// eigenvalue of A0^{-1/2} M A0^{-1/2}, and map back. When the two smallest
// eigenvalues are within 1e-10 every candidate in the tied cluster is
// considered and the one whose largest-magnitude coordinate has the smallest
// index is chosen, making the result deterministic.
BasketWeights closed_form_min(const AutocovarianceSet& cov);

}  // namespace meanrev
