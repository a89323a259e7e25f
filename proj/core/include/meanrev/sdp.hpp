#pragma once

#include <Eigen/Core>

#include <optional>
#include <vector>

#include "meanrev/basket.hpp"
#include "meanrev/stats.hpp"

namespace meanrev::sdp {

// Feasibility slack accepted on the variance floor and PSD cone.
inline constexpr double kFeasTol = 1e-6;

// Below this top-two eigenvalue ratio the rank-one reading of Y is dubious
// and the recovery is flagged (diagnostic, not an error).
inline constexpr double kRankAmbiguityRatio = 10.0;

// min_Y  Tr(M Y) + rho * sum_ij |Y_ij|
// s.t.   Tr(A0 Y) >= nu,  Tr(Y) = 1,  Y PSD.
// rho >= 0 trades predictability for sparsity; nu >= 0 floors the basket
// variance so the minimizer cannot hide in a flat direction.
struct SdpProblem {
  Eigen::MatrixXd m;
  Eigen::MatrixXd a0;
  double rho = 0.0;
  double nu = 0.0;

  static SdpProblem from_covariance(const AutocovarianceSet& cov, double rho,
                                    double nu);
};

struct SolverOptions {
  double tol = 1e-7;      // stop when both residuals drop below this
  int max_iter = 20000;
  double penalty = 1.0;   // initial ADMM penalty sigma
  bool adapt_penalty = true;
  int adapt_every = 50;   // residual balancing and trace checkpoint stride
  std::optional<double> prune;  // basket recovery threshold; default relative
  bool record_spectra = false;  // capture iterate spectra at checkpoints
};

struct ResidualSample {
  int iteration = 0;
  double primal = 0.0;
  double dual = 0.0;
};

struct RecoveryInfo {
  double eigen_ratio = 0.0;  // top eigenvalue over second (inf when rank one)
  bool rank_ambiguous = false;
};

struct SdpSolution {
  Eigen::MatrixXd y_matrix;      // feasible iterate: PSD, unit trace
  double objective = 0.0;        // Tr(M Y) + rho * ||Y||_1
  double smooth_objective = 0.0; // Tr(M Y) alone
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  int iterations = 0;
  bool converged = false;        // false means max_iter hit, never a throw
  Eigen::VectorXd eigenvalues;   // spectrum of y_matrix, ascending
  BasketWeights basket;          // rank-one recovery of y_matrix
  RecoveryInfo recovery;
  std::vector<ResidualSample> residual_trace;
  std::vector<std::pair<int, Eigen::VectorXd>> spectra_trace;
};

// Euclidean projection onto the probability simplex {v >= 0, sum v = 1}.
Eigen::VectorXd project_simplex(const Eigen::VectorXd& v);

// Projection onto {Y PSD, Tr Y = 1}: eigendecompose and project the
// spectrum onto the simplex.
Eigen::MatrixXd project_spectahedron(const Eigen::MatrixXd& s);

// Projection onto {Y : Tr(A0 Y) >= nu} under the Frobenius inner product.
Eigen::MatrixXd project_halfspace(const Eigen::MatrixXd& s,
                                  const Eigen::MatrixXd& a0, double nu);

// Entrywise shrinkage sign(s) * max(|s| - tau, 0); prox of tau * ||.||_1.
Eigen::MatrixXd soft_threshold(const Eigen::MatrixXd& s, double tau);

// Two-block ADMM. The objective block is an exact soft-threshold prox; the
// constraint block projects onto the spectahedron intersected with the
// variance half-space via Dykstra's alternation, finishing on the
// spectahedron so the returned iterate is exactly PSD with unit trace.
// Throws Infeasible when nu exceeds the largest eigenvalue of a0.
SdpSolution solve(const SdpProblem& problem, const SolverOptions& opts = {});

// Top eigenvector of y_matrix with small entries pruned (threshold defaults
// to 1e-4 * max |entry|), renormalized under the sign convention. Fills
// `info` with the eigenvalue-ratio diagnostic when non-null.
BasketWeights recover_basket(const Eigen::MatrixXd& y_matrix,
                             const SdpProblem& problem,
                             std::optional<double> prune = std::nullopt,
                             RecoveryInfo* info = nullptr);

struct RhoSweepPoint {
  double rho = 0.0;
  int support_size = 0;
  double objective = 0.0;
  bool converged = false;
};

struct RhoSweepResult {
  std::vector<RhoSweepPoint> points;  // one per grid value, ascending rho
  double chosen_rho = 0.0;
  int achieved_support = 0;
  SdpSolution solution;  // the solve at chosen_rho
};

// {0, 0.05, ..., 0.5}
std::vector<double> default_rho_grid();

// Solves along the grid and picks the smallest rho whose support size is
// <= target_support; when no grid point reaches the target, the rho with
// the smallest support wins (ties to the smaller rho).
RhoSweepResult sweep_rho(const AutocovarianceSet& cov, double nu,
                         int target_support,
                         const std::vector<double>& grid = default_rho_grid(),
                         const SolverOptions& opts = {});

}  // namespace meanrev::sdp
