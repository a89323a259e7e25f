#include "meanrev/sdp.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "meanrev/errors.hpp"

namespace meanrev::sdp {

namespace {

constexpr double kDykstraTol = 1e-12;
constexpr int kDykstraMaxPass = 500;

Eigen::MatrixXd symmetrized(const Eigen::MatrixXd& s) {
  return (s + s.transpose()) * 0.5;
}

Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eigensolve(
    const Eigen::MatrixXd& s, const char* context) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(s);
  if (solver.info() != Eigen::Success) {
    throw EigenFailure(std::string("eigensolver failed in ") + context);
  }
  return solver;
}

// Alternating projections with Dykstra's correction terms onto
// spectahedron ∩ {Tr(A0 Y) >= nu}. The last step is always the
// spectahedron projection, so the result is exactly PSD with unit trace
// and misses the half-space by at most kDykstraTol in Frobenius norm.
Eigen::MatrixXd project_intersection(const Eigen::MatrixXd& input,
                                     const Eigen::MatrixXd& a0, double nu) {
  Eigen::MatrixXd x = symmetrized(input);
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(x.rows(), x.cols());
  Eigen::MatrixXd q = p;
  Eigen::MatrixXd y;
  for (int pass = 0; pass < kDykstraMaxPass; ++pass) {
    y = project_spectahedron(x + p);
    p = x + p - y;
    const Eigen::MatrixXd h = project_halfspace(y + q, a0, nu);
    q = y + q - h;
    if ((h - y).norm() <= kDykstraTol) {
      return y;
    }
    x = h;
  }
  return y;
}

}  // namespace

SdpProblem SdpProblem::from_covariance(const AutocovarianceSet& cov,
                                       double rho, double nu) {
  if (rho < 0.0 || nu < 0.0) {
    throw ConfigError("rho and nu must be non-negative");
  }
  SdpProblem problem;
  problem.m = predictability_matrix(cov);
  problem.a0 = cov.a0;
  problem.rho = rho;
  problem.nu = nu;
  return problem;
}

Eigen::VectorXd project_simplex(const Eigen::VectorXd& v) {
  const Eigen::Index n = v.size();
  if (n == 0) {
    throw DimensionMismatch("cannot project an empty vector");
  }
  std::vector<double> sorted(v.data(), v.data() + n);
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double running = 0.0;
  double theta = sorted[0] - 1.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    running += sorted[static_cast<std::size_t>(i)];
    const double candidate = (running - 1.0) / static_cast<double>(i + 1);
    if (sorted[static_cast<std::size_t>(i)] - candidate > 0.0) {
      theta = candidate;
    }
  }
  return (v.array() - theta).cwiseMax(0.0);
}

Eigen::MatrixXd project_spectahedron(const Eigen::MatrixXd& s) {
  if (s.rows() != s.cols() || s.rows() == 0) {
    throw DimensionMismatch("spectahedron projection needs a square matrix");
  }
  const auto solver = eigensolve(symmetrized(s), "project_spectahedron");
  const Eigen::VectorXd projected = project_simplex(solver.eigenvalues());
  return solver.eigenvectors() * projected.asDiagonal() *
         solver.eigenvectors().transpose();
}

Eigen::MatrixXd project_halfspace(const Eigen::MatrixXd& s,
                                  const Eigen::MatrixXd& a0, double nu) {
  if (s.rows() != a0.rows() || s.cols() != a0.cols() || s.rows() != s.cols()) {
    throw DimensionMismatch("half-space projection shapes do not match");
  }
  const double slack = nu - (a0.array() * s.array()).sum();
  if (slack <= 0.0) {
    return s;
  }
  const double scale = slack / a0.squaredNorm();
  return s + scale * a0;
}

Eigen::MatrixXd soft_threshold(const Eigen::MatrixXd& s, double tau) {
  if (tau < 0.0) {
    throw ConfigError("soft threshold must be non-negative");
  }
  return (s.array().sign() * (s.array().abs() - tau).cwiseMax(0.0)).matrix();
}

SdpSolution solve(const SdpProblem& problem, const SolverOptions& opts) {
  const Eigen::Index n = problem.m.rows();
  if (n == 0 || problem.m.cols() != n || problem.a0.rows() != n ||
      problem.a0.cols() != n) {
    throw DimensionMismatch("m and a0 must be square with equal order");
  }
  if (opts.max_iter < 1 || opts.tol <= 0.0 || opts.penalty <= 0.0 ||
      opts.adapt_every < 1) {
    throw ConfigError("solver options must be positive");
  }
  const Eigen::MatrixXd m = symmetrized(problem.m);
  const Eigen::MatrixXd a0 = symmetrized(problem.a0);

  const double a0_max = eigensolve(a0, "solve").eigenvalues().maxCoeff();
  if (problem.nu > a0_max) {
    throw Infeasible("variance floor " + std::to_string(problem.nu) +
                     " exceeds the achievable maximum " +
                     std::to_string(a0_max));
  }

  SdpSolution out;
  double sigma = opts.penalty;
  Eigen::MatrixXd z =
      Eigen::MatrixXd::Identity(n, n) / static_cast<double>(n);
  Eigen::MatrixXd u = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd y = z;

  for (int iter = 1; iter <= opts.max_iter; ++iter) {
    // Objective block: exact prox of <M, Y> + rho ||Y||_1.
    y = soft_threshold(z - u - m / sigma, problem.rho / sigma);
    y = symmetrized(y);

    const Eigen::MatrixXd z_prev = z;
    z = project_intersection(y + u, a0, problem.nu);
    u += y - z;

    out.primal_residual = (y - z).norm();
    out.dual_residual = sigma * (z - z_prev).norm();
    out.iterations = iter;

    const bool checkpoint = iter % opts.adapt_every == 0;
    if (checkpoint) {
      out.residual_trace.push_back(
          {iter, out.primal_residual, out.dual_residual});
      if (opts.record_spectra) {
        out.spectra_trace.emplace_back(
            iter, eigensolve(z, "solve").eigenvalues());
      }
    }
    if (out.primal_residual < opts.tol && out.dual_residual < opts.tol) {
      out.converged = true;
      break;
    }
    // Residual balancing keeps the two rates comparable; rescaling u keeps
    // the scaled dual variable consistent with the new penalty.
    if (opts.adapt_penalty && checkpoint) {
      if (out.primal_residual > 10.0 * out.dual_residual) {
        sigma *= 2.0;
        u *= 0.5;
      } else if (out.dual_residual > 10.0 * out.primal_residual) {
        sigma *= 0.5;
        u *= 2.0;
      }
    }
  }

  // Report the constraint-block iterate: exactly feasible by construction.
  out.y_matrix = z;
  out.smooth_objective = (m.array() * z.array()).sum();
  out.objective = out.smooth_objective + problem.rho * z.cwiseAbs().sum();
  out.eigenvalues = eigensolve(z, "solve").eigenvalues();
  if (out.residual_trace.empty() ||
      out.residual_trace.back().iteration != out.iterations) {
    out.residual_trace.push_back(
        {out.iterations, out.primal_residual, out.dual_residual});
  }
  out.basket = recover_basket(z, problem, opts.prune, &out.recovery);
  return out;
}

BasketWeights recover_basket(const Eigen::MatrixXd& y_matrix,
                             const SdpProblem& problem,
                             std::optional<double> prune,
                             RecoveryInfo* info) {
  const Eigen::Index n = y_matrix.rows();
  if (n == 0 || y_matrix.cols() != n) {
    throw DimensionMismatch("recover_basket needs a square matrix");
  }
  const auto solver = eigensolve(symmetrized(y_matrix), "recover_basket");
  const Eigen::VectorXd& eigenvalues = solver.eigenvalues();
  if (eigenvalues(0) < -kFeasTol) {
    throw Error("recover_basket input is not PSD within tolerance");
  }

  const double top = eigenvalues(n - 1);
  const double second = n > 1 ? std::max(eigenvalues(n - 2), 0.0) : 0.0;
  RecoveryInfo recovery;
  recovery.eigen_ratio = second > 0.0
                             ? top / second
                             : std::numeric_limits<double>::infinity();
  recovery.rank_ambiguous = recovery.eigen_ratio < kRankAmbiguityRatio;
  if (info != nullptr) {
    *info = recovery;
  }

  Eigen::VectorXd y = solver.eigenvectors().col(n - 1);
  const double threshold = prune.value_or(1e-4 * y.cwiseAbs().maxCoeff());
  for (Eigen::Index i = 0; i < n; ++i) {
    if (std::abs(y(i)) < threshold) {
      y(i) = 0.0;
    }
  }
  if (y.norm() == 0.0) {
    throw ZeroVector("pruning removed every basket entry; lower the "
                     "threshold");
  }
  return make_basket(std::move(y), problem.m, problem.a0);
}

std::vector<double> default_rho_grid() {
  std::vector<double> grid;
  for (int i = 0; i <= 10; ++i) {
    grid.push_back(0.05 * i);
  }
  return grid;
}

RhoSweepResult sweep_rho(const AutocovarianceSet& cov, double nu,
                         int target_support, const std::vector<double>& grid,
                         const SolverOptions& opts) {
  if (grid.empty()) {
    throw ConfigError("rho grid is empty");
  }
  if (target_support < 1) {
    throw ConfigError("target support must be at least 1");
  }
  std::vector<double> rhos = grid;
  std::sort(rhos.begin(), rhos.end());

  RhoSweepResult result;
  bool have_choice = false;
  bool choice_hits_target = false;
  for (const double rho : rhos) {
    SdpSolution solution = solve(SdpProblem::from_covariance(cov, rho, nu),
                                 opts);
    const int support = static_cast<int>(solution.basket.support.size());
    result.points.push_back(
        {rho, support, solution.objective, solution.converged});
    const bool hits = support <= target_support;
    // Smallest rho reaching the target wins; otherwise smallest support.
    const bool better =
        !have_choice ||
        (hits && !choice_hits_target) ||
        (hits == choice_hits_target && !hits &&
         support < result.achieved_support);
    if (better) {
      have_choice = true;
      choice_hits_target = hits;
      result.chosen_rho = rho;
      result.achieved_support = support;
      result.solution = std::move(solution);
    }
  }
  return result;
}

}  // namespace meanrev::sdp
