#pragma once

#include <Eigen/Core>

#include <string>
#include <vector>

#include "meanrev/panel.hpp"

namespace meanrev {

// A scalar basket series P_t = y^T x_t aligned with its source panel.
struct PortfolioSeries {
  std::vector<std::string> timestamps;
  Eigen::VectorXd values;
};

PortfolioSeries basket_series(const AssetPanel& panel,
                              const Eigen::VectorXd& weights);

// Ornstein-Uhlenbeck parameters at unit observation spacing:
//   dP = lambda (mu - P) dt + sigma dB,  lambda > 0, sigma2 = sigma^2 > 0.
struct OuParams {
  double mu = 0.0;
  double lambda = 0.0;
  double sigma2 = 0.0;
};

// AR(1) moment fit. mu is the sample mean; the lag-1 autocorrelation
//   r = sum_{t=2}^{T} (P_t - mu)(P_{t-1} - mu) / sum_{t=2}^{T} (P_{t-1} - mu)^2
// maps to lambda = -log r, and the innovation variance is rescaled to the
// continuous-time diffusion:
//   sigma2 = 2 lambda / ((1 - r^2)(T - 2)) * sum_{t=2}^{T} ((P_t-mu) - r (P_{t-1}-mu))^2.
// Throws ConstantSeries on zero variance and NonMeanReverting when r is
// outside (0, 1); the caller decides whether to continue without a fit.
OuParams fit_ou(const Eigen::VectorXd& values);
OuParams fit_ou(const PortfolioSeries& series);

}  // namespace meanrev
