#include "meanrev/ou.hpp"

#include <cmath>
#include <string>

#include "meanrev/errors.hpp"
#include "text_io.hpp"

namespace meanrev {

PortfolioSeries basket_series(const AssetPanel& panel,
                              const Eigen::VectorXd& weights) {
  if (weights.size() != panel.cols()) {
    throw DimensionMismatch("basket has " + std::to_string(weights.size()) +
                            " weights for " + std::to_string(panel.cols()) +
                            " panel columns");
  }
  PortfolioSeries series;
  series.timestamps = panel.timestamps;
  series.values = panel.values * weights;
  return series;
}

OuParams fit_ou(const Eigen::VectorXd& values) {
  const Eigen::Index t = values.size();
  if (t < 3) {
    throw ConstantSeries("OU fit needs at least 3 observations, got " +
                         std::to_string(t));
  }
  if (!values.allFinite()) {
    throw ConstantSeries("OU fit input contains a non-finite value");
  }

  OuParams params;
  params.mu = values.mean();
  const Eigen::VectorXd centered = values.array() - params.mu;

  // Lag-1 regression through the mean over the T-1 adjacent pairs.
  const Eigen::Index pairs = t - 1;
  const double cross = centered.tail(pairs).dot(centered.head(pairs));
  const double lagged_ss = centered.head(pairs).squaredNorm();
  if (lagged_ss == 0.0) {
    throw ConstantSeries("series has zero variance about its mean");
  }
  const double r = cross / lagged_ss;
  if (!(r > 0.0) || !(r < 1.0)) {
    throw NonMeanReverting("lag-1 autocorrelation " +
                           detail::format_double(r) +
                           " is outside (0, 1); no positive reversion rate "
                           "exists");
  }
  params.lambda = -std::log(r);

  // Innovation sum of squares, rescaled from the exact AR(1) transition
  // variance sigma^2 (1 - e^{-2 lambda}) / (2 lambda) back to sigma^2.
  const double residual_ss =
      (centered.tail(pairs) - r * centered.head(pairs)).squaredNorm();
  params.sigma2 = 2.0 * params.lambda /
                  ((1.0 - r * r) * static_cast<double>(t - 2)) * residual_ss;
  if (!(params.sigma2 > 0.0) || !std::isfinite(params.sigma2)) {
    throw ConstantSeries("residual variance is not positive");
  }
  return params;
}

OuParams fit_ou(const PortfolioSeries& series) {
  return fit_ou(series.values);
}

}  // namespace meanrev
