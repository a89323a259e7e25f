#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <vector>

#include <meanrev/errors.hpp>
#include <meanrev/ou.hpp>
#include <meanrev/random.hpp>

#include "helpers.hpp"

using meanrev::GaussianStream;
using meanrev::OuParams;
using Eigen::VectorXd;

namespace {

// Exact discretization of an OU process at unit spacing: AR(1) with
// autocorrelation r and innovation standard deviation innov_sd, started
// from the stationary law.
VectorXd simulate_ar1(Eigen::Index t, double mu, double r, double innov_sd,
                      std::uint64_t seed) {
  GaussianStream g(seed);
  VectorXd p(t);
  p(0) = mu + innov_sd / std::sqrt(1.0 - r * r) * g.next();
  for (Eigen::Index i = 1; i < t; ++i)
    p(i) = mu + r * (p(i - 1) - mu) + innov_sd * g.next();
  return p;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

TEST_CASE("simulated reverting series recovers its generator") {
  const double r = 0.8;
  const double lambda_true = -std::log(r);                       // 0.22314...
  const double sigma2_true = 2.0 * lambda_true * 0.01 / (1.0 - r * r);

  const VectorXd p = simulate_ar1(100000, 2.0, r, 0.1, 2024);
  const OuParams fit = meanrev::fit_ou(p);

  CHECK(std::abs(fit.lambda - lambda_true) < 0.01);
  CHECK(std::abs(fit.sigma2 - sigma2_true) < 0.01 * sigma2_true);
  CHECK(std::abs(fit.mu - 2.0) < 0.01);
  CHECK(fit.lambda > 0.0);
  CHECK(fit.sigma2 > 0.0);
}

TEST_CASE("estimation error shrinks with sample size") {
  const double lambda_true = -std::log(0.8);
  std::vector<double> err_small;
  std::vector<double> err_large;
  for (std::uint64_t seed = 100; seed < 110; ++seed) {
    const OuParams small =
        meanrev::fit_ou(simulate_ar1(1000, 0.0, 0.8, 0.1, seed));
    const OuParams large =
        meanrev::fit_ou(simulate_ar1(100000, 0.0, 0.8, 0.1, seed));
    err_small.push_back(std::abs(small.lambda - lambda_true));
    err_large.push_back(std::abs(large.lambda - lambda_true));
  }
  CHECK(median(err_small) > median(err_large));
}

TEST_CASE("degenerate inputs are rejected") {
  CHECK_THROWS_AS(meanrev::fit_ou(VectorXd::Constant(50, 3.25)),
                  meanrev::ConstantSeries);
  CHECK_THROWS_AS(meanrev::fit_ou(VectorXd::Zero(2)), meanrev::ConstantSeries);

  VectorXd with_nan = VectorXd::LinSpaced(10, 0.0, 1.0);
  with_nan(4) = std::nan("");
  CHECK_THROWS_AS(meanrev::fit_ou(with_nan), meanrev::ConstantSeries);
}

TEST_CASE("series without positive reversion are rejected") {
  SUBCASE("geometric growth pushes the autocorrelation to one or above") {
    VectorXd p(400);
    for (Eigen::Index i = 0; i < p.size(); ++i)
      p(i) = std::pow(1.05, static_cast<double>(i));
    CHECK_THROWS_WITH_AS(meanrev::fit_ou(p),
                         doctest::Contains("outside (0, 1)"),
                         meanrev::NonMeanReverting);
  }

  SUBCASE("alternating series has negative autocorrelation") {
    VectorXd p(40);
    for (Eigen::Index i = 0; i < p.size(); ++i) p(i) = (i % 2 == 0) ? 1.0 : -1.0;
    CHECK_THROWS_AS(meanrev::fit_ou(p), meanrev::NonMeanReverting);
  }
}

TEST_CASE("shifting the series moves only the mean") {
  const VectorXd p = simulate_ar1(2000, 0.0, 0.8, 0.1, 5);
  const OuParams base = meanrev::fit_ou(p);
  const OuParams shifted = meanrev::fit_ou(p.array() + 7.25);

  CHECK(std::abs(shifted.mu - base.mu - 7.25) < 1e-9);
  CHECK(std::abs(shifted.lambda - base.lambda) <= 1e-12 * base.lambda);
  CHECK(std::abs(shifted.sigma2 - base.sigma2) <= 1e-12 * base.sigma2);
}

TEST_CASE("rescaling the series scales the diffusion quadratically") {
  const double c = 3.7;
  const VectorXd p = simulate_ar1(2000, 2.0, 0.8, 0.1, 6);
  const OuParams base = meanrev::fit_ou(p);
  const OuParams scaled = meanrev::fit_ou(c * p);

  CHECK(std::abs(scaled.mu - c * base.mu) <= 1e-12 * std::abs(c * base.mu));
  CHECK(std::abs(scaled.lambda - base.lambda) <= 1e-12 * base.lambda);
  CHECK(std::abs(scaled.sigma2 - c * c * base.sigma2) <=
        1e-12 * c * c * base.sigma2);
}

TEST_CASE("basket series projects the panel onto the weights") {
  Eigen::MatrixXd values(4, 3);
  values << 1.0, 2.0, 3.0,
            0.5, -1.0, 2.0,
            -2.0, 0.25, 1.0,
            4.0, 1.0, -0.5;
  const meanrev::AssetPanel panel = testutil::make_panel(values);

  Eigen::VectorXd weights(3);
  weights << 1.0, -1.0, 0.5;
  const meanrev::PortfolioSeries series = meanrev::basket_series(panel, weights);

  REQUIRE(series.values.size() == 4);
  CHECK(series.timestamps == panel.timestamps);
  for (Eigen::Index t = 0; t < 4; ++t) {
    const double expected = values.row(t) * weights;
    CHECK(std::abs(series.values(t) - expected) < 1e-15);
  }

  Eigen::VectorXd wrong(4);
  wrong.setOnes();
  CHECK_THROWS_WITH_AS(meanrev::basket_series(panel, wrong),
                       doctest::Contains("4 weights for 3"),
                       meanrev::DimensionMismatch);
}

TEST_CASE("series overload matches the raw fit") {
  const VectorXd p = simulate_ar1(500, 1.0, 0.8, 0.1, 9);
  meanrev::PortfolioSeries series;
  series.values = p;
  for (Eigen::Index i = 0; i < p.size(); ++i)
    series.timestamps.push_back(testutil::iso_date(16436 + i));

  const OuParams a = meanrev::fit_ou(p);
  const OuParams b = meanrev::fit_ou(series);
  CHECK(a.mu == b.mu);
  CHECK(a.lambda == b.lambda);
  CHECK(a.sigma2 == b.sigma2);
}
