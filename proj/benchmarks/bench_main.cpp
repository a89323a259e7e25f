// Microbenchmarks over a realistic 12-asset panel.

#include <benchmark/benchmark.h>

#include <Eigen/Core>

#include "meanrev/backtest.hpp"
#include "meanrev/basket.hpp"
#include "meanrev/ou.hpp"
#include "meanrev/panel.hpp"
#include "meanrev/sdp.hpp"
#include "meanrev/stats.hpp"

namespace {

using namespace meanrev;

const AssetPanel& fixture_panel() {
  static const AssetPanel panel = [] {
    Eigen::MatrixXd transition =
        Eigen::VectorXd::LinSpaced(12, 0.90, 0.995).asDiagonal();
    return synth_var1(12, 2558, transition, 0.25, 20240901);
  }();
  return panel;
}

const AutocovarianceSet& fixture_cov() {
  static const AutocovarianceSet cov = estimate(fixture_panel());
  return cov;
}

void BM_Autocovariance(benchmark::State& state) {
  const auto& panel = fixture_panel();
  const auto k = static_cast<Eigen::Index>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(autocovariance(panel, k));
  }
}
BENCHMARK(BM_Autocovariance)->Arg(0)->Arg(1);

void BM_ClosedFormMin(benchmark::State& state) {
  const auto& cov = fixture_cov();
  for (auto _ : state) {
    benchmark::DoNotOptimize(closed_form_min(cov));
  }
}
BENCHMARK(BM_ClosedFormMin);

void BM_ProjectSpectahedron(benchmark::State& state) {
  const auto n = static_cast<Eigen::Index>(state.range(0));
  Eigen::MatrixXd s = Eigen::MatrixXd::Random(n, n);
  s = (s + s.transpose()).eval();
  for (auto _ : state) {
    benchmark::DoNotOptimize(sdp::project_spectahedron(s));
  }
}
BENCHMARK(BM_ProjectSpectahedron)->Arg(4)->Arg(12)->Arg(32);

void BM_SdpSolve(benchmark::State& state) {
  const auto problem =
      sdp::SdpProblem::from_covariance(fixture_cov(), 0.2, 0.1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(sdp::solve(problem));
  }
}
BENCHMARK(BM_SdpSolve)->Unit(benchmark::kMillisecond);

void BM_FitOu(benchmark::State& state) {
  const auto basket = closed_form_min(fixture_cov());
  const auto series = basket_series(fixture_panel(), basket.weights);
  for (auto _ : state) {
    benchmark::DoNotOptimize(fit_ou(series));
  }
}
BENCHMARK(BM_FitOu);

void BM_BacktestRun(benchmark::State& state) {
  const auto& panel = fixture_panel();
  const auto basket = closed_form_min(fixture_cov());
  const auto params = fit_ou(basket_series(panel, basket.weights));
  const backtest::CostModel cost{0.0008,
                                 static_cast<int>(basket.support.size())};
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        backtest::run(panel, basket, params, cost, 100.0));
  }
}
BENCHMARK(BM_BacktestRun);

}  // namespace

BENCHMARK_MAIN();
