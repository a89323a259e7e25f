#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "meanrev/basket.hpp"
#include "meanrev/ou.hpp"
#include "meanrev/panel.hpp"

namespace meanrev::backtest {

// Proportional cost model: a rebalance from N_{t-1} to N_t costs
// tc * k * |N_t - N_{t-1}|, with k the number of names traded (basket
// support size) and N_{-1} = 0 so entering the initial position pays.
struct CostModel {
  double tc = 0.0;  // per-name proportional rate, >= 0
  int k = 1;        // >= 1
};

// Per-step record of a backtest. wealth[t] is post-cost: the recursion is
//   W_t = (W_{t-1} + pnl_t) - cost_t,  pnl_t = N_{t-1} (P_t - P_{t-1}),
// evaluated left to right in exactly that order, with pnl_0 = 0 and
// W_{-1} = initial_wealth. Re-walking the stored columns with the same
// expression reproduces wealth[] bit for bit.
struct WealthPath {
  std::vector<std::string> timestamps;
  std::vector<double> wealth;
  std::vector<double> positions;  // N_t, sized on pre-cost wealth at t
  std::vector<double> costs;
  std::vector<double> pnl;
  double initial_wealth = 0.0;
};

// Contrarian sizing: N = lambda (mu - P) / sigma2 * W.
double position(const OuParams& params, double price, double wealth);

// Marks the basket to the test panel and runs the wealth recursion with
// parameters frozen at their training-fit values.
WealthPath run(const AssetPanel& test_panel, const BasketWeights& basket,
               const OuParams& params, const CostModel& cost,
               double initial_wealth);

struct Summary {
  double initial_wealth = 0.0;
  double final_wealth = 0.0;
  double total_return = 0.0;   // final/initial - 1
  double max_drawdown = 0.0;   // fractional, against the running peak
  double total_pnl = 0.0;
  double total_costs = 0.0;
  double turnover = 0.0;       // sum |N_t - N_{t-1}|, N_{-1} = 0
  double mean_step_pnl = 0.0;  // over t >= 1
  double stdev_step_pnl = 0.0;
  int steps = 0;
  bool went_negative = false;
};

Summary summarize(const WealthPath& path);

// CSV columns: timestamp,wealth,position,cost,pnl; shortest round-trip
// number formatting, so read(write(p)) preserves every double bit for bit.
void write_wealth_csv(std::ostream& out, const WealthPath& path);
void write_wealth_csv(const std::filesystem::path& file,
                      const WealthPath& path);
// initial_wealth is reconstructed as wealth[0] + costs[0].
WealthPath read_wealth_csv(std::istream& in, std::string_view name = "input");
WealthPath read_wealth_csv(const std::filesystem::path& file);

// True iff the stored wealth column satisfies the recursion above bit for
// bit when re-walked from wealth[0].
bool audit(const WealthPath& path);

}  // namespace meanrev::backtest
