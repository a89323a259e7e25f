#include "meanrev/backtest.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include "meanrev/errors.hpp"
#include "text_io.hpp"

namespace meanrev::backtest {

double position(const OuParams& params, double price, double wealth) {
  if (!(params.sigma2 > 0.0)) {
    throw ConstantSeries("position sizing needs sigma2 > 0");
  }
  return params.lambda * (params.mu - price) / params.sigma2 * wealth;
}

WealthPath run(const AssetPanel& test_panel, const BasketWeights& basket,
               const OuParams& params, const CostModel& cost,
               double initial_wealth) {
  if (basket.weights.size() != test_panel.cols()) {
    throw DimensionMismatch("basket weights do not match the panel");
  }
  if (cost.tc < 0.0 || cost.k < 1) {
    throw ConfigError("cost model needs tc >= 0 and k >= 1");
  }
  const Eigen::Index t_rows = test_panel.rows();
  if (t_rows < 1) {
    throw InvalidPanel("backtest panel is empty");
  }

  WealthPath path;
  path.initial_wealth = initial_wealth;
  path.timestamps = test_panel.timestamps;
  path.wealth.reserve(static_cast<std::size_t>(t_rows));
  path.positions.reserve(static_cast<std::size_t>(t_rows));
  path.costs.reserve(static_cast<std::size_t>(t_rows));
  path.pnl.reserve(static_cast<std::size_t>(t_rows));

  // The audit re-walk must reproduce these doubles bit for bit, so the
  // update is written exactly as documented: (w + pnl) - cost.
  const double rate = cost.tc * static_cast<double>(cost.k);
  double w = initial_wealth;
  double n_prev = 0.0;
  double p_prev = 0.0;
  for (Eigen::Index t = 0; t < t_rows; ++t) {
    const double p = test_panel.values.row(t).dot(basket.weights);
    const double pnl = t == 0 ? 0.0 : n_prev * (p - p_prev);
    const double pre_cost = w + pnl;
    const double n = position(params, p, pre_cost);
    const double fee = rate * std::abs(n - n_prev);
    w = pre_cost - fee;

    path.wealth.push_back(w);
    path.positions.push_back(n);
    path.costs.push_back(fee);
    path.pnl.push_back(pnl);
    n_prev = n;
    p_prev = p;
  }
  return path;
}

Summary summarize(const WealthPath& path) {
  Summary s;
  s.steps = static_cast<int>(path.wealth.size());
  s.initial_wealth = path.initial_wealth;
  if (path.wealth.empty()) {
    return s;
  }
  s.final_wealth = path.wealth.back();
  s.total_return = path.initial_wealth != 0.0
                       ? s.final_wealth / s.initial_wealth - 1.0
                       : 0.0;

  double peak = path.initial_wealth;
  double prev_n = 0.0;
  for (std::size_t t = 0; t < path.wealth.size(); ++t) {
    const double w = path.wealth[t];
    peak = std::max(peak, w);
    if (peak > 0.0) {
      s.max_drawdown = std::max(s.max_drawdown, (peak - w) / peak);
    }
    s.went_negative = s.went_negative || w < 0.0;
    s.total_pnl += path.pnl[t];
    s.total_costs += path.costs[t];
    s.turnover += std::abs(path.positions[t] - prev_n);
    prev_n = path.positions[t];
  }

  // Step pnl statistics exclude the t = 0 placeholder.
  const std::size_t m = path.pnl.size() - 1;
  if (m >= 1) {
    double mean = 0.0;
    for (std::size_t t = 1; t < path.pnl.size(); ++t) {
      mean += path.pnl[t];
    }
    mean /= static_cast<double>(m);
    s.mean_step_pnl = mean;
    if (m >= 2) {
      double ss = 0.0;
      for (std::size_t t = 1; t < path.pnl.size(); ++t) {
        ss += (path.pnl[t] - mean) * (path.pnl[t] - mean);
      }
      s.stdev_step_pnl = std::sqrt(ss / static_cast<double>(m - 1));
    }
  }
  return s;
}

void write_wealth_csv(std::ostream& out, const WealthPath& path) {
  out << "timestamp,wealth,position,cost,pnl\n";
  for (std::size_t t = 0; t < path.wealth.size(); ++t) {
    out << path.timestamps[t] << ',' << detail::format_double(path.wealth[t])
        << ',' << detail::format_double(path.positions[t]) << ','
        << detail::format_double(path.costs[t]) << ','
        << detail::format_double(path.pnl[t]) << '\n';
  }
}

void write_wealth_csv(const std::filesystem::path& file,
                      const WealthPath& path) {
  std::ofstream out(file);
  if (!out) {
    throw IoError("cannot write " + file.string());
  }
  write_wealth_csv(out, path);
}

WealthPath read_wealth_csv(std::istream& in, std::string_view name) {
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(in, line) ||
      detail::trim(line) != "timestamp,wealth,position,cost,pnl") {
    throw MalformedRow(std::string(name) +
                       " line 1: expected the wealth CSV header");
  }
  WealthPath path;
  while (std::getline(in, line)) {
    ++line_no;
    const auto cells = detail::split_csv(line);
    if (cells.size() != 5) {
      throw MalformedRow(std::string(name) + " line " +
                         std::to_string(line_no) + ": expected 5 cells");
    }
    double parsed[4];
    for (int j = 1; j <= 4; ++j) {
      const auto value = detail::parse_double(cells[static_cast<std::size_t>(j)]);
      if (!value || !std::isfinite(*value)) {
        throw MalformedRow(std::string(name) + " line " +
                           std::to_string(line_no) + ": cell " +
                           std::to_string(j + 1) + " is not a finite number");
      }
      parsed[j - 1] = *value;
    }
    path.timestamps.emplace_back(detail::trim(cells[0]));
    path.wealth.push_back(parsed[0]);
    path.positions.push_back(parsed[1]);
    path.costs.push_back(parsed[2]);
    path.pnl.push_back(parsed[3]);
  }
  if (path.wealth.empty()) {
    throw MalformedRow(std::string(name) + ": wealth CSV has no data rows");
  }
  path.initial_wealth = path.wealth[0] + path.costs[0];
  return path;
}

WealthPath read_wealth_csv(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) {
    throw IoError("cannot open " + file.string());
  }
  return read_wealth_csv(in, file.string());
}

bool audit(const WealthPath& path) {
  if (path.wealth.empty()) {
    return false;
  }
  double w = path.wealth[0];
  for (std::size_t t = 1; t < path.wealth.size(); ++t) {
    w = (w + path.pnl[t]) - path.costs[t];
    if (w != path.wealth[t]) {
      return false;
    }
  }
  return true;
}

}  // namespace meanrev::backtest
