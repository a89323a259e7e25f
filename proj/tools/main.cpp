// Command line front end: parses flags, overlays them onto the config file
// and environment, and dispatches to the library commands.

#include <CLI11.hpp>

#include <cstdlib>
#include <exception>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "meanrev/cli.hpp"
#include "meanrev/errors.hpp"
#include "meanrev/version.hpp"

namespace {

using meanrev::cli::RunConfig;

// Flag values parsed as optionals so that only flags the user actually
// passed override the config file.
struct Flags {
  std::optional<std::string> config_file;
  std::optional<std::string> input;
  std::optional<std::string> output_dir;
  std::optional<std::string> report_out;
  std::optional<double> train_fraction;
  std::optional<std::string> split_at;
  std::optional<double> ridge;
  std::optional<double> rho;
  std::optional<double> nu;
  std::optional<int> target_support;
  std::optional<double> prune;
  std::optional<double> tol;
  std::optional<int> max_iter;
  bool debug = false;
  std::vector<double> tc;
  std::optional<double> initial_wealth;
  std::optional<std::uint64_t> seed;

  std::optional<int> assets;
  std::optional<int> rows;
  std::optional<double> noise_scale;
  std::optional<std::string> transition_csv;
  std::vector<double> diag;
  bool no_mix = false;
  std::optional<double> radius_lo;
  std::optional<double> radius_hi;
};

void add_io_flags(CLI::App* cmd, Flags& flags) {
  cmd->add_option("--config", flags.config_file, "JSON config file");
  cmd->add_option("-o,--out-dir", flags.output_dir,
                  "output directory (also MEANREV_OUTPUT_DIR)");
}

void add_input_flag(CLI::App* cmd, Flags& flags) {
  cmd->add_option("-i,--input", flags.input, "input CSV");
}

void add_solver_flags(CLI::App* cmd, Flags& flags) {
  cmd->add_option("--ridge", flags.ridge, "covariance ridge (default: relative)");
  cmd->add_option("--rho", flags.rho, "l1 penalty weight");
  cmd->add_option("--nu", flags.nu, "variance floor");
  cmd->add_option("--target-support", flags.target_support,
                  "sweep rho for a basket of at most this many names");
  cmd->add_option("--prune", flags.prune, "basket pruning threshold");
  cmd->add_option("--tol", flags.tol, "solver tolerance");
  cmd->add_option("--max-iter", flags.max_iter, "solver iteration cap");
  cmd->add_flag("--debug", flags.debug, "export residual and spectrum traces");
}

RunConfig assemble(const Flags& flags, bool debug_flag_passed) {
  RunConfig config;
  if (flags.config_file) {
    config = meanrev::cli::load_config(*flags.config_file, config);
  }
  if (const char* env = std::getenv("MEANREV_OUTPUT_DIR");
      env != nullptr && *env != '\0') {
    config.output_dir = env;
  }

  auto take = [](auto& dst, const auto& src) {
    if (src) {
      dst = *src;
    }
  };
  take(config.input, flags.input);
  take(config.output_dir, flags.output_dir);
  take(config.report_out, flags.report_out);
  take(config.train_fraction, flags.train_fraction);
  take(config.split_at, flags.split_at);
  take(config.ridge, flags.ridge);
  take(config.rho, flags.rho);
  take(config.nu, flags.nu);
  take(config.target_support, flags.target_support);
  take(config.prune, flags.prune);
  take(config.tol, flags.tol);
  take(config.max_iter, flags.max_iter);
  if (debug_flag_passed) {
    config.debug = flags.debug;
  }
  if (!flags.tc.empty()) {
    config.tc = flags.tc;
  }
  take(config.initial_wealth, flags.initial_wealth);
  take(config.seed, flags.seed);

  take(config.synth.assets, flags.assets);
  take(config.synth.rows, flags.rows);
  take(config.synth.noise_scale, flags.noise_scale);
  take(config.synth.transition_csv, flags.transition_csv);
  if (!flags.diag.empty()) {
    config.synth.diag = flags.diag;
  }
  if (flags.no_mix) {
    config.synth.mix = false;
  }
  take(config.synth.radius_lo, flags.radius_lo);
  take(config.synth.radius_hi, flags.radius_hi);
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sparse mean-reverting basket construction and backtesting"};
  app.set_version_flag("--version", meanrev::kVersion);
  app.require_subcommand(1);
  Flags flags;

  CLI::App* synth = app.add_subcommand(
      "synth", "generate a synthetic VAR(1) panel");
  add_io_flags(synth, flags);
  synth->add_option("-n,--assets", flags.assets, "number of series");
  synth->add_option("-T,--rows", flags.rows, "number of observations");
  synth->add_option("--noise", flags.noise_scale, "innovation scale");
  synth->add_option("--seed", flags.seed, "RNG seed");
  synth->add_option("--transition-csv", flags.transition_csv,
                    "read the transition matrix from a CSV");
  synth->add_option("--diag", flags.diag,
                    "transition eigenvalues (comma separated)")
      ->delimiter(',');
  synth->add_flag("--no-mix", flags.no_mix,
                  "keep the transition diagonal (no random rotation)");
  synth->add_option("--radius-lo", flags.radius_lo,
                    "smallest default eigenvalue");
  synth->add_option("--radius-hi", flags.radius_hi,
                    "largest default eigenvalue");

  CLI::App* estimate = app.add_subcommand(
      "estimate", "estimate lag-0/lag-1 autocovariances");
  add_io_flags(estimate, flags);
  add_input_flag(estimate, flags);
  estimate->add_option("--ridge", flags.ridge, "covariance ridge");

  CLI::App* optimize = app.add_subcommand(
      "optimize", "solve for dense and sparse baskets");
  add_io_flags(optimize, flags);
  add_input_flag(optimize, flags);
  add_solver_flags(optimize, flags);

  CLI::App* backtest = app.add_subcommand(
      "backtest", "split, fit and run the contrarian strategy");
  add_io_flags(backtest, flags);
  add_input_flag(backtest, flags);
  add_solver_flags(backtest, flags);
  backtest->add_option("--train-fraction", flags.train_fraction,
                       "train share of rows, in (0,1)");
  backtest->add_option("--split-at", flags.split_at,
                       "last train date (overrides --train-fraction)");
  backtest->add_option("--tc", flags.tc,
                       "transaction cost rates (comma separated)")
      ->delimiter(',');
  backtest->add_option("--initial-wealth", flags.initial_wealth,
                       "starting wealth");

  CLI::App* report = app.add_subcommand(
      "report", "summarize and audit a wealth CSV");
  add_input_flag(report, flags);
  report->add_option("--config", flags.config_file, "JSON config file");
  report->add_option("--out", flags.report_out,
                     "write the report here instead of stdout");

  CLI11_PARSE(app, argc, argv);

  try {
    CLI::App* cmd = app.get_subcommands().front();
    const CLI::Option* dbg = cmd->get_option_no_throw("--debug");
    const RunConfig config = assemble(flags, dbg != nullptr && dbg->count() > 0);
    if (cmd == synth) {
      meanrev::cli::cmd_synth(config);
    } else if (cmd == estimate) {
      meanrev::cli::cmd_estimate(config);
    } else if (cmd == optimize) {
      meanrev::cli::cmd_optimize(config);
    } else if (cmd == backtest) {
      meanrev::cli::cmd_backtest(config);
    } else {
      meanrev::cli::cmd_report(config);
    }
  } catch (const meanrev::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
