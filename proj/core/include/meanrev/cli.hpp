#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace meanrev::cli {

// Synthetic panel generation knobs. When neither transition_csv nor diag is
// given the transition is diag(linspace(radius_lo, radius_hi, n)), optionally
// conjugated by a seeded random rotation so the baskets are non-trivial.
struct SynthConfig {
  int assets = 4;
  int rows = 1000;
  double noise_scale = 0.25;
  std::optional<std::filesystem::path> transition_csv;
  std::vector<double> diag;
  bool mix = true;
  double radius_lo = 0.90;
  double radius_hi = 0.99;
};

// One bag of settings for every verb; each verb reads the fields it needs.
// Precedence: command-line flag > MEANREV_OUTPUT_DIR (output_dir only) >
// config file > built-in default.
struct RunConfig {
  std::filesystem::path input;
  std::filesystem::path output_dir = ".";
  std::optional<std::filesystem::path> report_out;  // report verb, else stdout

  double train_fraction = 0.9;
  std::optional<std::string> split_at;  // boundary date, overrides fraction

  std::optional<double> ridge;  // unset -> relative default

  double rho = 0.2;
  double nu = 0.1;
  std::optional<int> target_support;  // set -> sweep the rho grid
  std::optional<double> prune;
  double tol = 1e-7;
  int max_iter = 20000;
  bool debug = false;  // export residual and spectrum traces

  std::vector<double> tc = {0.0, 0.0004, 0.0008, 0.0012, 0.0016};
  double initial_wealth = 100.0;

  std::uint64_t seed = 12345;
  SynthConfig synth;
};

// Overlays the JSON file onto `base`. Unknown keys throw ConfigError.
RunConfig load_config(const std::filesystem::path& json_file,
                      RunConfig base = {});

// Commands throw meanrev::Error subtypes; the binary maps them to stderr
// text and a non-zero exit code. Each writes a manifest.json echoing the
// full configuration (no clocks or hostnames, so reruns are byte-identical).
void cmd_synth(const RunConfig& config);
void cmd_estimate(const RunConfig& config);
void cmd_optimize(const RunConfig& config);
void cmd_backtest(const RunConfig& config);
void cmd_report(const RunConfig& config);

}  // namespace meanrev::cli
