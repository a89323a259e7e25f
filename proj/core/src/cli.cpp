#include "meanrev/cli.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <json.hpp>

#include <fstream>
#include <future>
#include <iostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "meanrev/backtest.hpp"
#include "meanrev/basket.hpp"
#include "meanrev/errors.hpp"
#include "meanrev/ou.hpp"
#include "meanrev/panel.hpp"
#include "meanrev/random.hpp"
#include "meanrev/sdp.hpp"
#include "meanrev/stats.hpp"
#include "meanrev/version.hpp"
#include "text_io.hpp"

namespace meanrev::cli {

namespace {

using nlohmann::json;

constexpr const char* kOuEstimatorNote =
    "lag-1 regression through the sample mean; the autocorrelation "
    "denominator sums squared lagged deviations over t=2..T (the full-range "
    "variant differs by one boundary term)";

void ensure_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    throw IoError("cannot create directory " + dir.string() + ": " +
                  ec.message());
  }
}

void write_text(const std::filesystem::path& file, const std::string& text) {
  std::ofstream out(file, std::ios::binary);
  if (!out) {
    throw IoError("cannot write " + file.string());
  }
  out << text;
}

void write_json_file(const std::filesystem::path& file, const json& j) {
  write_text(file, j.dump(2) + "\n");
}

void write_matrix_csv(const std::filesystem::path& file,
                      const Eigen::MatrixXd& m) {
  std::ostringstream out;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j > 0) {
        out << ',';
      }
      out << detail::format_double(m(i, j));
    }
    out << '\n';
  }
  write_text(file, out.str());
}

// Headerless square numeric CSV, the format write_matrix_csv emits.
Eigen::MatrixXd load_matrix_csv(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) {
    throw IoError("cannot open " + file.string());
  }
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto cells = detail::split_csv(line);
    std::vector<double> row;
    for (const auto cell : cells) {
      const auto value = detail::parse_double(cell);
      if (!value) {
        throw MalformedRow(file.string() + " line " +
                           std::to_string(line_no) + ": '" +
                           std::string(cell) + "' is not a number");
      }
      row.push_back(*value);
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw MalformedRow(file.string() + " line " + std::to_string(line_no) +
                         ": ragged row");
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) {
    throw MalformedRow(file.string() + ": matrix CSV is empty");
  }
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()),
                    static_cast<Eigen::Index>(rows.front().size()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      m(i, j) = rows[static_cast<std::size_t>(i)]
                    [static_cast<std::size_t>(j)];
    }
  }
  return m;
}

json panel_meta(const AssetPanel& panel) {
  return json{{"assets", panel.assets},
              {"rows", panel.rows()},
              {"first", panel.timestamps.front()},
              {"last", panel.timestamps.back()}};
}

json weights_json(const std::vector<std::string>& assets,
                  const Eigen::VectorXd& weights) {
  json out = json::object();
  for (Eigen::Index i = 0; i < weights.size(); ++i) {
    out[assets[static_cast<std::size_t>(i)]] = weights(i);
  }
  return out;
}

void write_weights_csv(const std::filesystem::path& file,
                       const std::vector<std::string>& assets,
                       const Eigen::VectorXd& weights) {
  std::ostringstream out;
  out << "asset,weight\n";
  for (Eigen::Index i = 0; i < weights.size(); ++i) {
    out << assets[static_cast<std::size_t>(i)] << ','
        << detail::format_double(weights(i)) << '\n';
  }
  write_text(file, out.str());
}

template <typename T>
json nullable(const std::optional<T>& value) {
  if (!value) {
    return nullptr;
  }
  return *value;
}

json config_json(const RunConfig& config) {
  json synth{{"assets", config.synth.assets},
             {"rows", config.synth.rows},
             {"noise_scale", config.synth.noise_scale},
             {"transition_csv",
              config.synth.transition_csv
                  ? json(config.synth.transition_csv->string())
                  : json(nullptr)},
             {"diag", config.synth.diag},
             {"mix", config.synth.mix},
             {"radius_lo", config.synth.radius_lo},
             {"radius_hi", config.synth.radius_hi}};
  return json{{"input", config.input.string()},
              {"output_dir", config.output_dir.string()},
              {"report_out", config.report_out
                                 ? json(config.report_out->string())
                                 : json(nullptr)},
              {"train_fraction", config.train_fraction},
              {"split_at", nullable(config.split_at)},
              {"ridge", nullable(config.ridge)},
              {"rho", config.rho},
              {"nu", config.nu},
              {"target_support", nullable(config.target_support)},
              {"prune", nullable(config.prune)},
              {"tol", config.tol},
              {"max_iter", config.max_iter},
              {"debug", config.debug},
              {"tc", config.tc},
              {"initial_wealth", config.initial_wealth},
              {"seed", config.seed},
              {"synth", synth}};
}

// No clocks or hostnames here: reruns must be byte-identical.
void write_manifest(const RunConfig& config, const char* command) {
  json manifest{{"command", command},
                {"version", kVersion},
                {"rng", kGaussianRng},
                {"config", config_json(config)}};
  write_json_file(config.output_dir / "manifest.json", manifest);
}

json summary_json(const backtest::Summary& s) {
  return json{{"initial_wealth", s.initial_wealth},
              {"final_wealth", s.final_wealth},
              {"total_return", s.total_return},
              {"max_drawdown", s.max_drawdown},
              {"total_pnl", s.total_pnl},
              {"total_costs", s.total_costs},
              {"turnover", s.turnover},
              {"mean_step_pnl", s.mean_step_pnl},
              {"stdev_step_pnl", s.stdev_step_pnl},
              {"steps", s.steps},
              {"went_negative", s.went_negative}};
}

json ou_json(const OuParams& params) {
  return json{{"mu", params.mu},
              {"lambda", params.lambda},
              {"sigma2", params.sigma2}};
}

std::vector<std::string> support_names(const std::vector<std::string>& assets,
                                       const BasketWeights& basket) {
  std::vector<std::string> names;
  for (const auto index : basket.support) {
    names.push_back(assets[static_cast<std::size_t>(index)]);
  }
  return names;
}

json basket_json(const std::vector<std::string>& assets,
                 const BasketWeights& basket) {
  return json{{"weights", weights_json(assets, basket.weights)},
              {"support", support_names(assets, basket)},
              {"support_size", basket.support.size()},
              {"predictability", basket.predictability}};
}

Eigen::MatrixXd transition_for(const RunConfig& config) {
  const auto& synth = config.synth;
  if (synth.transition_csv) {
    Eigen::MatrixXd m = load_matrix_csv(*synth.transition_csv);
    if (m.rows() != synth.assets || m.cols() != synth.assets) {
      throw ConfigError("transition matrix must be " +
                        std::to_string(synth.assets) + "x" +
                        std::to_string(synth.assets));
    }
    return m;
  }
  Eigen::VectorXd diag;
  if (!synth.diag.empty()) {
    if (synth.diag.size() != static_cast<std::size_t>(synth.assets)) {
      throw ConfigError("diag needs one entry per asset");
    }
    diag = Eigen::Map<const Eigen::VectorXd>(
        synth.diag.data(), static_cast<Eigen::Index>(synth.diag.size()));
  } else {
    diag = Eigen::VectorXd::LinSpaced(synth.assets, synth.radius_lo,
                                      synth.radius_hi);
  }
  Eigen::MatrixXd a = diag.asDiagonal();
  if (synth.mix && synth.assets > 1) {
    // A fixed offset decorrelates the rotation stream from the noise
    // stream that synth_var1 draws from the same user seed.
    GaussianStream gauss(config.seed ^ 0x517cc1b727220a95ULL);
    Eigen::MatrixXd g(synth.assets, synth.assets);
    for (Eigen::Index i = 0; i < g.rows(); ++i) {
      for (Eigen::Index j = 0; j < g.cols(); ++j) {
        g(i, j) = gauss.next();
      }
    }
    const Eigen::MatrixXd q =
        Eigen::HouseholderQR<Eigen::MatrixXd>(g).householderQ();
    a = q * a * q.transpose();
  }
  return a;
}

sdp::SolverOptions make_solver_options(const RunConfig& config) {
  sdp::SolverOptions opts;
  opts.tol = config.tol;
  opts.max_iter = config.max_iter;
  opts.prune = config.prune;
  opts.record_spectra = config.debug;
  return opts;
}

void write_solver_diagnostics(const RunConfig& config,
                              const sdp::SdpSolution& solution) {
  std::ostringstream residuals;
  residuals << "iteration,primal,dual\n";
  for (const auto& sample : solution.residual_trace) {
    residuals << sample.iteration << ','
              << detail::format_double(sample.primal) << ','
              << detail::format_double(sample.dual) << '\n';
  }
  write_text(config.output_dir / "residuals.csv", residuals.str());

  std::ostringstream spectra;
  spectra << "iteration";
  const Eigen::Index n = solution.y_matrix.rows();
  for (Eigen::Index i = 0; i < n; ++i) {
    spectra << ",eig" << i;
  }
  spectra << '\n';
  for (const auto& [iteration, values] : solution.spectra_trace) {
    spectra << iteration;
    for (Eigen::Index i = 0; i < values.size(); ++i) {
      spectra << ',' << detail::format_double(values(i));
    }
    spectra << '\n';
  }
  write_text(config.output_dir / "spectra.csv", spectra.str());
}

json sdp_json(const sdp::SdpSolution& solution, double rho, double nu) {
  std::vector<double> eigenvalues(
      solution.eigenvalues.data(),
      solution.eigenvalues.data() + solution.eigenvalues.size());
  return json{{"rho", rho},
              {"nu", nu},
              {"objective", solution.objective},
              {"smooth_objective", solution.smooth_objective},
              {"primal_residual", solution.primal_residual},
              {"dual_residual", solution.dual_residual},
              {"iterations", solution.iterations},
              {"converged", solution.converged},
              {"eigenvalues", eigenvalues},
              {"eigen_ratio", solution.recovery.eigen_ratio},
              {"rank_ambiguous", solution.recovery.rank_ambiguous}};
}

}  // namespace

RunConfig load_config(const std::filesystem::path& json_file,
                      RunConfig base) {
  std::ifstream in(json_file);
  if (!in) {
    throw IoError("cannot open " + json_file.string());
  }
  json root;
  try {
    root = json::parse(in);
    for (const auto& [key, value] : root.items()) {
      if (key == "input") {
        base.input = value.get<std::string>();
      } else if (key == "output_dir") {
        base.output_dir = value.get<std::string>();
      } else if (key == "report_out") {
        if (!value.is_null()) {
          base.report_out = value.get<std::string>();
        }
      } else if (key == "train_fraction") {
        base.train_fraction = value.get<double>();
      } else if (key == "split_at") {
        if (!value.is_null()) {
          base.split_at = value.get<std::string>();
        }
      } else if (key == "ridge") {
        if (!value.is_null()) {
          base.ridge = value.get<double>();
        }
      } else if (key == "rho") {
        base.rho = value.get<double>();
      } else if (key == "nu") {
        base.nu = value.get<double>();
      } else if (key == "target_support") {
        if (!value.is_null()) {
          base.target_support = value.get<int>();
        }
      } else if (key == "prune") {
        if (!value.is_null()) {
          base.prune = value.get<double>();
        }
      } else if (key == "tol") {
        base.tol = value.get<double>();
      } else if (key == "max_iter") {
        base.max_iter = value.get<int>();
      } else if (key == "debug") {
        base.debug = value.get<bool>();
      } else if (key == "tc") {
        base.tc = value.get<std::vector<double>>();
      } else if (key == "initial_wealth") {
        base.initial_wealth = value.get<double>();
      } else if (key == "seed") {
        base.seed = value.get<std::uint64_t>();
      } else if (key == "synth") {
        for (const auto& [skey, svalue] : value.items()) {
          if (skey == "assets") {
            base.synth.assets = svalue.get<int>();
          } else if (skey == "rows") {
            base.synth.rows = svalue.get<int>();
          } else if (skey == "noise_scale") {
            base.synth.noise_scale = svalue.get<double>();
          } else if (skey == "transition_csv") {
            if (!svalue.is_null()) {
              base.synth.transition_csv = svalue.get<std::string>();
            }
          } else if (skey == "diag") {
            base.synth.diag = svalue.get<std::vector<double>>();
          } else if (skey == "mix") {
            base.synth.mix = svalue.get<bool>();
          } else if (skey == "radius_lo") {
            base.synth.radius_lo = svalue.get<double>();
          } else if (skey == "radius_hi") {
            base.synth.radius_hi = svalue.get<double>();
          } else {
            throw ConfigError("unknown config key synth." + skey);
          }
        }
      } else {
        throw ConfigError("unknown config key " + key);
      }
    }
  } catch (const json::exception& e) {
    throw ConfigError(json_file.string() + ": " + e.what());
  }
  return base;
}

void cmd_synth(const RunConfig& config) {
  ensure_dir(config.output_dir);
  const Eigen::MatrixXd transition = transition_for(config);
  const AssetPanel panel =
      synth_var1(config.synth.assets, config.synth.rows, transition,
                 config.synth.noise_scale, config.seed);
  write_panel(config.output_dir / "panel.csv", panel);
  write_matrix_csv(config.output_dir / "transition.csv", transition);
  write_manifest(config, "synth");
}

void cmd_estimate(const RunConfig& config) {
  if (config.input.empty()) {
    throw ConfigError("estimate needs an input panel CSV");
  }
  ensure_dir(config.output_dir);
  const AssetPanel panel = load_panel(config.input);
  const AutocovarianceSet cov = estimate(panel, config.ridge);

  write_matrix_csv(config.output_dir / "a0.csv", cov.a0);
  write_matrix_csv(config.output_dir / "a1.csv", cov.a1);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(
      cov.a0, Eigen::EigenvaluesOnly);
  json report{{"panel", panel_meta(panel)},
              {"ridge", cov.ridge},
              {"pd_tolerance", pd_tolerance(cov.a0)},
              {"min_eigenvalue", solver.eigenvalues().minCoeff()},
              {"sample_mean", weights_json(panel.assets, cov.sample_mean)},
              {"rows_used", cov.sample_rows}};
  write_json_file(config.output_dir / "estimate.json", report);
  write_manifest(config, "estimate");
}

void cmd_optimize(const RunConfig& config) {
  if (config.input.empty()) {
    throw ConfigError("optimize needs an input panel CSV");
  }
  ensure_dir(config.output_dir);
  const AssetPanel panel = load_panel(config.input);
  const AutocovarianceSet cov = estimate(panel, config.ridge);

  const BasketWeights dense = closed_form_min(cov);
  const sdp::SolverOptions opts = make_solver_options(config);

  json solution_report{{"panel", panel_meta(panel)},
                       {"ridge", cov.ridge},
                       {"dense", basket_json(panel.assets, dense)}};

  sdp::SdpSolution solution;
  double rho_used = config.rho;
  if (config.target_support) {
    sdp::RhoSweepResult sweep =
        sdp::sweep_rho(cov, config.nu, *config.target_support,
                       sdp::default_rho_grid(), opts);
    json points = json::array();
    for (const auto& point : sweep.points) {
      points.push_back(json{{"rho", point.rho},
                            {"support_size", point.support_size},
                            {"objective", point.objective},
                            {"converged", point.converged}});
    }
    solution_report["sweep"] = json{{"target_support", *config.target_support},
                                    {"chosen_rho", sweep.chosen_rho},
                                    {"achieved_support",
                                     sweep.achieved_support},
                                    {"points", points}};
    rho_used = sweep.chosen_rho;
    solution = std::move(sweep.solution);
  } else {
    solution =
        sdp::solve(sdp::SdpProblem::from_covariance(cov, config.rho,
                                                    config.nu),
                   opts);
  }

  solution_report["sparse"] = basket_json(panel.assets, solution.basket);
  solution_report["solver"] = sdp_json(solution, rho_used, config.nu);

  write_weights_csv(config.output_dir / "weights_dense.csv", panel.assets,
                    dense.weights);
  write_weights_csv(config.output_dir / "weights_sparse.csv", panel.assets,
                    solution.basket.weights);
  write_json_file(config.output_dir / "solution.json", solution_report);
  if (config.debug) {
    write_solver_diagnostics(config, solution);
  }
  write_manifest(config, "optimize");
}

void cmd_backtest(const RunConfig& config) {
  if (config.input.empty()) {
    throw ConfigError("backtest needs an input panel CSV");
  }
  if (config.tc.empty()) {
    throw ConfigError("backtest needs at least one tc value");
  }
  ensure_dir(config.output_dir);
  const AssetPanel panel = load_panel(config.input);
  const SplitSpec spec = config.split_at
                             ? SplitSpec::at(*config.split_at)
                             : SplitSpec::fraction(config.train_fraction);
  const auto [train, test] = split(panel, spec);
  const AutocovarianceSet cov = estimate(train, config.ridge);

  const BasketWeights dense = closed_form_min(cov);
  const sdp::SolverOptions opts = make_solver_options(config);

  json report{{"panel", panel_meta(panel)},
              {"split",
               json{{"train_rows", train.rows()},
                    {"test_rows", test.rows()},
                    {"train_fraction", config.split_at
                                           ? json(nullptr)
                                           : json(config.train_fraction)},
                    {"boundary", nullable(config.split_at)}}},
              {"ridge", cov.ridge},
              {"ou_estimator", kOuEstimatorNote},
              {"rng", kGaussianRng}};

  double rho_used = config.rho;
  sdp::SdpSolution solution;
  if (config.target_support) {
    sdp::RhoSweepResult sweep =
        sdp::sweep_rho(cov, config.nu, *config.target_support,
                       sdp::default_rho_grid(), opts);
    rho_used = sweep.chosen_rho;
    solution = std::move(sweep.solution);
  } else {
    solution =
        sdp::solve(sdp::SdpProblem::from_covariance(cov, config.rho,
                                                    config.nu),
                   opts);
  }

  struct Job {
    std::string label;
    double tc = 0.0;
    std::string file;
    backtest::Summary summary;
  };

  json baskets = json::object();
  std::vector<std::string> failures;
  for (const auto& [label, basket] :
       {std::pair<std::string, const BasketWeights&>{"dense", dense},
        {"sparse", solution.basket}}) {
    json entry = basket_json(panel.assets, basket);
    if (label == "sparse") {
      entry["solver"] = sdp_json(solution, rho_used, config.nu);
    }
    OuParams params;
    try {
      params = fit_ou(basket_series(train, basket.weights));
    } catch (const Error& e) {
      entry["error"] = e.what();
      failures.push_back("basket '" + label + "': " + e.what());
      baskets[label] = entry;
      continue;
    }
    entry["ou"] = ou_json(params);

    const backtest::CostModel base_cost{
        0.0, static_cast<int>(basket.support.size())};
    std::vector<std::future<Job>> jobs;
    for (const double tc : config.tc) {
      jobs.push_back(std::async(std::launch::async, [&, tc, label]() {
        backtest::CostModel cost = base_cost;
        cost.tc = tc;
        const backtest::WealthPath path = backtest::run(
            test, basket, params, cost, config.initial_wealth);
        Job job;
        job.label = label;
        job.tc = tc;
        job.file = "wealth_" + label + "_tc" + detail::format_double(tc) +
                   ".csv";
        backtest::write_wealth_csv(config.output_dir / job.file, path);
        job.summary = backtest::summarize(path);
        return job;
      }));
    }
    json results = json::array();
    for (auto& future : jobs) {
      Job job = future.get();
      json row = summary_json(job.summary);
      row["tc"] = job.tc;
      row["k"] = base_cost.k;
      row["file"] = job.file;
      results.push_back(std::move(row));
    }
    entry["results"] = std::move(results);
    baskets[label] = std::move(entry);
  }
  report["baskets"] = std::move(baskets);

  write_json_file(config.output_dir / "summary.json", report);
  write_manifest(config, "backtest");
  if (!failures.empty()) {
    throw NonMeanReverting(failures.front());
  }
}

void cmd_report(const RunConfig& config) {
  if (config.input.empty()) {
    throw ConfigError("report needs a wealth CSV as input");
  }
  const backtest::WealthPath path = backtest::read_wealth_csv(config.input);
  const backtest::Summary summary = backtest::summarize(path);
  json report{{"file", config.input.string()},
              {"rows", path.wealth.size()},
              {"audit_exact", backtest::audit(path)},
              {"initial_wealth_reconstructed", true},
              {"summary", summary_json(summary)}};
  if (config.report_out) {
    write_json_file(*config.report_out, report);
  } else {
    std::cout << report.dump(2) << std::endl;
  }
}

}  // namespace meanrev::cli
