#include "meanrev/panel.hpp"

#include <Eigen/Eigenvalues>

#include <cctype>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_set>

#include "meanrev/errors.hpp"
#include "meanrev/random.hpp"
#include "date_util.hpp"
#include "text_io.hpp"

namespace meanrev {

namespace {

std::string where(std::string_view name, std::size_t line) {
  std::ostringstream out;
  out << name << " line " << line << ": ";
  return out.str();
}

bool iequals(std::string_view a, std::string_view b) {
  if (a.size() != b.size()) {
    return false;
  }
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::tolower(static_cast<unsigned char>(a[i])) !=
        std::tolower(static_cast<unsigned char>(b[i]))) {
      return false;
    }
  }
  return true;
}

std::int64_t parse_timestamp(const std::string& ts, const char* context) {
  const auto day = detail::parse_iso_date(ts);
  if (!day) {
    throw InvalidPanel(std::string(context) + ": '" + ts +
                       "' is not an ISO-8601 date");
  }
  return *day;
}

}  // namespace

void AssetPanel::validate(Eigen::Index min_rows) const {
  const auto t = values.rows();
  const auto n = values.cols();
  if (n < 1 || static_cast<std::size_t>(n) != assets.size()) {
    throw InvalidPanel("panel needs at least one named asset column");
  }
  if (t < min_rows || static_cast<std::size_t>(t) != timestamps.size()) {
    throw InvalidPanel("panel has " + std::to_string(t) + " rows, needs " +
                       std::to_string(min_rows));
  }
  std::unordered_set<std::string> seen;
  for (const auto& asset : assets) {
    if (asset.empty() || asset.find_first_of(",\r\n") != std::string::npos ||
        !seen.insert(asset).second) {
      throw InvalidPanel("asset name '" + asset + "' is empty, duplicated "
                         "or contains a separator");
    }
  }
  std::int64_t prev = 0;
  for (std::size_t i = 0; i < timestamps.size(); ++i) {
    const auto day = parse_timestamp(timestamps[i], "timestamp");
    if (i > 0 && day <= prev) {
      throw NonMonotonicDates("timestamp '" + timestamps[i] +
                              "' does not increase");
    }
    prev = day;
  }
  if (!values.allFinite()) {
    throw MissingValue("panel contains a non-finite cell");
  }
}

AssetPanel load_panel(std::istream& in, std::string_view name) {
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(in, line)) {
    throw MalformedRow(where(name, line_no) + "missing header row");
  }
  const auto header = detail::split_csv(line);
  if (header.empty() || !iequals(detail::trim(header[0]), "date")) {
    throw MalformedRow(where(name, line_no) +
                       "header must start with a 'date' column");
  }
  if (header.size() < 2) {
    throw MalformedRow(where(name, line_no) + "header names no asset columns");
  }
  AssetPanel panel;
  std::unordered_set<std::string> seen;
  for (std::size_t i = 1; i < header.size(); ++i) {
    std::string asset(detail::trim(header[i]));
    if (asset.empty() || !seen.insert(asset).second) {
      throw MalformedRow(where(name, line_no) + "asset name '" + asset +
                         "' is empty or duplicated");
    }
    panel.assets.push_back(std::move(asset));
  }

  const std::size_t n = panel.assets.size();
  std::vector<double> cells;
  std::int64_t prev_day = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto row = detail::split_csv(line);
    if (row.size() != n + 1) {
      throw MalformedRow(where(name, line_no) + "expected " +
                         std::to_string(n + 1) + " cells, found " +
                         std::to_string(row.size()));
    }
    const auto date_text = detail::trim(row[0]);
    const auto day = detail::parse_iso_date(date_text);
    if (!day) {
      throw MalformedRow(where(name, line_no) + "'" + std::string(date_text) +
                         "' is not an ISO-8601 date");
    }
    if (!panel.timestamps.empty() && *day <= prev_day) {
      throw NonMonotonicDates(where(name, line_no) + "date '" +
                              std::string(date_text) +
                              "' does not increase over the previous row");
    }
    prev_day = *day;
    for (std::size_t j = 1; j <= n; ++j) {
      const auto cell = detail::trim(row[j]);
      if (cell.empty()) {
        throw MissingValue(where(name, line_no) + "blank cell in column '" +
                           panel.assets[j - 1] + "'");
      }
      const auto value = detail::parse_double(cell);
      if (!value) {
        throw MalformedRow(where(name, line_no) + "'" + std::string(cell) +
                           "' in column '" + panel.assets[j - 1] +
                           "' is not a number");
      }
      if (!std::isfinite(*value)) {
        throw MissingValue(where(name, line_no) +
                           "non-finite value in column '" +
                           panel.assets[j - 1] + "'");
      }
      cells.push_back(*value);
    }
    panel.timestamps.emplace_back(date_text);
  }

  const std::size_t t = panel.timestamps.size();
  if (t < 3) {
    throw InvalidPanel(std::string(name) + ": panel has " + std::to_string(t) +
                       " data rows, at least 3 required");
  }
  panel.values.resize(static_cast<Eigen::Index>(t),
                      static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < t; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      panel.values(static_cast<Eigen::Index>(i),
                   static_cast<Eigen::Index>(j)) = cells[i * n + j];
    }
  }
  return panel;
}

AssetPanel load_panel(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) {
    throw IoError("cannot open " + file.string());
  }
  return load_panel(in, file.string());
}

void write_panel(std::ostream& out, const AssetPanel& panel) {
  out << "date";
  for (const auto& asset : panel.assets) {
    out << ',' << asset;
  }
  out << '\n';
  for (Eigen::Index t = 0; t < panel.rows(); ++t) {
    out << panel.timestamps[static_cast<std::size_t>(t)];
    for (Eigen::Index j = 0; j < panel.cols(); ++j) {
      out << ',' << detail::format_double(panel.values(t, j));
    }
    out << '\n';
  }
}

void write_panel(const std::filesystem::path& file, const AssetPanel& panel) {
  std::ofstream out(file);
  if (!out) {
    throw IoError("cannot write " + file.string());
  }
  write_panel(out, panel);
}

std::pair<AssetPanel, AssetPanel> split(const AssetPanel& panel,
                                        const SplitSpec& spec) {
  const Eigen::Index t = panel.rows();
  Eigen::Index t_train = 0;
  if (spec.train_fraction && spec.boundary) {
    throw DegenerateSplit("split spec sets both train_fraction and boundary");
  }
  if (spec.train_fraction) {
    const double f = *spec.train_fraction;
    if (!(f > 0.0 && f < 1.0)) {
      throw DegenerateSplit("train_fraction must lie strictly in (0, 1)");
    }
    t_train = static_cast<Eigen::Index>(
        std::llround(f * static_cast<double>(t)));
  } else if (spec.boundary) {
    const auto boundary = detail::parse_iso_date(*spec.boundary);
    if (!boundary) {
      throw DegenerateSplit("split boundary '" + *spec.boundary +
                            "' is not an ISO-8601 date");
    }
    for (const auto& ts : panel.timestamps) {
      if (parse_timestamp(ts, "timestamp") <= *boundary) {
        ++t_train;
      }
    }
  } else {
    throw DegenerateSplit("split spec sets neither train_fraction nor "
                          "boundary");
  }

  const Eigen::Index t_test = t - t_train;
  if (t_train < 3) {
    throw DegenerateSplit("train segment needs at least 3 rows, got " +
                          std::to_string(t_train));
  }
  if (t_test < 2) {
    throw DegenerateSplit("test segment needs at least 2 rows, got " +
                          std::to_string(t_test));
  }

  auto slice = [&](Eigen::Index begin, Eigen::Index count) {
    AssetPanel part;
    part.assets = panel.assets;
    part.timestamps.assign(
        panel.timestamps.begin() + begin,
        panel.timestamps.begin() + begin + count);
    part.values = panel.values.middleRows(begin, count);
    return part;
  };
  return {slice(0, t_train), slice(t_train, t_test)};
}

double spectral_radius(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw DimensionMismatch("spectral_radius needs a non-empty square matrix");
  }
  Eigen::EigenSolver<Eigen::MatrixXd> solver(m, false);
  if (solver.info() != Eigen::Success) {
    throw EigenFailure("eigensolver failed on the transition matrix");
  }
  return solver.eigenvalues().cwiseAbs().maxCoeff();
}

AssetPanel synth_var1(int n, int t_rows, const Eigen::MatrixXd& transition,
                      double noise_scale, std::uint64_t seed) {
  if (n < 1) {
    throw InvalidPanel("synthetic panel needs at least one asset");
  }
  if (t_rows < 3) {
    throw InvalidPanel("synthetic panel needs at least 3 rows");
  }
  if (transition.rows() != n || transition.cols() != n) {
    throw DimensionMismatch("transition must be " + std::to_string(n) + "x" +
                            std::to_string(n));
  }
  if (!(noise_scale > 0.0)) {
    throw InvalidPanel("noise_scale must be positive");
  }
  const double radius = spectral_radius(transition);
  if (radius >= 1.0) {
    throw UnstableTransition("transition spectral radius " +
                             detail::format_double(radius) + " is >= 1");
  }

  GaussianStream gauss(seed);
  AssetPanel panel;
  panel.values.resize(t_rows, n);
  Eigen::VectorXd x(n);
  for (int j = 0; j < n; ++j) {
    x(j) = noise_scale * gauss.next();
  }
  panel.values.row(0) = x.transpose();
  for (int t = 1; t < t_rows; ++t) {
    Eigen::VectorXd eps(n);
    for (int j = 0; j < n; ++j) {
      eps(j) = noise_scale * gauss.next();
    }
    x = transition * x + eps;
    panel.values.row(t) = x.transpose();
  }

  const int digits = static_cast<int>(std::to_string(n).size());
  for (int j = 1; j <= n; ++j) {
    std::string idx = std::to_string(j);
    panel.assets.push_back(
        "a" + std::string(static_cast<std::size_t>(digits) - idx.size(), '0') +
        idx);
  }
  const std::int64_t start = detail::days_from_civil(2010, 1, 4);
  panel.timestamps.reserve(static_cast<std::size_t>(t_rows));
  for (int t = 0; t < t_rows; ++t) {
    panel.timestamps.push_back(detail::format_iso_date(start + t));
  }
  return panel;
}

}  // namespace meanrev
