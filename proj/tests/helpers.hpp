#pragma once

// Shared test utilities: panel builders, temp directories, file slurping.

#include <Eigen/Core>

#include <unistd.h>

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "meanrev/panel.hpp"
#include "meanrev/random.hpp"

namespace testutil {

inline std::string iso_date(std::int64_t days_since_epoch) {
  std::int64_t z = days_since_epoch + 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const auto doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const std::int64_t yr = static_cast<std::int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  const unsigned d = doy - (153 * mp + 2) / 5 + 1;
  const unsigned m = mp + (mp < 10 ? 3 : -9);
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%04lld-%02u-%02u",
                static_cast<long long>(yr + (m <= 2)), m, d);
  return std::string(buf);
}

// Wraps a value matrix into a panel with generated names and dates.
inline meanrev::AssetPanel make_panel(const Eigen::MatrixXd& values) {
  meanrev::AssetPanel panel;
  panel.values = values;
  for (Eigen::Index j = 0; j < values.cols(); ++j) {
    panel.assets.push_back("x" + std::to_string(j + 1));
  }
  for (Eigen::Index t = 0; t < values.rows(); ++t) {
    panel.timestamps.push_back(iso_date(16436 + t));  // from 2015-01-01
  }
  return panel;
}

inline meanrev::AssetPanel make_panel(const std::vector<double>& column) {
  Eigen::MatrixXd values(static_cast<Eigen::Index>(column.size()), 1);
  for (std::size_t t = 0; t < column.size(); ++t) {
    values(static_cast<Eigen::Index>(t), 0) = column[t];
  }
  return make_panel(values);
}

inline Eigen::VectorXd unit_sphere_sample(meanrev::GaussianStream& gauss,
                                          Eigen::Index n) {
  Eigen::VectorXd v(n);
  do {
    for (Eigen::Index i = 0; i < n; ++i) {
      v(i) = gauss.next();
    }
  } while (v.norm() == 0.0);
  return v / v.norm();
}

// Unique scratch directory, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("meanrev_" + tag + "_" + std::to_string(++counter) + "_" +
             std::to_string(static_cast<unsigned>(::getpid())));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

inline std::string slurp(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

}  // namespace testutil
