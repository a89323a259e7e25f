#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace meanrev {

// A validated multi-asset level panel: T timestamped observations of n
// named series. Invariants: T >= 3 (min_rows below), n >= 1, unique
// non-empty asset names, strictly increasing ISO-8601 dates, finite cells.
struct AssetPanel {
  std::vector<std::string> assets;      // column order is preserved
  std::vector<std::string> timestamps;  // YYYY-MM-DD
  Eigen::MatrixXd values;               // T x n

  Eigen::Index rows() const { return values.rows(); }
  Eigen::Index cols() const { return values.cols(); }

  // Throws InvalidPanel / NonMonotonicDates / MissingValue when an invariant
  // is broken. Test segments produced by split() only need two rows, hence
  // the parameter; panels used for estimation require the default three.
  void validate(Eigen::Index min_rows = 3) const;
};

// Chronological train/test partition: exactly one of the two fields is set.
// A fraction f gives the train segment round(f * T) rows; a boundary date is
// the last timestamp included in the train segment.
struct SplitSpec {
  std::optional<double> train_fraction;
  std::optional<std::string> boundary;

  static SplitSpec fraction(double f) { return {f, std::nullopt}; }
  static SplitSpec at(std::string date) {
    return {std::nullopt, std::move(date)};
  }
};

// Parses "date,<asset>,..." CSV. `name` labels the source in error messages.
// Throws MalformedRow, MissingValue, NonMonotonicDates, InvalidPanel.
AssetPanel load_panel(std::istream& in, std::string_view name = "input");
AssetPanel load_panel(const std::filesystem::path& file);

// Inverse of load_panel up to numeric formatting: doubles are written in
// shortest round-trip form, so load(write(p)) == p bit for bit.
void write_panel(std::ostream& out, const AssetPanel& panel);
void write_panel(const std::filesystem::path& file, const AssetPanel& panel);

// Splits rows [0, t_train) / [t_train, T). Throws DegenerateSplit unless
// the train segment has >= 3 rows and the test segment >= 2.
std::pair<AssetPanel, AssetPanel> split(const AssetPanel& panel,
                                        const SplitSpec& spec);

// Largest eigenvalue modulus of a (generally non-symmetric) square matrix.
double spectral_radius(const Eigen::MatrixXd& m);

// Simulates x_{t+1} = transition x_t + eps_t, eps_t ~ N(0, noise_scale^2 I),
// from x_0 ~ N(0, noise_scale^2 I). Columns are named a1..an (zero padded),
// dates are consecutive days. Identical seeds give identical panels on every
// platform (see kGaussianRng). Throws UnstableTransition when the spectral
// radius of `transition` is >= 1.
AssetPanel synth_var1(int n, int t_rows, const Eigen::MatrixXd& transition,
                      double noise_scale, std::uint64_t seed);

}  // namespace meanrev
