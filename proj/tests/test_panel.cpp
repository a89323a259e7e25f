#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Cholesky>

#include <limits>
#include <sstream>

#include "helpers.hpp"
#include "meanrev/errors.hpp"
#include "meanrev/panel.hpp"
#include "meanrev/stats.hpp"

using namespace meanrev;

namespace {

AssetPanel from_text(const std::string& text) {
  std::istringstream in(text);
  return load_panel(in, "test.csv");
}

}  // namespace

TEST_CASE("a well-formed panel loads with order preserved") {
  const auto panel = from_text(
      "date,b,a\n"
      "2020-01-01,1,2\n"
      "2020-01-02,3,4\n"
      "2020-01-05,5,6.5\n");
  CHECK(panel.rows() == 3);
  CHECK(panel.cols() == 2);
  CHECK(panel.assets == std::vector<std::string>{"b", "a"});
  CHECK(panel.timestamps.front() == "2020-01-01");
  CHECK(panel.timestamps.back() == "2020-01-05");
  CHECK(panel.values(0, 0) == 1.0);
  CHECK(panel.values(2, 1) == 6.5);
  CHECK_NOTHROW(panel.validate());
}

TEST_CASE("malformed input names the offending line") {
  // Blank cell.
  CHECK_THROWS_WITH_AS(
      from_text("date,a\n2020-01-01,1\n2020-01-02,\n2020-01-03,2\n"),
      doctest::Contains("line 3"), MissingValue);
  // Wrong cell count.
  CHECK_THROWS_WITH_AS(
      from_text("date,a\n2020-01-01,1\n2020-01-02,2,9\n2020-01-03,3\n"),
      doctest::Contains("line 3"), MalformedRow);
  // Unparseable number.
  CHECK_THROWS_AS(
      from_text("date,a\n2020-01-01,1\n2020-01-02,x2\n2020-01-03,3\n"),
      MalformedRow);
  // Non-finite cell.
  CHECK_THROWS_AS(
      from_text("date,a\n2020-01-01,1\n2020-01-02,nan\n2020-01-03,3\n"),
      MissingValue);
  // Bad date.
  CHECK_THROWS_AS(
      from_text("date,a\n2020-01-01,1\n2020-13-02,2\n2020-01-03,3\n"),
      MalformedRow);
  CHECK_THROWS_AS(
      from_text("date,a\n2020-01-01,1\n2020-02-30,2\n2020-03-01,3\n"),
      MalformedRow);
  // Date goes backwards, and a duplicate date.
  CHECK_THROWS_AS(
      from_text("date,a\n2020-01-02,1\n2020-01-01,2\n2020-01-03,3\n"),
      NonMonotonicDates);
  CHECK_THROWS_AS(
      from_text("date,a\n2020-01-01,1\n2020-01-01,2\n2020-01-03,3\n"),
      NonMonotonicDates);
  // Header problems.
  CHECK_THROWS_AS(from_text("time,a\n2020-01-01,1\n"), MalformedRow);
  CHECK_THROWS_AS(from_text("date\n2020-01-01\n"), MalformedRow);
  CHECK_THROWS_AS(from_text("date,a,a\n2020-01-01,1,2\n"), MalformedRow);
  // Empty file and too few rows.
  CHECK_THROWS_AS(from_text(""), MalformedRow);
  CHECK_THROWS_AS(from_text("date,a\n2020-01-01,1\n2020-01-02,2\n"),
                  InvalidPanel);
}

TEST_CASE("write/load round-trips values bit for bit") {
  const auto panel = synth_var1(
      3, 50, Eigen::MatrixXd::Identity(3, 3) * 0.9, 0.3, 77);
  std::ostringstream out;
  write_panel(out, panel);
  std::istringstream in(out.str());
  const auto back = load_panel(in, "roundtrip");
  CHECK(back.assets == panel.assets);
  CHECK(back.timestamps == panel.timestamps);
  REQUIRE(back.values.rows() == panel.values.rows());
  CHECK((back.values - panel.values).norm() == 0.0);

  // And the re-written text is byte-identical.
  std::ostringstream again;
  write_panel(again, back);
  CHECK(again.str() == out.str());
}

TEST_CASE("crlf input and surrounding spaces are tolerated") {
  const auto panel = from_text(
      "date, a ,b\r\n"
      "2020-01-01, 1 ,2\r\n"
      "2020-01-02,3,4\r\n"
      "2020-01-03,5,6\r\n");
  CHECK(panel.assets == std::vector<std::string>{"a", "b"});
  CHECK(panel.values(0, 0) == 1.0);
}

TEST_CASE("fraction split rounds to the nearest row count") {
  const auto panel = synth_var1(
      2, 20, Eigen::MatrixXd::Identity(2, 2) * 0.5, 1.0, 88);
  const auto [train, test] = split(panel, SplitSpec::fraction(0.9));
  CHECK(train.rows() == 18);
  CHECK(test.rows() == 2);
  CHECK(train.timestamps.back() == panel.timestamps[17]);
  CHECK(test.timestamps.front() == panel.timestamps[18]);

  // Every row lands in exactly one side, in order.
  Eigen::MatrixXd glued(panel.rows(), panel.cols());
  glued.topRows(train.rows()) = train.values;
  glued.bottomRows(test.rows()) = test.values;
  CHECK((glued - panel.values).norm() == 0.0);
}

TEST_CASE("a 2558-row split at fraction 2269/2558 keeps 289 test rows") {
  const auto panel = synth_var1(
      2, 2558, Eigen::MatrixXd::Identity(2, 2) * 0.5, 1.0, 99);
  const auto [train, test] = split(
      panel, SplitSpec::fraction(2269.0 / 2558.0));
  CHECK(train.rows() == 2269);
  CHECK(test.rows() == 289);
}

TEST_CASE("degenerate splits are rejected") {
  const auto panel10 = synth_var1(
      2, 10, Eigen::MatrixXd::Identity(2, 2) * 0.5, 1.0, 101);
  // round(0.9 * 10) = 9 leaves a single test row.
  CHECK_THROWS_AS(split(panel10, SplitSpec::fraction(0.9)),
                  DegenerateSplit);
  CHECK_THROWS_AS(split(panel10, SplitSpec::fraction(0.1)),
                  DegenerateSplit);
  CHECK_THROWS_AS(split(panel10, SplitSpec::fraction(1.0)),
                  DegenerateSplit);
  CHECK_THROWS_AS(split(panel10, SplitSpec{}), DegenerateSplit);
  CHECK_THROWS_AS(split(panel10, SplitSpec::at("not-a-date")),
                  DegenerateSplit);
}

TEST_CASE("boundary split keeps the boundary row in train") {
  const auto panel = from_text(
      "date,a\n"
      "2020-01-01,1\n2020-01-03,2\n2020-01-05,3\n2020-01-07,4\n"
      "2020-01-09,5\n2020-01-11,6\n2020-01-13,7\n2020-01-15,8\n");
  const auto [train, test] = split(panel, SplitSpec::at("2020-01-11"));
  CHECK(train.rows() == 6);
  CHECK(test.rows() == 2);
  CHECK(train.timestamps.back() == "2020-01-11");

  // An unobserved boundary between two rows behaves the same way.
  const auto [train2, test2] = split(panel, SplitSpec::at("2020-01-12"));
  CHECK(train2.rows() == 6);
  CHECK(test2.rows() == 2);
}

TEST_CASE("synthetic panels are reproducible by seed") {
  Eigen::MatrixXd transition(2, 2);
  transition << 0.8, 0.1, 0.0, 0.5;
  const auto a = synth_var1(2, 100, transition, 0.25, 7);
  const auto b = synth_var1(2, 100, transition, 0.25, 7);
  const auto c = synth_var1(2, 100, transition, 0.25, 8);
  CHECK((a.values - b.values).norm() == 0.0);
  CHECK(a.timestamps == b.timestamps);
  CHECK((a.values - c.values).norm() != 0.0);
  CHECK_NOTHROW(a.validate());
}

TEST_CASE("unstable transitions are rejected") {
  Eigen::MatrixXd unit = Eigen::MatrixXd::Identity(2, 2);
  CHECK_THROWS_AS(synth_var1(2, 100, unit, 1.0, 1), UnstableTransition);
  Eigen::MatrixXd rotation(2, 2);  // spectral radius exactly 1
  rotation << 0.0, -1.0, 1.0, 0.0;
  CHECK(spectral_radius(rotation) == doctest::Approx(1.0));
  CHECK_THROWS_AS(synth_var1(2, 100, rotation, 1.0, 1), UnstableTransition);
  CHECK_THROWS_AS(synth_var1(2, 100, Eigen::MatrixXd::Identity(3, 3) * 0.5,
                             1.0, 1),
                  DimensionMismatch);
}

TEST_CASE("white noise has near-zero lag-1 autocovariance") {
  const auto panel = synth_var1(
      2, 5000, Eigen::MatrixXd::Zero(2, 2), 1.0, 103);
  const Eigen::MatrixXd a1 = autocovariance(panel, 1);
  // Entries are O(scale^2 / sqrt(T)) ~ 0.014; allow a generous margin.
  CHECK(a1.cwiseAbs().maxCoeff() < 0.08);
}

TEST_CASE("sample transition recovers the generator") {
  // With x_{t+1} = A x_t + eps, A diagonal: A1 ~ Gamma0 A^T, so
  // A1 A0^{-1} estimates diag(0.9, 0.1) up to sampling noise.
  Eigen::MatrixXd transition(2, 2);
  transition << 0.9, 0.0, 0.0, 0.1;
  const auto panel = synth_var1(2, 20000, transition, 1.0, 104);
  const Eigen::MatrixXd a0 = autocovariance(panel, 0);
  const Eigen::MatrixXd a1 = autocovariance(panel, 1);
  const Eigen::MatrixXd estimated =
      a0.ldlt().solve(a1.transpose()).transpose();  // A1 A0^{-1}
  CHECK((estimated - transition).cwiseAbs().maxCoeff() < 0.05);
}

TEST_CASE("validate rejects broken hand-built panels") {
  auto panel = testutil::make_panel(std::vector<double>{1.0, 2.0, 3.0});
  CHECK_NOTHROW(panel.validate());

  auto bad_name = panel;
  bad_name.assets[0] = "a,b";
  CHECK_THROWS_AS(bad_name.validate(), InvalidPanel);

  auto bad_value = panel;
  bad_value.values(1, 0) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(bad_value.validate(), MissingValue);

  auto bad_dates = panel;
  bad_dates.timestamps[1] = bad_dates.timestamps[0];
  CHECK_THROWS_AS(bad_dates.validate(), NonMonotonicDates);

  auto short_panel = testutil::make_panel(std::vector<double>{1.0, 2.0});
  CHECK_THROWS_AS(short_panel.validate(), InvalidPanel);
  CHECK_NOTHROW(short_panel.validate(2));
}

TEST_CASE("file loading errors carry the path") {
  CHECK_THROWS_WITH_AS(load_panel("/nonexistent/panel.csv"),
                       doctest::Contains("/nonexistent/panel.csv"), IoError);
}
