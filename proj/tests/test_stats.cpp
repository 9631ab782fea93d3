#include <catch2/catch_amalgamated.hpp>

#include "grail/stats.hpp"

using namespace grail;

namespace {
const std::vector<GoalId> kTwoGoals = {{0, "A"}, {1, "B"}};
}

TEST_CASE("perfect predictions score 1.0 on every metric") {
  const std::vector<std::pair<int, int>> pairs = {{0, 0}, {1, 1}, {0, 0}};
  const auto m = classification_metrics(pairs, kTwoGoals);
  REQUIRE(m.accuracy == 1.0);
  REQUIRE(m.macro_precision == 1.0);
  REQUIRE(m.macro_recall == 1.0);
  REQUIRE(m.macro_f1 == 1.0);
}

TEST_CASE("macro F1 on the [A,A,B] vs [A,B,B] example is 2/3") {
  const std::vector<std::pair<int, int>> pairs = {{0, 0}, {0, 1}, {1, 1}};
  const auto m = classification_metrics(pairs, kTwoGoals);
  REQUIRE(m.macro_f1 == Catch::Approx(2.0 / 3.0).margin(1e-12));
  REQUIRE(m.accuracy == Catch::Approx(2.0 / 3.0).margin(1e-12));
}

TEST_CASE("a constant predictor on a balanced set gets macro F1 1/3") {
  const std::vector<std::pair<int, int>> pairs = {{0, 0}, {0, 0}, {1, 0}, {1, 0}};
  const auto m = classification_metrics(pairs, kTwoGoals);
  REQUIRE(m.accuracy == Catch::Approx(0.5).margin(1e-12));
  REQUIRE(m.macro_f1 == Catch::Approx(1.0 / 3.0).margin(1e-12));
  // Class A: precision 0.5, recall 1 -> F1 2/3; class B: 0/0 -> 0.
}

TEST_CASE("labels outside the goal set are rejected") {
  const std::vector<std::pair<int, int>> pairs = {{0, 7}};
  REQUIRE_THROWS_AS(classification_metrics(pairs, kTwoGoals), std::invalid_argument);
  REQUIRE_THROWS_AS(classification_metrics({}, kTwoGoals), std::invalid_argument);
}

TEST_CASE("identical values aggregate to a degenerate interval") {
  const std::vector<double> v(10, 0.8);
  const auto s = aggregate_stats(v);
  REQUIRE(s.mean == Catch::Approx(0.8).margin(1e-12));
  REQUIRE(s.stddev == Catch::Approx(0.0).margin(1e-12));
  REQUIRE(s.ci_low == Catch::Approx(0.8).margin(1e-12));
  REQUIRE(s.ci_high == Catch::Approx(0.8).margin(1e-12));
}

TEST_CASE("n=10 confidence interval uses the t quantile 2.262") {
  std::vector<double> v;
  for (int i = 0; i < 10; ++i) v.push_back(0.1 * i);
  const auto s = aggregate_stats(v);
  const double expected_half = 2.262 * s.stddev / std::sqrt(10.0);
  REQUIRE(s.ci_high - s.mean == Catch::Approx(expected_half).epsilon(1e-3));
  REQUIRE(s.mean - s.ci_low == Catch::Approx(expected_half).epsilon(1e-3));
  REQUIRE(s.ci_low <= s.mean);
  REQUIRE(s.mean <= s.ci_high);
}

TEST_CASE("a balanced 0/1 sample has mean one half") {
  std::vector<double> v;
  for (int i = 0; i < 5; ++i) {
    v.push_back(0.0);
    v.push_back(1.0);
  }
  REQUIRE(aggregate_stats(v).mean == Catch::Approx(0.5).margin(1e-12));
}

TEST_CASE("single-value aggregation degenerates at the mean") {
  const std::vector<double> v{0.42};
  const auto s = aggregate_stats(v);
  REQUIRE(s.n == 1);
  REQUIRE(s.stddev == 0.0);
  REQUIRE(s.ci_low == s.mean);
  REQUIRE(s.ci_high == s.mean);
}

TEST_CASE("t quantiles match the standard table") {
  REQUIRE(t_quantile_975(1) == Catch::Approx(12.706).epsilon(1e-3));
  REQUIRE(t_quantile_975(9) == Catch::Approx(2.262).epsilon(1e-3));
  REQUIRE(t_quantile_975(30) == Catch::Approx(2.042).epsilon(1e-3));
  REQUIRE(t_quantile_975(1000000) == Catch::Approx(1.960).epsilon(1e-3));
  REQUIRE_THROWS_AS(t_quantile_975(0), std::invalid_argument);
}
