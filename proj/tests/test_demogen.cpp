#include <catch2/catch_amalgamated.hpp>

#include <map>

#include "grail/demogen.hpp"
#include "grail/planner.hpp"
#include "grail/traj_io.hpp"

using namespace grail;

namespace {

const GridSpec kSpec;

// Test-only transition, written independently of grid_step: the oracle below
// must not share code with the planner under test.
struct SimState {
  int x, y, dir;
};

bool oracle_free(const GridSpec& spec, int x, int y) {
  return x >= 1 && x <= spec.width - 2 && y >= 1 && y <= spec.height - 2 &&
         !(x == spec.obstacle_x && y == spec.obstacle_y);
}

SimState oracle_apply(const GridSpec& spec, SimState s, int code) {
  static const int dx[4] = {1, 0, -1, 0};
  static const int dy[4] = {0, 1, 0, -1};
  if (code == 0) s.dir = (s.dir + 3) % 4;
  else if (code == 1) s.dir = (s.dir + 1) % 4;
  else if (code == 2) {
    const int nx = s.x + dx[s.dir], ny = s.y + dy[s.dir];
    if (oracle_free(spec, nx, ny)) {
      s.x = nx;
      s.y = ny;
    }
  }
  return s;
}

bool oracle_dfs(const GridSpec& spec, SimState s, int gx, int gy, int depth) {
  if (depth == 0) return s.x == gx && s.y == gy;
  for (int code = 0; code < 3; ++code)
    if (oracle_dfs(spec, oracle_apply(spec, s, code), gx, gy, depth - 1)) return true;
  return false;
}

/// Exhaustive enumeration over all {L,R,F} action sequences of increasing
/// length; returns the smallest length that ends on the goal cell.
int oracle_shortest_length(const GridSpec& spec, int gx, int gy, int cap = 12) {
  const SimState start{spec.start_x, spec.start_y, spec.start_dir};
  for (int len = 0; len <= cap; ++len)
    if (oracle_dfs(spec, start, gx, gy, len)) return len;
  return -1;
}

GridState simulate(const GridSpec& spec, const std::vector<DiscreteAction>& plan,
                   std::vector<std::pair<int, int>>* visited = nullptr) {
  GridState s{spec.start_x, spec.start_y, spec.start_dir};
  if (visited) visited->push_back({s.x, s.y});
  int t = 0;
  for (const auto& a : plan) {
    s = grid_step(spec, s, a, t++, 7, 1).next;
    if (visited) visited->push_back({s.x, s.y});
  }
  return s;
}

const std::vector<std::pair<GoalId, int>> kPresetGoals = {
    {make_grid_goal(0, 7, 1), 11}, {make_grid_goal(1, 7, 7), 11},
    {make_grid_goal(2, 7, 3), 9},  {make_grid_goal(3, 7, 5), 9},
    {make_grid_goal(4, 5, 1), 8},  {make_grid_goal(5, 5, 7), 8}};

}  // namespace

TEST_CASE("optimal_plan handles trivial goals") {
  REQUIRE(optimal_plan(kSpec, GridState{1, 4, 0}, make_grid_goal(0, 2, 4)) ==
          std::vector<DiscreteAction>{DiscreteAction{kForward}});
  REQUIRE(optimal_plan(kSpec, GridState{1, 4, 0}, make_grid_goal(0, 1, 4)).empty());
}

TEST_CASE("optimal_plan matches the exhaustive oracle on every preset goal") {
  for (const auto& [goal, expected_len] : kPresetGoals) {
    const auto plan = optimal_plan(kSpec, GridState{1, 4, 0}, goal);
    const auto [gx, gy] = grid_goal_cell(goal);
    INFO("goal " << goal.label);
    REQUIRE(static_cast<int>(plan.size()) == oracle_shortest_length(kSpec, gx, gy));
    REQUIRE(static_cast<int>(plan.size()) == expected_len);
    const GridState end = simulate(kSpec, plan);
    REQUIRE(end.x == gx);
    REQUIRE(end.y == gy);
  }
}

TEST_CASE("optimal_plan breaks ties lexicographically (L < R < F)") {
  const auto plan = optimal_plan(kSpec, GridState{1, 4, 0}, make_grid_goal(0, 7, 1));
  const std::vector<int> expected = {kTurnLeft, kForward, kForward, kForward,
                                     kTurnRight, kForward, kForward, kForward,
                                     kForward, kForward, kForward};
  REQUIRE(plan.size() == expected.size());
  for (std::size_t i = 0; i < plan.size(); ++i) REQUIRE(plan[i].code == expected[i]);
}

TEST_CASE("optimal_plan reports unreachable goals") {
  GridSpec narrow;
  narrow.width = 3;
  narrow.height = 5;
  narrow.obstacle_x = 1;
  narrow.obstacle_y = 2;
  narrow.start_x = 1;
  narrow.start_y = 1;
  REQUIRE_THROWS_AS(optimal_plan(narrow, GridState{1, 1, 0}, make_grid_goal(0, 1, 3)),
                    std::runtime_error);
}

TEST_CASE("north-first biased plan for (7,1) is the documented route") {
  BiasSpec bias;
  bias.per_goal[0] = AxisPreference::north_first;
  const auto plan = biased_plan(kSpec, GridState{1, 4, 0}, make_grid_goal(0, 7, 1), bias);
  const std::vector<int> expected = {kTurnLeft, kForward, kForward, kForward,
                                     kTurnRight, kForward, kForward, kForward,
                                     kForward, kForward, kForward};
  REQUIRE(plan.size() == 11);
  for (std::size_t i = 0; i < plan.size(); ++i) REQUIRE(plan[i].code == expected[i]);
  // Degenerate bias: identical to the optimal tie-break.
  REQUIRE(plan == optimal_plan(kSpec, GridState{1, 4, 0}, make_grid_goal(0, 7, 1)));
}

TEST_CASE("east-first biased plan for (7,7) hugs the obstacle row") {
  BiasSpec bias;
  bias.per_goal[1] = AxisPreference::east_first;
  const GoalId goal = make_grid_goal(1, 7, 7);
  const auto plan = biased_plan(kSpec, GridState{1, 4, 0}, goal, bias);
  REQUIRE(plan.size() == 11);
  for (int i = 0; i < 5; ++i) REQUIRE(plan[static_cast<std::size_t>(i)].code == kForward);
  const GridState end = simulate(kSpec, plan);
  REQUIRE(end.x == 7);
  REQUIRE(end.y == 7);
}

TEST_CASE("default biases preserve optimality on every preset goal") {
  std::vector<GoalId> goals;
  for (const auto& [g, len] : kPresetGoals) goals.push_back(g);
  const BiasSpec bias = default_bias_spec(kSpec, goals);
  for (const auto& [goal, expected_len] : kPresetGoals) {
    const auto biased = biased_plan(kSpec, GridState{1, 4, 0}, goal, bias);
    const auto shortest = optimal_plan(kSpec, GridState{1, 4, 0}, goal);
    INFO("goal " << goal.label << " pref " << to_string(bias.preference_for(goal)));
    REQUIRE(biased.size() == shortest.size());
  }
}

TEST_CASE("corrupt_suboptimal edge probabilities") {
  const auto plan = optimal_plan(kSpec, GridState{1, 4, 0}, make_grid_goal(0, 7, 1));
  RngStream rng = derive_stream(21, "corrupt");
  REQUIRE(corrupt_suboptimal(plan, TurnInsertionSpec{0.0}, rng) == plan);
  REQUIRE(corrupt_suboptimal(plan, TurnInsertionSpec{1.0}, rng).size() == 55);
  REQUIRE_THROWS_AS(TurnInsertionSpec{1.5}, std::invalid_argument);
}

TEST_CASE("corruption preserves the path and final state") {
  RngStream rng = derive_stream(22, "corrupt/plans");
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<DiscreteAction> plan;
    const std::size_t len = 1 + rng.uniform_index(15);
    for (std::size_t i = 0; i < len; ++i)
      plan.push_back(DiscreteAction{static_cast<int>(rng.uniform_index(3))});

    const auto corrupted = corrupt_suboptimal(plan, TurnInsertionSpec{0.5}, rng);

    std::vector<std::pair<int, int>> cells_orig, cells_corr;
    const GridState end_orig = simulate(kSpec, plan, &cells_orig);
    const GridState end_corr = simulate(kSpec, corrupted, &cells_corr);
    REQUIRE(end_orig == end_corr);

    std::map<std::pair<int, int>, int> count_orig, count_corr;
    for (const auto& c : cells_orig) count_orig[c]++;
    for (const auto& c : cells_corr) count_corr[c]++;
    for (const auto& [cell, n] : count_orig) REQUIRE(count_corr[cell] >= n);
  }
}

TEST_CASE("optimal grid demos are identical fixed-horizon trajectories") {
  RngStream rng = derive_stream(30, "demos/opt");
  const auto demos =
      gen_grid_demos(kSpec, make_grid_goal(0, 7, 1), GridRegime::optimal, 10, 50, rng);
  REQUIRE(demos.size() == 10);
  for (const auto& t : demos) {
    REQUIRE(t.steps.size() == 50);
    REQUIRE(t.horizon == 50);
    REQUIRE(t.goal->label == "g_7_1");
    REQUIRE(t == demos[0]);
  }
}

TEST_CASE("suboptimal grid demos vary across trajectories") {
  RngStream rng = derive_stream(31, "demos/sub");
  const auto demos =
      gen_grid_demos(kSpec, make_grid_goal(0, 7, 1), GridRegime::suboptimal, 10, 50, rng);
  bool all_equal = true;
  for (const auto& t : demos) all_equal = all_equal && t == demos[0];
  REQUIRE_FALSE(all_equal);
}

TEST_CASE("demo generation is deterministic in the stream") {
  const auto gen = [](std::uint64_t seed) {
    RngStream rng = derive_stream(seed, "demos/det");
    std::string bytes;
    for (const auto& t :
         gen_grid_demos(kSpec, make_grid_goal(0, 7, 1), GridRegime::suboptimal, 5, 50, rng))
      bytes += encode_trajectory(t) + "\n";
    return bytes;
  };
  REQUIRE(gen(7) == gen(7));
  REQUIRE(gen(7) != gen(8));
}

TEST_CASE("noiseless reach expert converges in distance/step_scale steps") {
  ReachSpec spec;
  spec.goals = {{0.2, 0.0, 0.0}};
  RngStream rng = derive_stream(40, "reach/exact");
  const auto demos = gen_reach_demos(spec, make_reach_goal(0), std::nullopt, 1, rng);
  const auto& t = demos[0];
  const auto& p4 = std::get<ReachState>(t.steps[4].s).p;
  REQUIRE(std::abs(p4[0] - 0.2) < 1e-9);
  REQUIRE(std::abs(p4[1]) < 1e-12);
  REQUIRE(std::abs(p4[2]) < 1e-12);
}

TEST_CASE("action noise degrades mean final distance") {
  ReachSpec spec;
  RngStream clean_rng = derive_stream(41, "reach/clean");
  RngStream noisy_rng = derive_stream(41, "reach/noisy");
  const GoalId goal = make_reach_goal(0);
  const auto clean = gen_reach_demos(spec, goal, std::nullopt, 50, clean_rng);
  const auto noisy = gen_reach_demos(
      spec, goal, NoiseSpec{NoiseSpec::Kind::gaussian, 0.3}, 50, noisy_rng);
  const auto mean_final = [&](const std::vector<Trajectory>& ts) {
    double sum = 0.0;
    for (const auto& t : ts)
      sum += distance3(std::get<ReachState>(t.final_state).p, spec.goals[0]);
    return sum / static_cast<double>(ts.size());
  };
  REQUIRE(mean_final(noisy) > mean_final(clean));
}
