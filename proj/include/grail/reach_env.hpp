#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "grail/counters.hpp"
#include "grail/grid_env.hpp"  // StepOutcome
#include "grail/types.hpp"

namespace grail {

/// Continuous 3D point-mass reach task. Actions are unitless displacement
/// commands in [-1,1]^3, scaled by step_scale meters per step. Reward is the
/// negative Euclidean distance to the goal after the move.
struct ReachSpec {
  std::array<double, 3> start{0.0, 0.0, 0.0};
  double step_scale = 0.05;  // meters per unit action
  double at_goal_radius = 0.01;
  std::size_t horizon = 50;
  // Four targets, pairwise separated and equidistant from the start.
  std::vector<std::array<double, 3>> goals{
      {0.2, 0.2, 0.2}, {0.2, -0.2, 0.2}, {-0.2, 0.2, 0.2}, {-0.2, -0.2, 0.2}};
};

inline double distance3(const std::array<double, 3>& a, const std::array<double, 3>& b) {
  const double dx = a[0] - b[0], dy = a[1] - b[1], dz = a[2] - b[2];
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

inline StepOutcome<ReachState> reach_step(const ReachSpec& spec, const ReachState& s,
                                          const ContinuousAction& a,
                                          const std::array<double, 3>& goal_pos) {
  for (double c : s.p)
    if (!std::isfinite(c)) throw std::invalid_argument("reach_step: non-finite state");
  for (double c : a.v)
    if (!std::isfinite(c)) throw std::invalid_argument("reach_step: non-finite action");

  const ContinuousAction clipped = clip_action(a);
  StepOutcome<ReachState> out;
  out.next = s;
  for (int i = 0; i < 3; ++i) out.next.p[i] += spec.step_scale * clipped.v[i];
  const double d = distance3(out.next.p, goal_pos);
  out.reward = -d;
  out.at_goal = d < spec.at_goal_radius;
  return out;
}

class ReachEnv {
 public:
  using state_type = ReachState;
  using action_type = ContinuousAction;

  ReachEnv(ReachSpec spec, GoalId goal) : spec_(std::move(spec)), goal_(std::move(goal)) {
    const int t = reach_goal_target(goal_);
    if (t < 0 || t >= static_cast<int>(spec_.goals.size()))
      throw std::invalid_argument("reach goal target out of range: " + goal_.label);
    goal_pos_ = spec_.goals[static_cast<std::size_t>(t)];
  }

  EnvKind kind() const { return EnvKind::reach; }
  const ReachSpec& spec() const { return spec_; }
  const GoalId& goal() const { return goal_; }
  const std::array<double, 3>& goal_pos() const { return goal_pos_; }

  static constexpr int state_dim() { return 3; }
  static constexpr int action_dim() { return 3; }

  ReachState initial_state() const { return ReachState{spec_.start}; }

  StepOutcome<ReachState> step(const ReachState& s, const ContinuousAction& a,
                               int /*step_count*/) const {
    g_env_interactions.fetch_add(1, std::memory_order_relaxed);
    return reach_step(spec_, s, a, goal_pos_);
  }

  bool at_goal(const ReachState& s) const {
    return distance3(s.p, goal_pos_) < spec_.at_goal_radius;
  }

 private:
  ReachSpec spec_;
  GoalId goal_;
  std::array<double, 3> goal_pos_{};
};

}  // namespace grail
