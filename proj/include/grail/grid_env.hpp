#pragma once

#include <stdexcept>
#include <string>
#include <tuple>

#include "grail/counters.hpp"
#include "grail/types.hpp"

namespace grail {

/// 9x9 gridworld (outer ring is wall) with a single obstacle. Free cells are
/// x,y in [1,7]. The agent starts at (1,4) facing east; y grows southward.
struct GridSpec {
  int width = 9;
  int height = 9;
  int obstacle_x = 7;
  int obstacle_y = 4;
  int start_x = 1;
  int start_y = 4;
  int start_dir = 0;      // east
  int max_steps = 324;    // reward horizon in the sparse-success formula
};

inline bool grid_free_cell(const GridSpec& spec, int x, int y) {
  if (x < 1 || x > spec.width - 2 || y < 1 || y > spec.height - 2) return false;
  return !(x == spec.obstacle_x && y == spec.obstacle_y);
}

inline bool grid_state_valid(const GridSpec& spec, const GridState& s) {
  return grid_free_cell(spec, s.x, s.y) && s.dir >= 0 && s.dir < 4;
}

template <class S>
struct StepOutcome {
  S next;
  double reward = 0.0;
  bool at_goal = false;
};

// dir 0=east(+x) 1=south(+y) 2=west(-x) 3=north(-y)
inline constexpr int kDx[4] = {1, 0, -1, 0};
inline constexpr int kDy[4] = {0, 1, 0, -1};

/// Pure grid transition. Forward into a wall or the obstacle is a silent
/// no-op. Reward fires only on the step that enters the goal cell:
/// 1 - 0.9 * (step_count / max_steps).
inline StepOutcome<GridState> grid_step(const GridSpec& spec, const GridState& s,
                                        DiscreteAction a, int step_count, int goal_x,
                                        int goal_y) {
  if (!grid_state_valid(spec, s))
    throw std::invalid_argument("grid_step: invalid state (" + std::to_string(s.x) + "," +
                                std::to_string(s.y) + "," + std::to_string(s.dir) + ")");
  if (step_count < 0) throw std::invalid_argument("grid_step: negative step_count");
  if (a.code < 0 || a.code >= kGridActionCount)
    throw std::invalid_argument("grid_step: invalid action code " + std::to_string(a.code));

  GridState next = s;
  switch (a.code) {
    case kTurnLeft:
      next.dir = (s.dir + 3) % 4;
      break;
    case kTurnRight:
      next.dir = (s.dir + 1) % 4;
      break;
    case kForward: {
      const int nx = s.x + kDx[s.dir];
      const int ny = s.y + kDy[s.dir];
      if (grid_free_cell(spec, nx, ny)) {
        next.x = nx;
        next.y = ny;
      }
      break;
    }
    case kStay:
      break;
  }

  StepOutcome<GridState> out;
  out.next = next;
  out.at_goal = (next.x == goal_x && next.y == goal_y);
  const bool was_at_goal = (s.x == goal_x && s.y == goal_y);
  if (out.at_goal && !was_at_goal)
    out.reward = 1.0 - 0.9 * (static_cast<double>(step_count) / spec.max_steps);
  return out;
}

/// Goal-bound interactive grid environment. Every step() increments the
/// global env-interaction counter; scoring code must never touch this.
class GridEnv {
 public:
  using state_type = GridState;
  using action_type = DiscreteAction;

  GridEnv(GridSpec spec, GoalId goal) : spec_(spec), goal_(std::move(goal)) {
    std::tie(goal_x_, goal_y_) = grid_goal_cell(goal_);
    if (!grid_free_cell(spec_, goal_x_, goal_y_))
      throw std::invalid_argument("goal cell not free: " + goal_.label);
  }

  EnvKind kind() const { return EnvKind::grid; }
  const GridSpec& spec() const { return spec_; }
  const GoalId& goal() const { return goal_; }
  int goal_x() const { return goal_x_; }
  int goal_y() const { return goal_y_; }

  int n_states() const { return 7 * 7 * 4; }
  static constexpr int n_actions() { return kGridActionCount; }

  int state_index(const GridState& s) const {
    return ((s.y - 1) * 7 + (s.x - 1)) * 4 + s.dir;
  }

  GridState state_from_index(int idx) const {
    GridState s;
    s.dir = idx % 4;
    const int cell = idx / 4;
    s.x = cell % 7 + 1;
    s.y = cell / 7 + 1;
    return s;
  }

  GridState initial_state() const {
    return GridState{spec_.start_x, spec_.start_y, spec_.start_dir};
  }

  StepOutcome<GridState> step(const GridState& s, DiscreteAction a, int step_count) const {
    g_env_interactions.fetch_add(1, std::memory_order_relaxed);
    return grid_step(spec_, s, a, step_count, goal_x_, goal_y_);
  }

  bool at_goal(const GridState& s) const { return s.x == goal_x_ && s.y == goal_y_; }

 private:
  GridSpec spec_;
  GoalId goal_;
  int goal_x_ = 0, goal_y_ = 0;
};

}  // namespace grail
