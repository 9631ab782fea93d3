#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace grail {

enum class EnvKind { grid, reach };

inline std::string to_string(EnvKind k) { return k == EnvKind::grid ? "grid" : "reach"; }

inline EnvKind env_kind_from_string(const std::string& s) {
  if (s == "grid") return EnvKind::grid;
  if (s == "reach") return EnvKind::reach;
  throw std::invalid_argument("unknown env kind: " + s);
}

/// Candidate goal. The label is self-describing: "g_X_Y" encodes grid
/// coordinates, "r_K" a reach target index.
struct GoalId {
  int index = 0;
  std::string label;

  friend bool operator==(const GoalId& a, const GoalId& b) {
    return a.index == b.index && a.label == b.label;
  }
  friend bool operator<(const GoalId& a, const GoalId& b) { return a.index < b.index; }
};

inline GoalId make_grid_goal(int index, int x, int y) {
  return GoalId{index, "g_" + std::to_string(x) + "_" + std::to_string(y)};
}

inline GoalId make_reach_goal(int index) {
  return GoalId{index, "r_" + std::to_string(index)};
}

/// Parses "g_X_Y" into grid coordinates.
inline std::pair<int, int> grid_goal_cell(const GoalId& g) {
  if (g.label.size() < 5 || g.label[0] != 'g' || g.label[1] != '_')
    throw std::invalid_argument("not a grid goal label: " + g.label);
  const auto mid = g.label.find('_', 2);
  if (mid == std::string::npos) throw std::invalid_argument("bad grid goal label: " + g.label);
  return {std::stoi(g.label.substr(2, mid - 2)), std::stoi(g.label.substr(mid + 1))};
}

/// Parses "r_K" into a reach target index.
inline int reach_goal_target(const GoalId& g) {
  if (g.label.size() < 3 || g.label[0] != 'r' || g.label[1] != '_')
    throw std::invalid_argument("not a reach goal label: " + g.label);
  return std::stoi(g.label.substr(2));
}

// Grid action codes. Frozen for file-format stability.
struct DiscreteAction {
  int code = 0;  // 0=turn-left 1=turn-right 2=forward 3=stay
  friend bool operator==(const DiscreteAction&, const DiscreteAction&) = default;
};

inline constexpr int kTurnLeft = 0;
inline constexpr int kTurnRight = 1;
inline constexpr int kForward = 2;
inline constexpr int kStay = 3;
inline constexpr int kGridActionCount = 4;

struct ContinuousAction {
  std::array<double, 3> v{0.0, 0.0, 0.0};
  friend bool operator==(const ContinuousAction&, const ContinuousAction&) = default;
};

inline ContinuousAction clip_action(const ContinuousAction& a) {
  ContinuousAction out = a;
  for (double& c : out.v) c = std::clamp(c, -1.0, 1.0);
  return out;
}

struct GridState {
  int x = 1;    // column, 1..7
  int y = 1;    // row, 1..7; y grows southward
  int dir = 0;  // 0=east 1=south 2=west 3=north
  friend bool operator==(const GridState&, const GridState&) = default;
};

struct ReachState {
  std::array<double, 3> p{0.0, 0.0, 0.0};  // position, meters
  friend bool operator==(const ReachState&, const ReachState&) = default;
};

using State = std::variant<GridState, ReachState>;
using Action = std::variant<DiscreteAction, ContinuousAction>;

struct Step {
  State s;
  Action a;
  friend bool operator==(const Step&, const Step&) = default;
};

/// Fixed-horizon trajectory: exactly `horizon` (state, action) steps plus the
/// state reached after the last action.
struct Trajectory {
  EnvKind env = EnvKind::grid;
  std::optional<GoalId> goal;
  std::int64_t seed = 0;
  std::size_t horizon = 0;
  std::vector<Step> steps;
  State final_state;

  friend bool operator==(const Trajectory&, const Trajectory&) = default;
};

/// Per-goal demonstration sets, keyed by goal index.
struct DemoSet {
  std::vector<GoalId> goals;
  std::map<int, std::vector<Trajectory>> per_goal;

  const std::vector<Trajectory>& demos_for(const GoalId& g) const {
    auto it = per_goal.find(g.index);
    if (it == per_goal.end())
      throw std::out_of_range("no demonstrations for goal " + g.label);
    return it->second;
  }
};

struct GRDTask {
  std::vector<GoalId> goals;
  DemoSet demos;
  std::vector<Step> observed;  // partial trajectory prefix, length >= 1
};

/// Either a discrete probability vector or a diagonal Gaussian (mean, scale).
struct ActionDistribution {
  std::vector<double> probs;         // discrete mode
  std::vector<double> mean, scale;   // continuous mode

  bool discrete() const { return !probs.empty(); }
};

inline ActionDistribution make_discrete_dist(std::vector<double> probs) {
  double sum = 0.0;
  for (double p : probs) {
    if (p < 0.0 || !std::isfinite(p))
      throw std::invalid_argument("ActionDistribution: negative or non-finite probability");
    sum += p;
  }
  if (sum <= 0.0) throw std::invalid_argument("ActionDistribution: zero mass");
  for (double& p : probs) p /= sum;
  ActionDistribution d;
  d.probs = std::move(probs);
  return d;
}

inline ActionDistribution make_gaussian_dist(std::vector<double> mean, std::vector<double> scale) {
  if (mean.size() != scale.size())
    throw std::invalid_argument("ActionDistribution: mean/scale size mismatch");
  for (double s : scale)
    if (!(s > 0.0)) throw std::invalid_argument("ActionDistribution: scale must be positive");
  ActionDistribution d;
  d.mean = std::move(mean);
  d.scale = std::move(scale);
  return d;
}

/// Checks every GRDTask invariant; returns human-readable violations.
/// Validation never throws.
inline std::vector<std::string> validate_task(const GRDTask& task) {
  std::vector<std::string> out;
  if (task.goals.empty()) out.push_back("goals empty");

  std::map<int, int> index_count;
  std::map<std::string, int> label_count;
  for (const auto& g : task.goals) {
    if (++index_count[g.index] == 2)
      out.push_back("duplicate goal index " + std::to_string(g.index));
    if (++label_count[g.label] == 2) out.push_back("duplicate goal label " + g.label);
  }

  for (const auto& g : task.goals) {
    auto it = task.demos.per_goal.find(g.index);
    if (it == task.demos.per_goal.end() || it->second.empty()) {
      out.push_back("demos missing goal " + g.label);
      continue;
    }
    for (const auto& t : it->second) {
      if (!t.goal || t.goal->index != g.index) {
        out.push_back("trajectory under goal " + g.label + " carries a different goal label");
        break;
      }
    }
  }

  std::optional<EnvKind> env;
  std::optional<std::size_t> horizon;
  for (const auto& [idx, trajs] : task.demos.per_goal) {
    for (const auto& t : trajs) {
      if (t.steps.size() != t.horizon)
        out.push_back("trajectory for goal index " + std::to_string(idx) +
                      " violates the fixed-horizon contract");
      if (!env) env = t.env;
      else if (*env != t.env) out.push_back("demonstrations mix environment kinds");
      if (!horizon) horizon = t.horizon;
      else if (*horizon != t.horizon) out.push_back("demonstrations mix horizons");
    }
  }

  if (task.observed.empty()) out.push_back("observed prefix empty");
  return out;
}

}  // namespace grail
