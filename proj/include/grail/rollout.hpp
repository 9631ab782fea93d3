#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "grail/grid_env.hpp"
#include "grail/reach_env.hpp"
#include "grail/rng.hpp"
#include "grail/types.hpp"

namespace grail {

enum class RolloutMode { greedy, sample };

namespace detail {

inline void check_discrete_dist(const ActionDistribution& d, const std::string& where) {
  if (!d.discrete()) throw std::runtime_error("invalid policy output (not discrete) at " + where);
  double sum = 0.0;
  for (double p : d.probs) {
    if (p < 0.0 || !std::isfinite(p))
      throw std::runtime_error("invalid policy distribution at " + where);
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-9)
    throw std::runtime_error("unnormalized policy distribution at " + where);
}

inline std::string grid_state_str(const GridState& s) {
  return "(" + std::to_string(s.x) + "," + std::to_string(s.y) + "," + std::to_string(s.dir) + ")";
}

}  // namespace detail

/// Picks a discrete action: greedy = first maximum, sample = inverse CDF.
inline int realize_discrete(const ActionDistribution& d, RolloutMode mode, RngStream& rng) {
  if (mode == RolloutMode::greedy) {
    int best = 0;
    for (std::size_t a = 1; a < d.probs.size(); ++a)
      if (d.probs[a] > d.probs[best]) best = static_cast<int>(a);
    return best;
  }
  const double u = rng.uniform();
  double acc = 0.0;
  for (std::size_t a = 0; a < d.probs.size(); ++a) {
    acc += d.probs[a];
    if (u < acc) return static_cast<int>(a);
  }
  return static_cast<int>(d.probs.size()) - 1;
}

/// Realizes a continuous action (clipped to the action box).
inline ContinuousAction realize_continuous(const ActionDistribution& d, RolloutMode mode,
                                           RngStream& rng) {
  ContinuousAction a;
  for (std::size_t i = 0; i < d.mean.size() && i < 3; ++i) {
    double v = d.mean[i];
    if (mode == RolloutMode::sample) v += d.scale[i] * rng.normal();
    a.v[i] = v;
  }
  return clip_action(a);
}

/// Fixed-horizon rollout: exactly `horizon` steps, no termination at the
/// goal. `policy` maps GridState -> ActionDistribution.
template <class Policy>
Trajectory rollout(const GridEnv& env, const Policy& policy, std::size_t horizon,
                   RngStream& rng, RolloutMode mode) {
  if (horizon < 1) throw std::invalid_argument("rollout: horizon must be >= 1");
  Trajectory t;
  t.env = EnvKind::grid;
  t.goal = env.goal();
  t.seed = static_cast<std::int64_t>(rng.master_seed());
  t.horizon = horizon;
  GridState s = env.initial_state();
  for (std::size_t i = 0; i < horizon; ++i) {
    const ActionDistribution d = policy(s);
    detail::check_discrete_dist(d, detail::grid_state_str(s));
    const DiscreteAction a{realize_discrete(d, mode, rng)};
    t.steps.push_back(Step{s, a});
    s = env.step(s, a, static_cast<int>(i)).next;
  }
  t.final_state = s;
  return t;
}

/// `policy` maps ReachState -> ActionDistribution (mean + scale).
template <class Policy>
Trajectory rollout(const ReachEnv& env, const Policy& policy, std::size_t horizon,
                   RngStream& rng, RolloutMode mode) {
  if (horizon < 1) throw std::invalid_argument("rollout: horizon must be >= 1");
  Trajectory t;
  t.env = EnvKind::reach;
  t.goal = env.goal();
  t.seed = static_cast<std::int64_t>(rng.master_seed());
  t.horizon = horizon;
  ReachState s = env.initial_state();
  for (std::size_t i = 0; i < horizon; ++i) {
    const ActionDistribution d = policy(s);
    if (d.discrete() || d.mean.size() != 3)
      throw std::runtime_error("invalid policy output (expected 3d gaussian) at step " +
                               std::to_string(i));
    const ContinuousAction a = realize_continuous(d, mode, rng);
    t.steps.push_back(Step{s, a});
    s = env.step(s, a, static_cast<int>(i)).next;
  }
  t.final_state = s;
  return t;
}

/// Plays a fixed action list, then holds `stay` forever. Used to execute
/// planner output as a demonstration.
class ScriptedGridPolicy {
 public:
  explicit ScriptedGridPolicy(std::vector<DiscreteAction> plan) : plan_(std::move(plan)) {}

  ActionDistribution operator()(const GridState&) const {
    g_policy_evals.fetch_add(1, std::memory_order_relaxed);
    std::vector<double> p(kGridActionCount, 0.0);
    const int code = cursor_ < plan_.size() ? plan_[cursor_].code : kStay;
    ++cursor_;
    p[static_cast<std::size_t>(code)] = 1.0;
    ActionDistribution d;
    d.probs = std::move(p);
    return d;
  }

 private:
  std::vector<DiscreteAction> plan_;
  mutable std::size_t cursor_ = 0;
};

}  // namespace grail
