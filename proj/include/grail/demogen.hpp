#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "grail/planner.hpp"
#include "grail/reach_env.hpp"
#include "grail/rollout.hpp"
#include "grail/rng.hpp"
#include "grail/types.hpp"

namespace grail {

enum class GridRegime { optimal, biased, suboptimal };

inline std::string to_string(GridRegime r) {
  switch (r) {
    case GridRegime::optimal: return "optimal";
    case GridRegime::biased: return "biased";
    case GridRegime::suboptimal: return "suboptimal";
  }
  return "?";
}

/// Action-noise description for continuous demonstrations.
struct NoiseSpec {
  enum class Kind { gaussian, uniform };
  Kind kind = Kind::gaussian;
  double level = 0.1;  // std dev (gaussian) or half-range (uniform), per component

  NoiseSpec() = default;
  NoiseSpec(Kind k, double lvl) : kind(k), level(lvl) {
    if (!(level > 0.0)) throw std::invalid_argument("NoiseSpec: level must be > 0");
  }
};

/// Probability of inserting a 180-degree turn detour before each planned
/// action. The detour [L,L,R,R] rotates half way around and back, so heading
/// and position after it equal those before it.
struct TurnInsertionSpec {
  double p = 0.5;

  TurnInsertionSpec() = default;
  explicit TurnInsertionSpec(double prob) : p(prob) {
    if (p < 0.0 || p > 1.0) throw std::invalid_argument("TurnInsertionSpec: p outside [0,1]");
  }
};

inline std::vector<DiscreteAction> corrupt_suboptimal(const std::vector<DiscreteAction>& plan,
                                                      const TurnInsertionSpec& spec,
                                                      RngStream& rng) {
  std::vector<DiscreteAction> out;
  out.reserve(plan.size() * 5);
  for (const auto& a : plan) {
    if (rng.bernoulli(spec.p)) {
      out.push_back(DiscreteAction{kTurnLeft});
      out.push_back(DiscreteAction{kTurnLeft});
      out.push_back(DiscreteAction{kTurnRight});
      out.push_back(DiscreteAction{kTurnRight});
    }
    out.push_back(a);
  }
  return out;
}

/// n fixed-horizon demonstrations for one grid goal. The plan is executed
/// through the environment and padded with `stay`; the suboptimal regime
/// draws fresh turn insertions per trajectory.
inline std::vector<Trajectory> gen_grid_demos(const GridSpec& spec, const GoalId& goal,
                                              GridRegime regime, int n, std::size_t horizon,
                                              RngStream& rng,
                                              const TurnInsertionSpec& turns = TurnInsertionSpec{},
                                              const BiasSpec* bias = nullptr) {
  if (n < 1) throw std::invalid_argument("gen_grid_demos: n must be >= 1");
  GridEnv env(spec, goal);
  const GridState start = env.initial_state();

  std::vector<DiscreteAction> base;
  if (regime == GridRegime::biased) {
    const BiasSpec spec_bias = bias ? *bias : default_bias_spec(spec, {goal});
    base = biased_plan(spec, start, goal, spec_bias);
  } else {
    base = optimal_plan(spec, start, goal);
  }

  std::vector<Trajectory> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    std::vector<DiscreteAction> plan = base;
    if (regime == GridRegime::suboptimal) plan = corrupt_suboptimal(base, turns, rng);
    ScriptedGridPolicy scripted(std::move(plan));
    Trajectory t = rollout(env, scripted, horizon, rng, RolloutMode::greedy);
    out.push_back(std::move(t));
  }
  return out;
}

/// Proportional reach expert: a_t = clip(k (g - p_t) / step_scale), gain k=1,
/// optionally perturbed by i.i.d. per-component action noise (then re-clipped).
inline std::vector<Trajectory> gen_reach_demos(const ReachSpec& spec, const GoalId& goal,
                                               const std::optional<NoiseSpec>& noise, int n,
                                               RngStream& rng) {
  if (n < 1) throw std::invalid_argument("gen_reach_demos: n must be >= 1");
  ReachEnv env(spec, goal);
  const auto& g = env.goal_pos();

  std::vector<Trajectory> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    Trajectory t;
    t.env = EnvKind::reach;
    t.goal = goal;
    t.seed = static_cast<std::int64_t>(rng.master_seed());
    t.horizon = spec.horizon;
    ReachState s = env.initial_state();
    for (std::size_t step = 0; step < spec.horizon; ++step) {
      ContinuousAction a;
      for (int c = 0; c < 3; ++c) a.v[c] = (g[c] - s.p[c]) / spec.step_scale;
      a = clip_action(a);
      if (noise) {
        for (int c = 0; c < 3; ++c)
          a.v[c] += noise->kind == NoiseSpec::Kind::gaussian
                        ? noise->level * rng.normal()
                        : rng.uniform(-noise->level, noise->level);
        a = clip_action(a);
      }
      t.steps.push_back(Step{s, a});
      s = env.step(s, a, static_cast<int>(step)).next;
    }
    t.final_state = s;
    out.push_back(std::move(t));
  }
  return out;
}

}  // namespace grail
