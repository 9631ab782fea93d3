#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "grail/bank.hpp"
#include "grail/counters.hpp"
#include "grail/reach_env.hpp"
#include "grail/scoring.hpp"
#include "grail/types.hpp"

namespace grail {

/// How observability fractions translate into prefix lengths.
/// `meaningful` applies the fraction to the pre-padding trajectory (the steps
/// up to first goal arrival); `horizon` applies it to the fixed rollout
/// length, the convention behind the suboptimal-regime evaluation tables.
enum class PrefixBasis { meaningful, horizon };

inline std::string to_string(PrefixBasis b) {
  return b == PrefixBasis::meaningful ? "meaningful" : "horizon";
}

inline PrefixBasis prefix_basis_from_string(const std::string& s) {
  if (s == "meaningful") return PrefixBasis::meaningful;
  if (s == "horizon") return PrefixBasis::horizon;
  throw std::invalid_argument("unknown prefix basis: " + s);
}

/// Index of the first step whose state sits on the trajectory's goal, or the
/// horizon when the goal is never reached (or the trajectory is unlabeled).
inline std::size_t meaningful_length(const Trajectory& traj,
                                     const ReachSpec& reach_spec = ReachSpec{}) {
  if (!traj.goal) return traj.steps.size();
  if (traj.env == EnvKind::grid) {
    const auto [gx, gy] = grid_goal_cell(*traj.goal);
    for (std::size_t i = 0; i < traj.steps.size(); ++i) {
      const auto& s = std::get<GridState>(traj.steps[i].s);
      if (s.x == gx && s.y == gy) return i;
    }
    const auto& fin = std::get<GridState>(traj.final_state);
    if (fin.x == gx && fin.y == gy) return traj.steps.size();
  } else {
    const int t = reach_goal_target(*traj.goal);
    const auto& goal = reach_spec.goals.at(static_cast<std::size_t>(t));
    for (std::size_t i = 0; i < traj.steps.size(); ++i) {
      const auto& s = std::get<ReachState>(traj.steps[i].s);
      if (distance3(s.p, goal) < reach_spec.at_goal_radius) return i;
    }
  }
  return traj.steps.size();
}

/// First max(1, ceil(fraction * basis length)) steps of the trajectory.
inline std::vector<Step> observe_prefix(const Trajectory& traj, double fraction,
                                        PrefixBasis basis = PrefixBasis::meaningful,
                                        const ReachSpec& reach_spec = ReachSpec{}) {
  if (!(fraction > 0.0) || fraction > 1.0)
    throw std::invalid_argument("observe_prefix: fraction must lie in (0, 1]");
  const std::size_t base = basis == PrefixBasis::meaningful
                               ? meaningful_length(traj, reach_spec)
                               : traj.steps.size();
  std::size_t n = static_cast<std::size_t>(
      std::ceil(fraction * static_cast<double>(base) - 1e-12));
  n = std::max<std::size_t>(1, std::min(n, traj.steps.size()));
  return {traj.steps.begin(), traj.steps.begin() + static_cast<std::ptrdiff_t>(n)};
}

struct ScoreReport {
  std::vector<std::pair<GoalId, double>> per_goal_scores;  // ordered by goal index
  GoalId chosen;
  ScoreMetric metric = ScoreMetric::neg_mse;
  std::size_t prefix_length = 0;
  std::uint64_t policy_calls = 0;
  std::uint64_t env_calls = 0;
  int ties = 0;  // goals sharing the maximum score, beyond the first

  nlohmann::json to_json() const {
    nlohmann::json scores = nlohmann::json::object();
    for (const auto& [g, s] : per_goal_scores) scores[g.label] = s;
    return nlohmann::json{{"chosen", chosen.label},
                          {"chosen_index", chosen.index},
                          {"scores", scores},
                          {"metric", to_string(metric)},
                          {"prefix_length", prefix_length},
                          {"policy_calls", policy_calls},
                          {"env_calls", env_calls},
                          {"ties", ties}};
  }
};

/// Scores the prefix against every policy in the bank and returns the argmax
/// goal (smallest index on ties). Asserts that no environment interaction
/// happened while scoring.
inline ScoreReport infer_goal(std::span<const Step> prefix, const PolicyBank& bank,
                              const ScoreParams& params, RngStream& rng) {
  if (bank.entries.empty()) throw std::invalid_argument("infer_goal: empty policy bank");
  if (prefix.empty()) throw std::invalid_argument("infer_goal: empty prefix");

  const std::uint64_t env_before = env_interaction_count();
  const std::uint64_t policy_before = policy_eval_count();

  ScoreReport report;
  report.metric = params.metric;
  report.prefix_length = prefix.size();

  for (const auto& e : bank.entries) {
    const double s = score_prefix(prefix, e.model, params, rng);
    report.per_goal_scores.emplace_back(e.goal, s);
  }

  std::size_t best = 0;
  for (std::size_t i = 1; i < report.per_goal_scores.size(); ++i)
    if (report.per_goal_scores[i].second > report.per_goal_scores[best].second) best = i;
  report.chosen = report.per_goal_scores[best].first;
  for (const auto& [g, s] : report.per_goal_scores)
    if (s == report.per_goal_scores[best].second && !(g == report.chosen)) ++report.ties;

  report.policy_calls = policy_eval_count() - policy_before;
  report.env_calls = env_interaction_count() - env_before;
  if (report.env_calls != 0)
    throw std::logic_error("inference touched the environment (" +
                           std::to_string(report.env_calls) + " interactions)");
  return report;
}

}  // namespace grail
