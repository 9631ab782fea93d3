#pragma once

#include <chrono>
#include <future>
#include <stdexcept>
#include <string>
#include <vector>

#include "grail/bank.hpp"
#include "grail/grid_env.hpp"
#include "grail/learners/adversarial.hpp"
#include "grail/learners/bc.hpp"
#include "grail/learners/hyperparams.hpp"
#include "grail/learners/ppo.hpp"
#include "grail/learners/qlearn.hpp"
#include "grail/reach_env.hpp"
#include "grail/rng.hpp"

namespace grail {

struct TrainInputs {
  EnvKind env = EnvKind::grid;
  GridSpec grid;
  ReachSpec reach;
  std::vector<GoalId> goals;
  const DemoSet* demos = nullptr;  // required by bc / gail / airl
  std::size_t horizon = 50;
};

namespace detail {

inline std::uint64_t rollout_env_calls(int rounds, int steps_per_round, std::size_t horizon) {
  const int episodes =
      std::max(1, (steps_per_round + static_cast<int>(horizon) - 1) / static_cast<int>(horizon));
  return static_cast<std::uint64_t>(rounds) * static_cast<std::uint64_t>(episodes) * horizon;
}

inline PolicyEntry train_one_goal(const TrainInputs& in, LearnerKind kind,
                                  const LearnerHyperparams& hp, std::uint64_t master_seed,
                                  const GoalId& goal) {
  RngStream rng = derive_stream(master_seed, "train/" + goal.label);
  const bool is_grid = in.env == EnvKind::grid;
  const auto needs_demos = kind == LearnerKind::bc || kind == LearnerKind::gail ||
                           kind == LearnerKind::airl;
  if (needs_demos && !in.demos)
    throw std::invalid_argument("train_bank: " + to_string(kind) + " requires demonstrations");

  PolicyEntry entry;
  entry.goal = goal;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    switch (kind) {
      case LearnerKind::bc: {
        const auto& demos = in.demos->demos_for(goal);
        if (is_grid) entry.model = bc_fit_tabular(demos);
        else entry.model = bc_fit_mlp(demos, hp.bc, rng);
        entry.env_calls_train = 0;
        break;
      }
      case LearnerKind::qlearn: {
        if (!is_grid) throw std::invalid_argument("qlearn supports the grid domain only");
        GridEnv env(in.grid, goal);
        entry.model = qlearn(env, hp.qlearn, in.horizon, rng);
        entry.env_calls_train =
            static_cast<std::uint64_t>(hp.qlearn.episodes) * in.horizon;
        break;
      }
      case LearnerKind::gail:
      case LearnerKind::airl: {
        const AdvHp& ahp = kind == LearnerKind::gail ? hp.gail : hp.airl;
        const AdvKind akind = kind == LearnerKind::gail ? AdvKind::gail : AdvKind::airl;
        const auto& demos = in.demos->demos_for(goal);
        if (is_grid) {
          GridEnv env(in.grid, goal);
          const auto pairs = grid_expert_pairs(demos);
          entry.model =
              adversarial_fit(env, pairs, akind, ahp, ahp.rounds_grid, in.horizon, rng).policy;
          entry.env_calls_train =
              rollout_env_calls(ahp.rounds_grid, ahp.steps_per_round, in.horizon);
        } else {
          ReachEnv env(in.reach, goal);
          const auto pairs = reach_expert_pairs(demos);
          entry.model =
              adversarial_fit(env, pairs, akind, ahp, ahp.rounds_reach, in.horizon, rng).policy;
          entry.env_calls_train =
              rollout_env_calls(ahp.rounds_reach, ahp.steps_per_round, in.horizon);
        }
        break;
      }
      case LearnerKind::ppo: {
        if (is_grid) {
          GridEnv env(in.grid, goal);
          entry.model = ppo_true_reward(env, hp.ppo, hp.ppo.rounds_grid, in.horizon, rng);
          entry.env_calls_train =
              rollout_env_calls(hp.ppo.rounds_grid, hp.ppo.steps_per_round, in.horizon);
        } else {
          ReachEnv env(in.reach, goal);
          entry.model = ppo_true_reward(env, hp.ppo, hp.ppo.rounds_reach, in.horizon, rng);
          entry.env_calls_train =
              rollout_env_calls(hp.ppo.rounds_reach, hp.ppo.steps_per_round, in.horizon);
        }
        break;
      }
    }
  } catch (const std::exception& e) {
    throw std::runtime_error("training failed for goal " + goal.label + ": " + e.what());
  }
  entry.train_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return entry;
}

}  // namespace detail

/// Trains one policy per goal (stream key "train/{goal}"). Per-goal work is
/// independent, so `threads > 1` runs goals concurrently; results are
/// identical either way because every goal owns its derived stream.
inline PolicyBank train_bank(const TrainInputs& in, LearnerKind kind,
                             const LearnerHyperparams& hp, std::uint64_t master_seed,
                             int threads = 1) {
  if (in.goals.empty()) throw std::invalid_argument("train_bank: no goals");
  PolicyBank bank;
  bank.env = in.env;
  bank.learner = kind;
  bank.seed = master_seed;
  switch (kind) {
    case LearnerKind::bc: bank.hyperparams = to_json(hp.bc); break;
    case LearnerKind::gail: bank.hyperparams = to_json(hp.gail); break;
    case LearnerKind::airl: bank.hyperparams = to_json(hp.airl); break;
    case LearnerKind::qlearn: bank.hyperparams = to_json(hp.qlearn); break;
    case LearnerKind::ppo: bank.hyperparams = to_json(hp.ppo); break;
  }

  if (threads <= 1 || in.goals.size() == 1) {
    for (const auto& g : in.goals)
      bank.entries.push_back(detail::train_one_goal(in, kind, hp, master_seed, g));
    return bank;
  }

  std::vector<std::future<PolicyEntry>> futures;
  futures.reserve(in.goals.size());
  for (const auto& g : in.goals)
    futures.push_back(std::async(std::launch::async, [&, g] {
      return detail::train_one_goal(in, kind, hp, master_seed, g);
    }));
  for (auto& f : futures) bank.entries.push_back(f.get());
  return bank;
}

}  // namespace grail
