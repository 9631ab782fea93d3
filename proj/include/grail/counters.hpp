#pragma once

#include <atomic>
#include <cstdint>

namespace grail {

// Global accounting used to enforce the training/inference contract:
// environment transitions happen only inside env.step (training and
// demonstration rollouts), never during scoring or goal inference.
inline std::atomic<std::uint64_t> g_env_interactions{0};

// Number of policy distribution evaluations (one per queried state).
inline std::atomic<std::uint64_t> g_policy_evals{0};

// Number of reward-head evaluations (adversarial IRL); must stay flat
// during inference.
inline std::atomic<std::uint64_t> g_reward_head_evals{0};

inline std::uint64_t env_interaction_count() { return g_env_interactions.load(); }
inline std::uint64_t policy_eval_count() { return g_policy_evals.load(); }
inline std::uint64_t reward_head_eval_count() { return g_reward_head_evals.load(); }

inline void reset_counters() {
  g_env_interactions.store(0);
  g_policy_evals.store(0);
  g_reward_head_evals.store(0);
}

}  // namespace grail
