#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "grail/bank.hpp"
#include "grail/counters.hpp"
#include "grail/learners/hyperparams.hpp"
#include "grail/learners/ppo.hpp"
#include "grail/policies.hpp"
#include "grail/reach_env.hpp"
#include "grail/rng.hpp"
#include "grail/tinynn.hpp"

namespace grail {

enum class AdvKind { gail, airl };

inline double softplus(double x) {
  return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

inline double sigmoid(double x) {
  return x >= 0.0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
}

inline double logaddexp(double a, double b) {
  const double m = std::max(a, b);
  return m + std::log(std::exp(a - m) + std::exp(b - m));
}

/// Learned reward head returned by AIRL (discrete form: a table over
/// state-action cells). Evaluations are counted so inference paths can
/// assert they never consult it.
struct RewardHeadTable {
  std::size_t n_states = 0;
  std::size_t n_actions = 0;
  std::vector<double> f;

  double eval(int s, int a) const {
    g_reward_head_evals.fetch_add(1, std::memory_order_relaxed);
    return f[static_cast<std::size_t>(s) * n_actions + static_cast<std::size_t>(a)];
  }
};

struct RewardHeadMlp {
  nn::Mlp f;  // (state, action) -> scalar

  double eval(const std::array<double, 3>& s, const std::array<double, 3>& a) const {
    g_reward_head_evals.fetch_add(1, std::memory_order_relaxed);
    std::vector<double> in{s[0], s[1], s[2], a[0], a[1], a[2]};
    return f.forward(in)[0];
  }
};

struct AdvDiscreteResult {
  TabularPolicy policy;
  RewardHeadTable reward_head;       // AIRL only
  std::vector<double> disc_logits;   // GAIL discriminator (held out for diagnostics)
};

/// Alternating adversarial imitation over a discrete environment.
/// Per round: collect on-policy fixed-horizon rollouts into a replay ring,
/// take `disc_updates_per_round` balanced discriminator steps, then a
/// clipped policy-gradient step on the surrogate reward.
/// GAIL: D = sigmoid(d[s,a]), policy reward -log(1 - D) = softplus(d).
/// AIRL: D = exp(f) / (exp(f) + pi(a|s)), policy reward f - log pi.
template <DiscreteEnvLike Env>
AdvDiscreteResult adversarial_fit(const Env& env,
                                  std::span<const std::pair<int, int>> expert_pairs,
                                  AdvKind kind, const AdvHp& hp, int rounds,
                                  std::size_t horizon, RngStream& rng) {
  if (expert_pairs.empty()) throw std::invalid_argument("adversarial_fit: no expert pairs");
  const auto ns = static_cast<std::size_t>(env.n_states());
  const auto na = static_cast<std::size_t>(env.n_actions());

  DiscretePpoCore core(env.n_states(), env.n_actions(), hp.tabular_lr, hp.tabular_lr);
  std::vector<double> disc(ns * na, 0.0);  // d (GAIL) or f (AIRL)
  nn::AdamState disc_adam(disc.size(), hp.disc_lr_tabular);
  std::vector<double> disc_grad(disc.size());

  std::vector<std::pair<int, int>> replay;
  std::size_t replay_cursor = 0;
  const int episodes = std::max(
      1, (hp.steps_per_round + static_cast<int>(horizon) - 1) / static_cast<int>(horizon));
  const PpoUpdateParams pp{hp.gamma, hp.clip, hp.ppo_epochs, hp.batch, hp.entropy_coef};

  for (int round = 0; round < rounds; ++round) {
    auto batch = collect_discrete(env, core, episodes, horizon, rng);
    for (const auto& tr : batch) {
      if (replay.size() < static_cast<std::size_t>(hp.replay_capacity)) {
        replay.emplace_back(tr.s, tr.a);
      } else {
        replay[replay_cursor] = {tr.s, tr.a};
        replay_cursor = (replay_cursor + 1) % replay.size();
      }
    }

    const auto cell = [na](const std::pair<int, int>& sa) {
      return static_cast<std::size_t>(sa.first) * na + static_cast<std::size_t>(sa.second);
    };
    const auto disc_prob = [&](const std::pair<int, int>& sa) {
      if (kind == AdvKind::gail) return sigmoid(disc[cell(sa)]);
      const double pi = core.probs(sa.first)[static_cast<std::size_t>(sa.second)];
      const double logf = disc[cell(sa)];
      return std::exp(logf - logaddexp(logf, std::log(std::max(pi, 1e-300))));
    };

    for (int du = 0; du < hp.disc_updates_per_round; ++du) {
      std::fill(disc_grad.begin(), disc_grad.end(), 0.0);
      const double m = 2.0 * hp.demo_batch;
      for (int k = 0; k < hp.demo_batch; ++k) {
        const auto& e = expert_pairs[rng.uniform_index(expert_pairs.size())];
        disc_grad[cell(e)] += -(1.0 - disc_prob(e)) / m;
        const auto& p = replay[rng.uniform_index(replay.size())];
        disc_grad[cell(p)] += disc_prob(p) / m;
      }
      disc_adam.update(disc, disc_grad);
    }

    for (auto& tr : batch) {
      const std::size_t c = static_cast<std::size_t>(tr.s) * na + static_cast<std::size_t>(tr.a);
      tr.reward = kind == AdvKind::gail ? softplus(disc[c]) : disc[c] - tr.logp_old;
      if (!std::isfinite(tr.reward))
        throw std::runtime_error("adversarial_fit diverged at round " + std::to_string(round));
    }
    core.update(batch, pp, rng);
  }

  AdvDiscreteResult result;
  result.policy = core.to_policy();
  if (kind == AdvKind::airl) result.reward_head = RewardHeadTable{ns, na, disc};
  else result.disc_logits = disc;
  return result;
}

struct AdvContinuousResult {
  GaussianMlpPolicy policy;
  RewardHeadMlp reward_head;  // AIRL only
  nn::Mlp disc;               // GAIL discriminator
};

inline AdvContinuousResult adversarial_fit(
    const ReachEnv& env,
    std::span<const std::pair<std::array<double, 3>, std::array<double, 3>>> expert_pairs,
    AdvKind kind, const AdvHp& hp, int rounds, std::size_t horizon, RngStream& rng) {
  if (expert_pairs.empty()) throw std::invalid_argument("adversarial_fit: no expert pairs");

  ContinuousPpoCore core(rng, hp.lr, hp.lr * 3.0, std::log(0.3));
  nn::Mlp disc = nn::Mlp::xavier({6, 64, 64, 1}, rng);
  nn::AdamState disc_adam(disc.param_count(), hp.disc_lr_mlp);
  std::vector<double> disc_grad(disc.param_count());

  std::vector<std::pair<std::array<double, 3>, std::array<double, 3>>> replay;
  std::size_t replay_cursor = 0;
  const int episodes = std::max(
      1, (hp.steps_per_round + static_cast<int>(horizon) - 1) / static_cast<int>(horizon));
  const PpoUpdateParams pp{hp.gamma, hp.clip, hp.ppo_epochs, hp.batch, hp.entropy_coef};

  const auto disc_in = [](const std::array<double, 3>& s, const std::array<double, 3>& a) {
    return std::vector<double>{s[0], s[1], s[2], a[0], a[1], a[2]};
  };

  for (int round = 0; round < rounds; ++round) {
    auto batch = collect_continuous(env, core, episodes, horizon, rng);
    for (const auto& tr : batch) {
      if (replay.size() < static_cast<std::size_t>(hp.replay_capacity)) {
        replay.emplace_back(tr.s, tr.a);
      } else {
        replay[replay_cursor] = {tr.s, tr.a};
        replay_cursor = (replay_cursor + 1) % replay.size();
      }
    }

    // D and dLoss/dlogit for one sample; expert label 1, policy label 0.
    const auto disc_d = [&](const std::array<double, 3>& s, const std::array<double, 3>& a,
                            nn::Mlp::Trace& trace) {
      const auto in = disc_in(s, a);
      const double out = disc.forward_trace(in, trace)[0];
      if (kind == AdvKind::gail) return sigmoid(out);
      const double logpi = core.log_prob(s, a);
      return std::exp(out - logaddexp(out, logpi));
    };

    for (int du = 0; du < hp.disc_updates_per_round; ++du) {
      std::fill(disc_grad.begin(), disc_grad.end(), 0.0);
      const double m = 2.0 * hp.demo_batch;
      for (int k = 0; k < hp.demo_batch; ++k) {
        nn::Mlp::Trace trace;
        const auto& e = expert_pairs[rng.uniform_index(expert_pairs.size())];
        const double de = disc_d(e.first, e.second, trace);
        disc.backward(trace, std::vector<double>{-(1.0 - de) / m}, disc_grad);
        const auto& p = replay[rng.uniform_index(replay.size())];
        const double dp = disc_d(p.first, p.second, trace);
        disc.backward(trace, std::vector<double>{dp / m}, disc_grad);
      }
      disc_adam.update(disc.params(), disc_grad);
    }

    for (auto& tr : batch) {
      const double out = disc.forward(disc_in(tr.s, tr.a))[0];
      tr.reward = kind == AdvKind::gail ? softplus(out) : out - tr.logp_old;
      if (!std::isfinite(tr.reward))
        throw std::runtime_error("adversarial_fit diverged at round " + std::to_string(round));
    }
    core.update(batch, pp, rng);
  }

  AdvContinuousResult result;
  result.policy = core.to_policy();
  if (kind == AdvKind::airl) result.reward_head = RewardHeadMlp{disc};
  else result.disc = std::move(disc);
  return result;
}

/// Trajectory adapters.

inline std::vector<std::pair<int, int>> grid_expert_pairs(const std::vector<Trajectory>& demos) {
  std::vector<std::pair<int, int>> pairs;
  for (const auto& t : demos)
    for (const auto& step : t.steps)
      pairs.emplace_back(grid_state_index(std::get<GridState>(step.s)),
                         std::get<DiscreteAction>(step.a).code);
  return pairs;
}

inline std::vector<std::pair<std::array<double, 3>, std::array<double, 3>>> reach_expert_pairs(
    const std::vector<Trajectory>& demos) {
  std::vector<std::pair<std::array<double, 3>, std::array<double, 3>>> pairs;
  for (const auto& t : demos)
    for (const auto& step : t.steps)
      pairs.emplace_back(std::get<ReachState>(step.s).p, std::get<ContinuousAction>(step.a).v);
  return pairs;
}

}  // namespace grail
