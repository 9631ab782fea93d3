#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "grail/learners/hyperparams.hpp"
#include "grail/learners/qlearn.hpp"  // DiscreteEnvLike
#include "grail/policies.hpp"
#include "grail/reach_env.hpp"
#include "grail/rng.hpp"
#include "grail/tinynn.hpp"

namespace grail {

struct PpoUpdateParams {
  double gamma = 0.95;
  double clip = 0.2;
  int epochs = 4;
  int minibatch = 32;
  double entropy_coef = 0.01;
};

struct DiscTransition {
  int s = 0;
  int a = 0;
  double logp_old = 0.0;
  double reward = 0.0;
  int next_s = 0;
};

/// Softmax-logit policy table plus a value table, trained with the clipped
/// surrogate and a one-step TD baseline.
class DiscretePpoCore {
 public:
  DiscretePpoCore(int n_states, int n_actions, double policy_lr, double value_lr)
      : ns_(static_cast<std::size_t>(n_states)),
        na_(static_cast<std::size_t>(n_actions)),
        logits_(ns_ * na_, 0.0),
        values_(ns_, 0.0),
        policy_adam_(ns_ * na_, policy_lr),
        value_adam_(ns_, value_lr) {}

  std::vector<double> probs(int s) const {
    return softmax({logits_.data() + static_cast<std::size_t>(s) * na_, na_});
  }

  int sample_action(int s, RngStream& rng, double* logp) const {
    const auto pi = probs(s);
    const double u = rng.uniform();
    double acc = 0.0;
    int a = static_cast<int>(na_) - 1;
    for (std::size_t k = 0; k < na_; ++k) {
      acc += pi[k];
      if (u < acc) {
        a = static_cast<int>(k);
        break;
      }
    }
    if (logp) *logp = std::log(std::max(pi[static_cast<std::size_t>(a)], 1e-300));
    return a;
  }

  double value(int s) const { return values_[static_cast<std::size_t>(s)]; }

  void update(std::span<const DiscTransition> batch, const PpoUpdateParams& p, RngStream& rng) {
    if (batch.empty()) return;
    const std::size_t n = batch.size();
    std::vector<double> targets(n), advantages(n);
    for (std::size_t i = 0; i < n; ++i) {
      targets[i] = batch[i].reward + p.gamma * values_[static_cast<std::size_t>(batch[i].next_s)];
      advantages[i] = targets[i] - values_[static_cast<std::size_t>(batch[i].s)];
    }
    normalize(advantages);

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> pgrad(logits_.size());
    std::vector<double> vgrad(values_.size());

    for (int epoch = 0; epoch < p.epochs; ++epoch) {
      for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[rng.uniform_index(i)]);
      for (std::size_t start = 0; start < n; start += static_cast<std::size_t>(p.minibatch)) {
        const std::size_t end = std::min(n, start + static_cast<std::size_t>(p.minibatch));
        const double m = static_cast<double>(end - start);
        std::fill(pgrad.begin(), pgrad.end(), 0.0);
        std::fill(vgrad.begin(), vgrad.end(), 0.0);
        for (std::size_t k = start; k < end; ++k) {
          const auto& tr = batch[order[k]];
          const double adv = advantages[order[k]];
          const auto si = static_cast<std::size_t>(tr.s);
          const auto pi = probs(tr.s);
          const double logp = std::log(std::max(pi[static_cast<std::size_t>(tr.a)], 1e-300));
          const double ratio = std::exp(logp - tr.logp_old);
          const double clipped = std::clamp(ratio, 1.0 - p.clip, 1.0 + p.clip);
          // Gradient of -min(ratio*adv, clipped*adv): zero when the clipped
          // branch is active and binding.
          const bool clip_active = clipped * adv < ratio * adv;
          if (!clip_active) {
            const double coef = -ratio * adv / m;
            for (std::size_t b = 0; b < na_; ++b) {
              const double indicator = static_cast<int>(b) == tr.a ? 1.0 : 0.0;
              pgrad[si * na_ + b] += coef * (indicator - pi[b]);
            }
          }
          // Entropy bonus: d(-H)/dz_b = pi_b (log pi_b - sum_j pi_j log pi_j).
          double mean_logp = 0.0;
          for (std::size_t b = 0; b < na_; ++b)
            if (pi[b] > 0.0) mean_logp += pi[b] * std::log(pi[b]);
          for (std::size_t b = 0; b < na_; ++b)
            if (pi[b] > 0.0)
              pgrad[si * na_ + b] += p.entropy_coef * pi[b] * (std::log(pi[b]) - mean_logp) / m;
          // Value regression toward the one-step target.
          const double verr = values_[si] - targets[order[k]];
          vgrad[si] += 2.0 * verr / m;
        }
        policy_adam_.update(logits_, pgrad);
        value_adam_.update(values_, vgrad);
      }
    }
  }

  TabularPolicy to_policy() const {
    TabularPolicy pi(ns_, na_);
    for (std::size_t s = 0; s < ns_; ++s) {
      const auto row = softmax({logits_.data() + s * na_, na_});
      pi.set_row(s, row);
    }
    return pi;
  }

 private:
  static void normalize(std::vector<double>& v) {
    const double n = static_cast<double>(v.size());
    double mean = 0.0;
    for (double x : v) mean += x / n;
    double var = 0.0;
    for (double x : v) var += (x - mean) * (x - mean) / n;
    const double sd = std::sqrt(var);
    if (sd < 1e-8) return;
    for (double& x : v) x = (x - mean) / sd;
  }

  std::size_t ns_, na_;
  std::vector<double> logits_;
  std::vector<double> values_;
  nn::AdamState policy_adam_;
  nn::AdamState value_adam_;
};

struct ContTransition {
  std::array<double, 3> s{};
  std::array<double, 3> a{};  // raw (pre-clip) sample
  double logp_old = 0.0;
  double reward = 0.0;
  std::array<double, 3> next_s{};
};

/// Gaussian MLP policy (mean network + learned log-scales) with an MLP value
/// baseline, trained with the same clipped surrogate.
class ContinuousPpoCore {
 public:
  ContinuousPpoCore(RngStream& rng, double policy_lr, double value_lr, double init_log_scale)
      : mean_(nn::Mlp::xavier({3, 64, 64, 3}, rng)),
        value_(nn::Mlp::xavier({3, 64, 64, 1}, rng)),
        log_scale_(3, init_log_scale),
        mean_adam_(mean_.param_count(), policy_lr),
        scale_adam_(log_scale_.size(), policy_lr),
        value_adam_(value_.param_count(), value_lr) {}

  std::array<double, 3> sample_action(const std::array<double, 3>& s, RngStream& rng,
                                      double* logp) const {
    const auto mu = mean_.forward(std::span<const double>(s.data(), 3));
    std::array<double, 3> a{};
    double lp = 0.0;
    for (int d = 0; d < 3; ++d) {
      const double sigma = std::exp(log_scale_[static_cast<std::size_t>(d)]);
      const double z = rng.normal();
      a[static_cast<std::size_t>(d)] = mu[static_cast<std::size_t>(d)] + sigma * z;
      lp += -0.5 * z * z - log_scale_[static_cast<std::size_t>(d)] -
            0.5 * std::log(2.0 * M_PI);
    }
    if (logp) *logp = lp;
    return a;
  }

  double log_prob(const std::array<double, 3>& s, const std::array<double, 3>& a,
                  std::vector<double>* mu_out = nullptr) const {
    const auto mu = mean_.forward(std::span<const double>(s.data(), 3));
    double lp = 0.0;
    for (int d = 0; d < 3; ++d) {
      const auto dd = static_cast<std::size_t>(d);
      const double sigma = std::exp(log_scale_[dd]);
      const double z = (a[dd] - mu[dd]) / sigma;
      lp += -0.5 * z * z - log_scale_[dd] - 0.5 * std::log(2.0 * M_PI);
    }
    if (mu_out) *mu_out = mu;
    return lp;
  }

  double value(const std::array<double, 3>& s) const {
    return value_.forward(std::span<const double>(s.data(), 3))[0];
  }

  void update(std::span<const ContTransition> batch, const PpoUpdateParams& p, RngStream& rng) {
    if (batch.empty()) return;
    const std::size_t n = batch.size();
    std::vector<double> targets(n), advantages(n);
    for (std::size_t i = 0; i < n; ++i) {
      targets[i] = batch[i].reward + p.gamma * value(batch[i].next_s);
      advantages[i] = targets[i] - value(batch[i].s);
    }
    normalize(advantages);

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> mgrad(mean_.param_count());
    std::vector<double> sgrad(log_scale_.size());
    std::vector<double> vgrad(value_.param_count());

    for (int epoch = 0; epoch < p.epochs; ++epoch) {
      for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[rng.uniform_index(i)]);
      for (std::size_t start = 0; start < n; start += static_cast<std::size_t>(p.minibatch)) {
        const std::size_t end = std::min(n, start + static_cast<std::size_t>(p.minibatch));
        const double m = static_cast<double>(end - start);
        std::fill(mgrad.begin(), mgrad.end(), 0.0);
        std::fill(sgrad.begin(), sgrad.end(), 0.0);
        std::fill(vgrad.begin(), vgrad.end(), 0.0);
        for (std::size_t k = start; k < end; ++k) {
          const auto& tr = batch[order[k]];
          const double adv = advantages[order[k]];

          nn::Mlp::Trace mtrace;
          const auto mu = mean_.forward_trace(std::span<const double>(tr.s.data(), 3), mtrace);
          double logp = 0.0;
          std::array<double, 3> z{};
          for (int d = 0; d < 3; ++d) {
            const auto dd = static_cast<std::size_t>(d);
            const double sigma = std::exp(log_scale_[dd]);
            z[dd] = (tr.a[dd] - mu[dd]) / sigma;
            logp += -0.5 * z[dd] * z[dd] - log_scale_[dd] - 0.5 * std::log(2.0 * M_PI);
          }
          const double ratio = std::exp(logp - tr.logp_old);
          const double clipped = std::clamp(ratio, 1.0 - p.clip, 1.0 + p.clip);
          const bool clip_active = clipped * adv < ratio * adv;
          if (!clip_active) {
            const double coef = -ratio * adv / m;  // d(-surrogate)/dlogp
            std::vector<double> up(3);
            for (int d = 0; d < 3; ++d) {
              const auto dd = static_cast<std::size_t>(d);
              const double sigma = std::exp(log_scale_[dd]);
              up[dd] = coef * z[dd] / sigma;             // dlogp/dmu
              sgrad[dd] += coef * (z[dd] * z[dd] - 1.0); // dlogp/dlog_sigma
            }
            mean_.backward(mtrace, up, mgrad);
          }
          // Gaussian entropy is sum(log sigma) + const.
          for (std::size_t dd = 0; dd < 3; ++dd) sgrad[dd] -= p.entropy_coef / m;

          nn::Mlp::Trace vtrace;
          const auto v = value_.forward_trace(std::span<const double>(tr.s.data(), 3), vtrace);
          const double verr = v[0] - targets[order[k]];
          value_.backward(vtrace, std::vector<double>{2.0 * verr / m}, vgrad);
        }
        mean_adam_.update(mean_.params(), mgrad);
        scale_adam_.update(log_scale_, sgrad);
        value_adam_.update(value_.params(), vgrad);
      }
    }
  }

  GaussianMlpPolicy to_policy() const {
    GaussianMlpPolicy pi;
    pi.mean = mean_;
    pi.log_scale = log_scale_;
    return pi;
  }

 private:
  static void normalize(std::vector<double>& v) {
    const double n = static_cast<double>(v.size());
    double mean = 0.0;
    for (double x : v) mean += x / n;
    double var = 0.0;
    for (double x : v) var += (x - mean) * (x - mean) / n;
    const double sd = std::sqrt(var);
    if (sd < 1e-8) return;
    for (double& x : v) x = (x - mean) / sd;
  }

  nn::Mlp mean_;
  nn::Mlp value_;
  std::vector<double> log_scale_;
  nn::AdamState mean_adam_;
  nn::AdamState scale_adam_;
  nn::AdamState value_adam_;
};

/// Collects one fixed-horizon on-policy episode batch for a discrete env.
template <DiscreteEnvLike Env>
std::vector<DiscTransition> collect_discrete(const Env& env, const DiscretePpoCore& core,
                                             int episodes, std::size_t horizon, RngStream& rng) {
  std::vector<DiscTransition> batch;
  batch.reserve(static_cast<std::size_t>(episodes) * horizon);
  for (int ep = 0; ep < episodes; ++ep) {
    auto s = env.initial_state();
    int si = env.state_index(s);
    for (std::size_t t = 0; t < horizon; ++t) {
      DiscTransition tr;
      tr.s = si;
      tr.a = core.sample_action(si, rng, &tr.logp_old);
      const auto out = env.step(s, DiscreteAction{tr.a}, static_cast<int>(t));
      tr.reward = out.reward;
      tr.next_s = env.state_index(out.next);
      batch.push_back(tr);
      s = out.next;
      si = tr.next_s;
    }
  }
  return batch;
}

inline std::vector<ContTransition> collect_continuous(const ReachEnv& env,
                                                      const ContinuousPpoCore& core,
                                                      int episodes, std::size_t horizon,
                                                      RngStream& rng) {
  std::vector<ContTransition> batch;
  batch.reserve(static_cast<std::size_t>(episodes) * horizon);
  for (int ep = 0; ep < episodes; ++ep) {
    ReachState s = env.initial_state();
    for (std::size_t t = 0; t < horizon; ++t) {
      ContTransition tr;
      tr.s = s.p;
      tr.a = core.sample_action(s.p, rng, &tr.logp_old);
      ContinuousAction exec;
      exec.v = tr.a;
      const auto out = env.step(s, exec, static_cast<int>(t));
      tr.reward = out.reward;
      tr.next_s = out.next.p;
      batch.push_back(tr);
      s = out.next;
    }
  }
  return batch;
}

/// PPO on the true environment reward; the policy bank entry for the
/// RL-on-reward baseline in continuous domains.
template <DiscreteEnvLike Env>
TabularPolicy ppo_true_reward(const Env& env, const PpoHp& hp, int rounds, std::size_t horizon,
                              RngStream& rng) {
  DiscretePpoCore core(env.n_states(), env.n_actions(), hp.tabular_lr, hp.tabular_lr);
  const int episodes = std::max(
      1, (hp.steps_per_round + static_cast<int>(horizon) - 1) / static_cast<int>(horizon));
  PpoUpdateParams p{hp.gamma, hp.clip, hp.epochs, hp.minibatch, hp.entropy_coef};
  for (int round = 0; round < rounds; ++round) {
    const auto batch = collect_discrete(env, core, episodes, horizon, rng);
    core.update(batch, p, rng);
  }
  return core.to_policy();
}

inline GaussianMlpPolicy ppo_true_reward(const ReachEnv& env, const PpoHp& hp, int rounds,
                                         std::size_t horizon, RngStream& rng) {
  ContinuousPpoCore core(rng, hp.lr, hp.lr * 3.0, std::log(hp.init_scale));
  const int episodes = std::max(
      1, (hp.steps_per_round + static_cast<int>(horizon) - 1) / static_cast<int>(horizon));
  PpoUpdateParams p{hp.gamma, hp.clip, hp.epochs, hp.minibatch, hp.entropy_coef};
  for (int round = 0; round < rounds; ++round) {
    const auto batch = collect_continuous(env, core, episodes, horizon, rng);
    core.update(batch, p, rng);
  }
  return core.to_policy();
}

}  // namespace grail
