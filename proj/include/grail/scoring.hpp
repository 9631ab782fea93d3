#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "grail/bank.hpp"
#include "grail/rng.hpp"
#include "grail/types.hpp"

namespace grail {

/// Raised when a metric cannot be evaluated against a policy family
/// (e.g. KL against a continuous policy). The CLI maps this to exit code 2.
struct MetricCompatibilityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class ScoreMetric { neg_mse, neg_kl, neg_w1 };

inline std::string to_string(ScoreMetric m) {
  switch (m) {
    case ScoreMetric::neg_mse: return "mse";
    case ScoreMetric::neg_kl: return "kl";
    case ScoreMetric::neg_w1: return "w1";
  }
  return "?";
}

inline ScoreMetric metric_from_string(const std::string& s) {
  if (s == "mse" || s == "neg_mse") return ScoreMetric::neg_mse;
  if (s == "kl" || s == "neg_kl") return ScoreMetric::neg_kl;
  if (s == "w1" || s == "neg_w1") return ScoreMetric::neg_w1;
  throw std::invalid_argument("unknown metric: " + s);
}

enum class KlDirection { policy_to_pseudo, pseudo_to_policy };

/// Metric family and its parameters; these are echoed verbatim into result
/// metadata so every run records the exact scoring configuration.
struct ScoreParams {
  ScoreMetric metric = ScoreMetric::neg_mse;
  double kl_eps = 0.01;                                   // pseudo-policy off-action mass
  KlDirection kl_direction = KlDirection::policy_to_pseudo;
  int w1_samples = 16;                                    // continuous W1 sample count

  void validate() const {
    if (!(kl_eps > 0.0) || kl_eps >= 0.25)
      throw std::invalid_argument("kl_eps must lie in (0, 1/|A|)");
    if (w1_samples < 1) throw std::invalid_argument("w1_samples must be >= 1");
  }
};

namespace detail {

inline int discrete_code(const Step& step) {
  const auto* a = std::get_if<DiscreteAction>(&step.a);
  if (!a) throw std::runtime_error("expected a discrete action in the observed prefix");
  return a->code;
}

inline const ContinuousAction& continuous_action(const Step& step) {
  const auto* a = std::get_if<ContinuousAction>(&step.a);
  if (!a) throw std::runtime_error("expected a continuous action in the observed prefix");
  return *a;
}

}  // namespace detail

/// Negative average MSE between the policy's prediction and the observed
/// action: probability vector vs one-hot for discrete actions, mean vs
/// action vector for continuous ones. One policy evaluation per step, no
/// environment interaction.
inline double score_mse(std::span<const Step> prefix, const PolicyModel& policy) {
  if (prefix.empty()) throw std::invalid_argument("score_mse: empty prefix");
  double total = 0.0;
  for (const Step& step : prefix) {
    const ActionDistribution d = eval_policy(policy, step.s);
    if (d.discrete()) {
      const int code = detail::discrete_code(step);
      for (std::size_t a = 0; a < d.probs.size(); ++a) {
        const double target = static_cast<int>(a) == code ? 1.0 : 0.0;
        const double diff = d.probs[a] - target;
        total += diff * diff;
      }
    } else {
      const auto& act = detail::continuous_action(step);
      for (std::size_t i = 0; i < d.mean.size(); ++i) {
        const double diff = d.mean[i] - act.v[i];
        total += diff * diff;
      }
    }
  }
  return -total / static_cast<double>(prefix.size());
}

/// Negative summed KL between the policy and a smoothed point-mass
/// pseudo-policy built from each observed action. Discrete policies only.
inline double score_kl(std::span<const Step> prefix, const PolicyModel& policy,
                       const ScoreParams& params = {}) {
  if (prefix.empty()) throw std::invalid_argument("score_kl: empty prefix");
  if (!policy_is_discrete(policy))
    throw MetricCompatibilityError("neg_kl is unsupported for continuous policies");
  params.validate();

  double total = 0.0;
  for (const Step& step : prefix) {
    const ActionDistribution d = eval_policy(policy, step.s);
    const int code = detail::discrete_code(step);
    const std::size_t n = d.probs.size();
    const double on = 1.0 - params.kl_eps * static_cast<double>(n - 1);
    double kl = 0.0;
    for (std::size_t a = 0; a < n; ++a) {
      const double po = static_cast<int>(a) == code ? on : params.kl_eps;
      const double pg = d.probs[a];
      if (params.kl_direction == KlDirection::policy_to_pseudo) {
        if (pg > 0.0) kl += pg * std::log(pg / po);
      } else {
        kl += pg > 0.0 ? po * std::log(po / pg)
                       : std::numeric_limits<double>::infinity();
      }
    }
    total += kl;
  }
  return -total;
}

/// Negative mean per-step 1-Wasserstein cost. Discrete: one-hot observed
/// action vs the policy distribution under the L1-between-one-hots ground
/// metric, which reduces to 2 * (1 - pi(a_t | s_t)). Continuous: mean L1
/// distance over `w1_samples` policy samples (clipped, as executed).
inline double score_w1(std::span<const Step> prefix, const PolicyModel& policy,
                       RngStream& rng, const ScoreParams& params = {}) {
  if (prefix.empty()) throw std::invalid_argument("score_w1: empty prefix");
  params.validate();

  double total = 0.0;
  for (const Step& step : prefix) {
    const ActionDistribution d = eval_policy(policy, step.s);
    if (d.discrete()) {
      const int code = detail::discrete_code(step);
      total += 2.0 * (1.0 - d.probs[static_cast<std::size_t>(code)]);
    } else {
      const auto& act = detail::continuous_action(step);
      double cost = 0.0;
      for (int m = 0; m < params.w1_samples; ++m) {
        double l1 = 0.0;
        for (std::size_t i = 0; i < d.mean.size(); ++i) {
          const double sample =
              std::clamp(d.mean[i] + d.scale[i] * rng.normal(), -1.0, 1.0);
          l1 += std::abs(act.v[i] - sample);
        }
        cost += l1;
      }
      total += cost / static_cast<double>(params.w1_samples);
    }
  }
  return -total / static_cast<double>(prefix.size());
}

/// Dispatches on the metric kind. neg_mse and neg_kl ignore the stream.
inline double score_prefix(std::span<const Step> prefix, const PolicyModel& policy,
                           const ScoreParams& params, RngStream& rng) {
  switch (params.metric) {
    case ScoreMetric::neg_mse: return score_mse(prefix, policy);
    case ScoreMetric::neg_kl: return score_kl(prefix, policy, params);
    case ScoreMetric::neg_w1: return score_w1(prefix, policy, rng, params);
  }
  throw std::logic_error("unreachable metric kind");
}

}  // namespace grail
