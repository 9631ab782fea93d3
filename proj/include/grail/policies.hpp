#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "grail/counters.hpp"
#include "grail/tinynn.hpp"
#include "grail/types.hpp"

namespace grail {

inline std::vector<double> softmax(std::span<const double> logits) {
  double mx = logits[0];
  for (double v : logits) mx = std::max(mx, v);
  std::vector<double> out(logits.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp(logits[i] - mx);
    sum += out[i];
  }
  for (double& v : out) v /= sum;
  return out;
}

/// Dense state-indexed policy over a small discrete state space.
/// Rows are normalized; states never updated keep the uniform default.
struct TabularPolicy {
  std::size_t n_states = 0;
  std::size_t n_actions = 0;
  std::vector<double> probs;  // n_states x n_actions, row-major

  TabularPolicy() = default;
  TabularPolicy(std::size_t ns, std::size_t na)
      : n_states(ns), n_actions(na), probs(ns * na, 1.0 / static_cast<double>(na)) {}

  std::span<const double> row(std::size_t s) const {
    return {probs.data() + s * n_actions, n_actions};
  }

  void set_row(std::size_t s, std::span<const double> p) {
    double sum = 0.0;
    for (double v : p) sum += v;
    for (std::size_t a = 0; a < n_actions; ++a) probs[s * n_actions + a] = p[a] / sum;
  }

  ActionDistribution act_index(std::size_t s) const {
    g_policy_evals.fetch_add(1, std::memory_order_relaxed);
    if (s >= n_states) throw std::out_of_range("TabularPolicy: state index out of range");
    auto r = row(s);
    ActionDistribution d;
    d.probs.assign(r.begin(), r.end());
    return d;
  }

  friend bool operator==(const TabularPolicy&, const TabularPolicy&) = default;
};

/// Action-value table with per-(state,action) visit counts. The derived
/// behavior is a softmax over Q at temperature beta.
struct QTable {
  std::size_t n_states = 0;
  std::size_t n_actions = 0;
  double temperature = 1.0;
  std::vector<double> q;               // n_states x n_actions
  std::vector<std::uint64_t> visits;   // n_states x n_actions

  QTable() = default;
  QTable(std::size_t ns, std::size_t na, double beta = 1.0)
      : n_states(ns), n_actions(na), temperature(beta), q(ns * na, 0.0), visits(ns * na, 0) {}

  double& at(std::size_t s, std::size_t a) { return q[s * n_actions + a]; }
  double at(std::size_t s, std::size_t a) const { return q[s * n_actions + a]; }

  std::uint64_t state_visits(std::size_t s) const {
    std::uint64_t n = 0;
    for (std::size_t a = 0; a < n_actions; ++a) n += visits[s * n_actions + a];
    return n;
  }

  ActionDistribution act_index(std::size_t s) const {
    g_policy_evals.fetch_add(1, std::memory_order_relaxed);
    if (s >= n_states) throw std::out_of_range("QTable: state index out of range");
    std::vector<double> scaled(n_actions);
    for (std::size_t a = 0; a < n_actions; ++a) scaled[a] = q[s * n_actions + a] / temperature;
    ActionDistribution d;
    d.probs = softmax(scaled);
    return d;
  }

  friend bool operator==(const QTable&, const QTable&) = default;
};

/// Diagonal-Gaussian policy for the continuous domain: an MLP produces the
/// mean, the per-dimension scale is a learned constant. Means are clipped to
/// the action box at evaluation time.
struct GaussianMlpPolicy {
  nn::Mlp mean;
  std::vector<double> log_scale;

  ActionDistribution act(const ReachState& s) const {
    g_policy_evals.fetch_add(1, std::memory_order_relaxed);
    std::vector<double> m = mean.forward(std::span<const double>(s.p.data(), s.p.size()));
    for (double& v : m) v = std::clamp(v, -1.0, 1.0);
    std::vector<double> scale(log_scale.size());
    for (std::size_t i = 0; i < log_scale.size(); ++i) scale[i] = std::exp(log_scale[i]);
    return make_gaussian_dist(std::move(m), std::move(scale));
  }

  friend bool operator==(const GaussianMlpPolicy&, const GaussianMlpPolicy&) = default;
};

}  // namespace grail
