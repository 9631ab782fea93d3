#pragma once

#include <algorithm>
#include <concepts>
#include <cstddef>
#include <span>
#include <vector>

#include "grail/learners/hyperparams.hpp"
#include "grail/policies.hpp"
#include "grail/rng.hpp"

namespace grail {

template <class E>
concept DiscreteEnvLike = requires(const E& e, const typename E::state_type& s,
                                   DiscreteAction a, int t) {
  { e.n_states() } -> std::convertible_to<int>;
  { e.n_actions() } -> std::convertible_to<int>;
  { e.state_index(s) } -> std::convertible_to<int>;
  { e.initial_state() } -> std::same_as<typename E::state_type>;
  { e.step(s, a, t).reward } -> std::convertible_to<double>;
};

namespace detail {

/// Greedy action with uniform random tie-breaking; ties are the normal case
/// early in training when the whole table is zero.
inline int argmax_random_ties(std::span<const double> row, RngStream& rng) {
  double best = row[0];
  for (double v : row) best = std::max(best, v);
  int count = 0;
  for (double v : row)
    if (v == best) ++count;
  if (count == 1) {
    for (std::size_t a = 0; a < row.size(); ++a)
      if (row[a] == best) return static_cast<int>(a);
  }
  int pick = static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(count)));
  for (std::size_t a = 0; a < row.size(); ++a)
    if (row[a] == best && pick-- == 0) return static_cast<int>(a);
  return 0;
}

}  // namespace detail

/// Tabular Q-learning over fixed-horizon episodes with epsilon-greedy
/// exploration. Visit counts are recorded per (state, action) for the
/// heatmap export.
template <DiscreteEnvLike Env>
QTable qlearn(const Env& env, const QHp& hp, std::size_t horizon, RngStream& rng) {
  const auto ns = static_cast<std::size_t>(env.n_states());
  const auto na = static_cast<std::size_t>(env.n_actions());
  QTable table(ns, na, hp.temperature);
  std::fill(table.q.begin(), table.q.end(), hp.q_init);

  for (int ep = 0; ep < hp.episodes; ++ep) {
    auto s = env.initial_state();
    auto si = static_cast<std::size_t>(env.state_index(s));
    for (std::size_t t = 0; t < horizon; ++t) {
      int a;
      if (rng.bernoulli(hp.eps)) {
        a = static_cast<int>(rng.uniform_index(na));
      } else {
        a = detail::argmax_random_ties({table.q.data() + si * na, na}, rng);
      }
      const auto out = env.step(s, DiscreteAction{a}, static_cast<int>(t));
      const auto ni = static_cast<std::size_t>(env.state_index(out.next));
      double best_next = table.q[ni * na];
      for (std::size_t b = 1; b < na; ++b) best_next = std::max(best_next, table.q[ni * na + b]);
      double& q = table.q[si * na + static_cast<std::size_t>(a)];
      q += hp.alpha * (out.reward + hp.gamma * best_next - q);
      table.visits[si * na + static_cast<std::size_t>(a)]++;
      s = out.next;
      si = ni;
    }
  }
  return table;
}

}  // namespace grail
