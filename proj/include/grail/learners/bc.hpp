#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "grail/bank.hpp"
#include "grail/learners/hyperparams.hpp"
#include "grail/policies.hpp"
#include "grail/rng.hpp"
#include "grail/tinynn.hpp"
#include "grail/types.hpp"

namespace grail {

/// Count-based behavioral cloning with Laplace smoothing (alpha = 1):
/// pi(a|s) = (count(s,a) + 1) / (count(s) + |A|); unseen states stay uniform.
inline TabularPolicy bc_fit_tabular_indexed(std::span<const std::pair<int, int>> pairs,
                                            std::size_t n_states, std::size_t n_actions) {
  if (pairs.empty()) throw std::invalid_argument("bc_fit_tabular: no state-action pairs");
  std::vector<std::uint64_t> counts(n_states * n_actions, 0);
  for (const auto& [s, a] : pairs) counts[static_cast<std::size_t>(s) * n_actions + a]++;

  TabularPolicy pi(n_states, n_actions);
  for (std::size_t s = 0; s < n_states; ++s) {
    std::uint64_t total = 0;
    for (std::size_t a = 0; a < n_actions; ++a) total += counts[s * n_actions + a];
    for (std::size_t a = 0; a < n_actions; ++a)
      pi.probs[s * n_actions + a] =
          (static_cast<double>(counts[s * n_actions + a]) + 1.0) /
          (static_cast<double>(total) + static_cast<double>(n_actions));
  }
  return pi;
}

inline TabularPolicy bc_fit_tabular(const std::vector<Trajectory>& demos) {
  if (demos.empty()) throw std::invalid_argument("bc_fit_tabular: empty demonstrations");
  std::vector<std::pair<int, int>> pairs;
  for (const auto& t : demos) {
    if (t.env != EnvKind::grid)
      throw std::invalid_argument("bc_fit_tabular: demonstrations must be discrete");
    for (const auto& step : t.steps)
      pairs.emplace_back(grid_state_index(std::get<GridState>(step.s)),
                         std::get<DiscreteAction>(step.a).code);
  }
  return bc_fit_tabular_indexed(pairs, kGridStateCount, kGridActionCount);
}

/// MSE regression of demonstrated actions on states over shuffled
/// mini-batches; the policy scale is fit to the training residuals
/// afterwards (floored, scale must stay positive).
inline GaussianMlpPolicy bc_fit_mlp(const std::vector<Trajectory>& demos, const BcHp& hp,
                                    RngStream& rng) {
  if (demos.empty()) throw std::invalid_argument("bc_fit_mlp: empty demonstrations");
  std::vector<std::array<double, 3>> xs;
  std::vector<std::array<double, 3>> ys;
  for (const auto& t : demos) {
    if (t.env != EnvKind::reach)
      throw std::invalid_argument("bc_fit_mlp: demonstrations must be continuous");
    for (const auto& step : t.steps) {
      xs.push_back(std::get<ReachState>(step.s).p);
      ys.push_back(std::get<ContinuousAction>(step.a).v);
    }
  }
  const std::size_t n = xs.size();

  nn::Mlp net = nn::Mlp::xavier({3, 64, 64, 3}, rng);
  nn::AdamState adam(net.param_count(), hp.lr);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> grad(net.param_count());

  for (int epoch = 0; epoch < hp.epochs; ++epoch) {
    // Fisher-Yates shuffle driven by the training stream.
    for (std::size_t i = n; i > 1; --i)
      std::swap(order[i - 1], order[rng.uniform_index(i)]);
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < n; start += static_cast<std::size_t>(hp.batch)) {
      const std::size_t end = std::min(n, start + static_cast<std::size_t>(hp.batch));
      const double m = static_cast<double>(end - start);
      std::fill(grad.begin(), grad.end(), 0.0);
      for (std::size_t k = start; k < end; ++k) {
        const auto& x = xs[order[k]];
        const auto& y = ys[order[k]];
        nn::Mlp::Trace trace;
        const auto pred = net.forward_trace(std::span<const double>(x.data(), 3), trace);
        std::vector<double> up(3);
        for (int d = 0; d < 3; ++d) {
          const double err = pred[static_cast<std::size_t>(d)] - y[static_cast<std::size_t>(d)];
          epoch_loss += err * err;
          up[static_cast<std::size_t>(d)] = 2.0 * err / m;
        }
        net.backward(trace, up, grad);
      }
      adam.update(net.params(), grad);
    }
    if (!std::isfinite(epoch_loss))
      throw std::runtime_error("bc_fit_mlp diverged at epoch " + std::to_string(epoch));
  }

  // Residual standard deviation per action dimension.
  std::array<double, 3> sq{0.0, 0.0, 0.0};
  for (std::size_t k = 0; k < n; ++k) {
    const auto pred = net.forward(std::span<const double>(xs[k].data(), 3));
    for (int d = 0; d < 3; ++d) {
      const double err = pred[static_cast<std::size_t>(d)] - ys[k][static_cast<std::size_t>(d)];
      sq[static_cast<std::size_t>(d)] += err * err;
    }
  }
  GaussianMlpPolicy policy;
  policy.mean = std::move(net);
  policy.log_scale.resize(3);
  for (int d = 0; d < 3; ++d) {
    const double sd = std::sqrt(sq[static_cast<std::size_t>(d)] / static_cast<double>(n));
    policy.log_scale[static_cast<std::size_t>(d)] = std::log(std::max(sd, 1e-3));
  }
  return policy;
}

}  // namespace grail
