#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "grail/rng.hpp"

namespace grail::nn {

/// Minimal feed-forward network: tanh hidden layers, identity output,
/// 64-bit floats throughout. Parameters live in one flat vector
/// (per layer: row-major weight matrix, then bias), which keeps the
/// optimizer and serialization trivial.
class Mlp {
 public:
  Mlp() = default;

  explicit Mlp(std::vector<std::size_t> sizes) : sizes_(std::move(sizes)) {
    if (sizes_.size() < 2) throw std::invalid_argument("Mlp: need at least 2 layer sizes");
    std::size_t n = 0;
    for (std::size_t l = 0; l + 1 < sizes_.size(); ++l)
      n += sizes_[l] * sizes_[l + 1] + sizes_[l + 1];
    params_.assign(n, 0.0);
  }

  static Mlp xavier(std::vector<std::size_t> sizes, RngStream& rng) {
    Mlp net(std::move(sizes));
    std::size_t off = 0;
    for (std::size_t l = 0; l + 1 < net.sizes_.size(); ++l) {
      const std::size_t in = net.sizes_[l], out = net.sizes_[l + 1];
      const double s = std::sqrt(6.0 / static_cast<double>(in + out));
      for (std::size_t i = 0; i < out * in; ++i) net.params_[off + i] = rng.uniform(-s, s);
      off += out * in + out;  // biases stay zero
    }
    return net;
  }

  const std::vector<std::size_t>& sizes() const { return sizes_; }
  std::size_t input_size() const { return sizes_.front(); }
  std::size_t output_size() const { return sizes_.back(); }
  std::size_t param_count() const { return params_.size(); }
  std::vector<double>& params() { return params_; }
  const std::vector<double>& params() const { return params_; }

  /// Activations kept from a forward pass; acts[0] is the input,
  /// acts.back() the output.
  struct Trace {
    std::vector<std::vector<double>> acts;
  };

  std::vector<double> forward(std::span<const double> x) const {
    Trace t;
    return forward_trace(x, t);
  }

  std::vector<double> forward_trace(std::span<const double> x, Trace& trace) const {
    if (x.size() != sizes_.front())
      throw std::invalid_argument("Mlp::forward: input size " + std::to_string(x.size()) +
                                  " != " + std::to_string(sizes_.front()));
    trace.acts.clear();
    trace.acts.emplace_back(x.begin(), x.end());
    std::size_t off = 0;
    const std::size_t layers = sizes_.size() - 1;
    for (std::size_t l = 0; l < layers; ++l) {
      const std::size_t in = sizes_[l], out = sizes_[l + 1];
      std::vector<double> z(out, 0.0);
      const double* w = params_.data() + off;
      const double* b = w + out * in;
      const std::vector<double>& a = trace.acts.back();
      for (std::size_t i = 0; i < out; ++i) {
        double acc = b[i];
        const double* row = w + i * in;
        for (std::size_t j = 0; j < in; ++j) acc += row[j] * a[j];
        z[i] = acc;
      }
      if (l + 1 < layers)
        for (double& v : z) v = std::tanh(v);
      trace.acts.push_back(std::move(z));
      off += out * in + out;
    }
    return trace.acts.back();
  }

  /// Accumulates d(output . upstream)/d(params) into `grad` (flat, same
  /// layout as params). Exact reverse-mode differentiation.
  void backward(const Trace& trace, std::span<const double> upstream,
                std::vector<double>& grad) const {
    if (grad.size() != params_.size())
      throw std::invalid_argument("Mlp::backward: grad size mismatch");
    if (upstream.size() != sizes_.back())
      throw std::invalid_argument("Mlp::backward: upstream size mismatch");
    const std::size_t layers = sizes_.size() - 1;
    if (trace.acts.size() != layers + 1)
      throw std::invalid_argument("Mlp::backward: stale trace");

    // Parameter offsets per layer.
    std::vector<std::size_t> offs(layers);
    std::size_t off = 0;
    for (std::size_t l = 0; l < layers; ++l) {
      offs[l] = off;
      off += sizes_[l] * sizes_[l + 1] + sizes_[l + 1];
    }

    std::vector<double> delta(upstream.begin(), upstream.end());
    for (std::size_t l = layers; l-- > 0;) {
      const std::size_t in = sizes_[l], out = sizes_[l + 1];
      const std::vector<double>& a_in = trace.acts[l];
      const std::vector<double>& a_out = trace.acts[l + 1];
      // dz = delta * act' (output layer is linear)
      std::vector<double> dz(out);
      for (std::size_t i = 0; i < out; ++i)
        dz[i] = (l + 1 < layers) ? delta[i] * (1.0 - a_out[i] * a_out[i]) : delta[i];

      double* gw = grad.data() + offs[l];
      double* gb = gw + out * in;
      for (std::size_t i = 0; i < out; ++i) {
        const double d = dz[i];
        double* row = gw + i * in;
        for (std::size_t j = 0; j < in; ++j) row[j] += d * a_in[j];
        gb[i] += d;
      }
      if (l > 0) {
        const double* w = params_.data() + offs[l];
        std::vector<double> prev(in, 0.0);
        for (std::size_t i = 0; i < out; ++i) {
          const double d = dz[i];
          const double* row = w + i * in;
          for (std::size_t j = 0; j < in; ++j) prev[j] += row[j] * d;
        }
        delta = std::move(prev);
      }
    }
  }

  friend bool operator==(const Mlp& a, const Mlp& b) {
    return a.sizes_ == b.sizes_ && a.params_ == b.params_;
  }

 private:
  std::vector<std::size_t> sizes_;
  std::vector<double> params_;
};

/// Adam with bias correction. Signals training divergence by throwing on
/// non-finite gradients.
class AdamState {
 public:
  AdamState() = default;
  AdamState(std::size_t n, double lr) : lr_(lr), m_(n, 0.0), v_(n, 0.0) {}

  double learning_rate() const { return lr_; }
  std::size_t step_count() const { return t_; }

  void update(std::vector<double>& params, const std::vector<double>& grads) {
    if (params.size() != m_.size() || grads.size() != m_.size())
      throw std::invalid_argument("AdamState: shape mismatch");
    ++t_;
    const double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
    const double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
    for (std::size_t i = 0; i < params.size(); ++i) {
      const double g = grads[i];
      if (!std::isfinite(g))
        throw std::runtime_error("AdamState: non-finite gradient (training diverged)");
      m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * g;
      v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * g * g;
      const double mh = m_[i] / bc1;
      const double vh = v_[i] / bc2;
      params[i] -= lr_ * mh / (std::sqrt(vh) + eps_);
    }
  }

 private:
  double lr_ = 1e-3;
  double beta1_ = 0.9;
  double beta2_ = 0.999;
  double eps_ = 1e-8;
  std::size_t t_ = 0;
  std::vector<double> m_, v_;
};

}  // namespace grail::nn
