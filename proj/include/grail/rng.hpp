#pragma once

#include <cstdint>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>

namespace grail {

// 64-bit FNV-1a. Used to turn stream keys into seed material.
inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

/// Deterministic per-role random stream. Streams are derived by hashing a
/// (master seed, key) pair, so the draw order of one stream can never affect
/// another. The underlying engine is std::mt19937_64, whose output sequence
/// is pinned by the standard.
class RngStream {
 public:
  RngStream(std::uint64_t master_seed, std::string key)
      : master_seed_(master_seed),
        key_(std::move(key)),
        engine_(splitmix64(master_seed ^ fnv1a64(key_))) {
    if (key_.empty()) throw std::invalid_argument("RngStream: empty key");
  }

  std::uint64_t master_seed() const { return master_seed_; }
  const std::string& key() const { return key_; }

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform double in [0, 1) with 53 bits of precision.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n). Rejection sampling, no modulo bias.
  std::uint64_t uniform_index(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("uniform_index: n == 0");
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x = engine_();
    while (x >= limit) x = engine_();
    return x % n;
  }

  bool bernoulli(double p) { return uniform() < p; }

  /// Standard normal via the Marsaglia polar method.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = uniform(-1.0, 1.0);
      v = uniform(-1.0, 1.0);
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double m = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * m;
    have_spare_ = true;
    return u * m;
  }

 private:
  std::uint64_t master_seed_;
  std::string key_;
  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

inline RngStream derive_stream(std::uint64_t master_seed, const std::string& key) {
  return RngStream(master_seed, key);
}

/// Stable 64-bit sub-seed for nested derivations (e.g. one seed per run).
inline std::uint64_t derive_seed(std::uint64_t master_seed, const std::string& key) {
  return splitmix64(master_seed ^ fnv1a64(key));
}

}  // namespace grail
