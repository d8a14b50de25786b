#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>

#include "paxsat/stats.hpp"

namespace paxsat {

/// Seeded generator with fully specified output: raw bits come from
/// std::mt19937_64 (bit-exact by the standard) and every distribution is
/// derived from uniforms/inverse CDFs here, so streams are reproducible
/// across platforms and standard-library versions.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  /// Uniform in (0, 1), safe for inverse-CDF use.
  double uniform_open() {
    return (static_cast<double>(gen_() >> 11) + 0.5) * 0x1.0p-53;
  }

  double uniform(double a, double b) { return a + uniform() * (b - a); }

  double normal() { return norm_quantile(uniform_open()); }
  double normal(double mu, double sd) { return mu + sd * normal(); }

  bool bernoulli(double p) { return uniform() < p; }

  /// Inclusive integer range.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
    if (hi < lo) throw std::invalid_argument("uniform_int: empty range");
    std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    // Rejection to avoid modulo bias.
    std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() / span * span;
    std::uint64_t x;
    do {
      x = gen_();
    } while (x >= limit);
    return lo + static_cast<std::int64_t>(x % span);
  }

  /// Marsaglia-Tsang; shape > 0, scale > 0.
  double gamma(double shape, double scale) {
    if (shape <= 0 || scale <= 0) throw std::invalid_argument("gamma: bad parameters");
    if (shape < 1.0) {
      double u = uniform_open();
      return gamma(shape + 1.0, scale) * std::pow(u, 1.0 / shape);
    }
    double d = shape - 1.0 / 3.0;
    double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      double x = normal();
      double v = 1.0 + c * x;
      if (v <= 0) continue;
      v = v * v * v;
      double u = uniform_open();
      if (u < 1.0 - 0.0331 * x * x * x * x) return d * v * scale;
      if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v * scale;
    }
  }

  /// Index into a weight vector (weights need not be normalized).
  std::size_t pick_weighted(std::span<const double> w) {
    double total = 0;
    for (double x : w) total += x;
    if (total <= 0) throw std::invalid_argument("pick_weighted: non-positive total");
    double u = uniform() * total;
    double acc = 0;
    for (std::size_t i = 0; i < w.size(); ++i) {
      acc += w[i];
      if (u < acc) return i;
    }
    return w.size() - 1;
  }

  std::uint64_t bits() { return gen_(); }

  /// Independent child stream; splitmix-style mixing of (seed, stream id).
  Rng fork(std::uint64_t stream) const {
    std::uint64_t z = seed_mix_ + stream * 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return Rng(z ^ (z >> 31));
  }

  void note_seed(std::uint64_t s) { seed_mix_ = s; }

 private:
  std::mt19937_64 gen_;
  std::uint64_t seed_mix_ = 0;
};

/// Convenience: seeded Rng that also remembers its seed for forking.
inline Rng make_rng(std::uint64_t seed) {
  Rng r(seed);
  r.note_seed(seed);
  return r;
}

}  // namespace paxsat
