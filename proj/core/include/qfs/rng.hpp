#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string_view>
#include <vector>

namespace qfs {

// Deterministic random stream. All scenario randomness flows from a single
// config seed through named substreams so that ensemble members can be
// generated independently and reproducibly. The variate transforms are
// written out explicitly (not std::*_distribution) so that identical seeds
// give identical streams on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Derive a substream seed from (seed, name, index).
  static std::uint64_t derive_seed(std::uint64_t seed, std::string_view name,
                                   std::uint64_t index = 0) {
    std::uint64_t h = 1469598103934665603ULL;  // FNV-1a over the name
    for (char c : name) {
      h ^= static_cast<std::uint64_t>(static_cast<unsigned char>(c));
      h *= 1099511628211ULL;
    }
    return splitmix(seed ^ splitmix(h ^ splitmix(index)));
  }

  static Rng substream(std::uint64_t seed, std::string_view name,
                       std::uint64_t index = 0) {
    return Rng(derive_seed(seed, name, index));
  }

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1), 53-bit resolution.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Standard normal via Box-Muller (pair cached).
  double normal() {
    if (have_cached_normal_) {
      have_cached_normal_ = false;
      return cached_normal_;
    }
    double u1;
    do {
      u1 = uniform();
    } while (u1 <= 0.0);
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double phi = 2.0 * std::numbers::pi * u2;
    cached_normal_ = r * std::sin(phi);
    have_cached_normal_ = true;
    return r * std::cos(phi);
  }

  // Exponential with the given mean.
  double exponential(double mean) {
    double u;
    do {
      u = uniform();
    } while (u <= 0.0);
    return -mean * std::log(u);
  }

  // Index drawn from unnormalized non-negative weights.
  std::size_t discrete(const std::vector<double>& weights) {
    double total = 0.0;
    for (double w : weights) total += w;
    if (!(total > 0.0)) throw std::invalid_argument("discrete: zero total weight");
    double u = uniform() * total;
    for (std::size_t i = 0; i + 1 < weights.size(); ++i) {
      u -= weights[i];
      if (u < 0.0) return i;
    }
    return weights.size() - 1;
  }

 private:
  static std::uint64_t splitmix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  }

  std::mt19937_64 engine_;
  bool have_cached_normal_ = false;
  double cached_normal_ = 0.0;
};

}  // namespace qfs
