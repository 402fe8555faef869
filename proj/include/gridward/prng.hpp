#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace gridward {

// One splitmix64 step applied to an explicit state value. Returns the
// output word; the caller owns the state advance.
inline std::uint64_t splitmix64_once(std::uint64_t state) {
  state += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// splitmix64 stream. Every random decision in the project goes through
// this generator so that outputs are bit-identical across platforms.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    state_ += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0,1): high 53 bits / 2^53.
  double next_double() {
    return static_cast<double>(next() >> 11) * (1.0 / 9007199254740992.0);
  }

  // Uniform in [0, n). n must be > 0.
  std::uint64_t next_below(std::uint64_t n) { return next() % n; }

  // Uniform in [lo, hi] inclusive.
  std::int64_t next_range(std::int64_t lo, std::int64_t hi) {
    return lo + static_cast<std::int64_t>(
                    next_below(static_cast<std::uint64_t>(hi - lo) + 1));
  }

 private:
  std::uint64_t state_;
};

// Per-job seed derivation: one splitmix64 step over the xor-folded
// (site seed, worker, job) triple. Gives independent per-job streams.
inline std::uint64_t mix64(std::uint64_t seed, std::uint64_t worker,
                           std::uint64_t job) {
  return splitmix64_once(seed ^ (worker * 0x9E3779B97F4A7C15ULL) ^
                         (job * 0xC2B2AE3D27D4EB4FULL));
}

// Index of the sampled category for a probability vector. Falls back to
// the last positive entry when rounding leaves the cursor past the end.
inline std::size_t pick_weighted(SplitMix64& rng, std::span<const double> p) {
  const double r = rng.next_double();
  double acc = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] > 0.0) last_positive = i;
    acc += p[i];
    if (r < acc) return i;
  }
  return last_positive;
}

// Deterministic Fisher-Yates shuffle.
template <typename T>
void shuffle(std::vector<T>& v, SplitMix64& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::size_t j = rng.next_below(i);
    std::swap(v[i - 1], v[j]);
  }
}

}  // namespace gridward
