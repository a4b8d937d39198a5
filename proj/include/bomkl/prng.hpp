#pragma once

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace bomkl {

// Deterministic splittable random stream built on splitmix64. A stream is
// identified by (seed, stream_id); the initial state mixes both so distinct
// stream ids never share state. Integer-only arithmetic keeps sequences
// identical across platforms.
class RngStream {
 public:
  RngStream(uint64_t seed, uint64_t stream_id)
      : state_(mix(mix(seed ^ 0x9e3779b97f4a7c15ULL) ^ stream_id)) {}

  uint64_t next_u64() {
    uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform draw in [0,1), 53-bit resolution.
  double next_uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // One Bernoulli trial; consumes exactly one draw.
  bool bernoulli(double p) {
    if (p < 0.0 || p > 1.0) throw std::invalid_argument("bernoulli: p outside [0,1]");
    return next_uniform() < p;
  }

  // Unbiased integer in [0, n) by rejection.
  uint64_t next_below(uint64_t n) {
    if (n == 0) throw std::invalid_argument("next_below: n == 0");
    const uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    uint64_t v;
    do {
      v = next_u64();
    } while (v >= limit);
    return v % n;
  }

  // Fisher-Yates permutation of 0..n-1.
  std::vector<size_t> permutation(size_t n) {
    std::vector<size_t> order(n);
    std::iota(order.begin(), order.end(), size_t{0});
    for (size_t i = n; i > 1; --i) {
      size_t j = static_cast<size_t>(next_below(i));
      std::swap(order[i - 1], order[j]);
    }
    return order;
  }

 private:
  static uint64_t mix(uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  uint64_t state_;
};

// Stream id layout: one stream per (kernel, purpose) pair so that adding or
// removing an algorithm never perturbs another one's draws.
namespace stream {

enum Purpose : uint64_t {
  kPermute = 0,   // instance-order permutation (kernel field unused)
  kSampleC = 1,   // per-kernel Bernoulli c_t gate
  kSampleZ = 2,   // per-kernel Bernoulli z_t support-vector trial
  kEvict = 3,     // budget-learner eviction draws
  kSynth = 4,     // synthetic data generation
  kSubsample = 5, // seeded dataset subsampling
};

inline uint64_t id(Purpose purpose, uint64_t kernel_index = 0) {
  return (static_cast<uint64_t>(purpose) << 32) | kernel_index;
}

}  // namespace stream

}  // namespace bomkl
