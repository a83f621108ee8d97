#pragma once

#include <cmath>
#include <cstdint>

namespace gdplan::nn {

// Counter-based generator: draw i of stream s under seed k is a pure function
// of (k, s, i). Independent streams can be handed to parallel workers without
// shared state, and results do not depend on library distribution internals.
class CounterRng {
 public:
  explicit CounterRng(uint64_t seed, uint64_t stream = 0)
      : base_(mix(mix(seed + 0x9e3779b97f4a7c15ull) ^ mix(stream + 0x243f6a8885a308d3ull))) {}

  uint64_t next_u64() {
    ++counter_;
    return mix(base_ + 0x9e3779b97f4a7c15ull * counter_);
  }

  // [0, 1)
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // [lo, hi] inclusive
  int uniform_int(int lo, int hi) {
    if (hi <= lo) return lo;
    uint64_t span = static_cast<uint64_t>(hi - lo) + 1;
    return lo + static_cast<int>(next_u64() % span);
  }

  double normal() {
    double u1 = uniform();
    if (u1 < 1e-300) u1 = 1e-300;
    double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
  }

  double normal(double mean, double stddev) { return mean + stddev * normal(); }

  CounterRng fork(uint64_t substream) const {
    CounterRng r(base_, substream);
    return r;
  }

 private:
  static uint64_t mix(uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
  }

  uint64_t base_;
  uint64_t counter_ = 0;
};

}  // namespace gdplan::nn
