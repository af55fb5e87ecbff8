#pragma once
#include <array>
#include <cmath>
#include <cstdint>
#include <initializer_list>

namespace tlsnoise {

// Deterministic random streams.
//
// Every stochastic routine in the library draws from an Rng derived from an
// explicit 64-bit seed plus an integer path (hypothesis index, TLS index,
// realization index, ...). Derivation is a splitmix64 chain, so streams are
// independent of evaluation order and of any parallel schedule. The generator
// is xoshiro256++; distributions are implemented here rather than taken from
// <random> so that results are identical across standard libraries.

inline uint64_t splitmix64(uint64_t& state) {
  uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

class Rng {
 public:
  explicit Rng(uint64_t seed) {
    uint64_t sm = seed;
    for (auto& word : state_) word = splitmix64(sm);
  }

  // Child stream keyed by (seed, path...). derive(s, {a,b}) and
  // derive(s, {a,c}) are unrelated streams for b != c.
  static Rng derive(uint64_t seed, std::initializer_list<uint64_t> path) {
    uint64_t sm = seed;
    uint64_t key = splitmix64(sm);
    for (uint64_t p : path) {
      sm = key ^ (p + 0x9e3779b97f4a7c15ULL);
      key = splitmix64(sm);
    }
    return Rng(key);
  }

  uint64_t next_u64() {
    const uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // Uniform in [0,1) with 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Log-uniform on [lo,hi], lo > 0. A degenerate interval returns lo.
  double log_uniform(double lo, double hi) {
    if (lo == hi) return lo;
    return std::exp(uniform(std::log(lo), std::log(hi)));
  }

  // Exponential waiting time with the given rate.
  double exponential(double rate) {
    return -std::log1p(-uniform()) / rate;
  }

  bool coin() { return (next_u64() >> 63) != 0; }

 private:
  static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
  std::array<uint64_t, 4> state_{};
};

}  // namespace tlsnoise
