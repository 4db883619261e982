#pragma once

#include <cstdint>

namespace potts {

// Counter-based stream: output i of stream (seed, id) is mix(key + i*gamma).
// Streams are cheap to fork by index, which is what the trajectory fan-out
// needs for reproducible parallel runs.
class CounterRng {
 public:
  CounterRng() : CounterRng(0, 0) {}
  CounterRng(std::uint64_t seed, std::uint64_t stream_id) {
    key_ = mix(seed ^ mix(stream_id + 0x9E3779B97F4A7C15ull));
    ctr_ = 0;
  }

  std::uint64_t next_u64() {
    ctr_ += 0x9E3779B97F4A7C15ull;
    return mix(key_ + ctr_);
  }

  // uniform in (0,1]
  double next_unit() { return double((next_u64() >> 11) + 1) * 0x1.0p-53; }
  // uniform in [0,1)
  double next_half_open() { return double(next_u64() >> 11) * 0x1.0p-53; }

  // uniform integer in [0, n), n > 0 (fixed-point multiply, deterministic)
  std::uint64_t next_below(std::uint64_t n) {
    return (std::uint64_t)(((__uint128_t)next_u64() * n) >> 64);
  }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ull;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBull;
    z ^= z >> 31;
    return z;
  }
  std::uint64_t key_ = 0;
  std::uint64_t ctr_ = 0;
};

}  // namespace potts
