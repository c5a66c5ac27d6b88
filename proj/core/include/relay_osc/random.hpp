#pragma once

#include <cstdint>

namespace relay_osc {

std::uint64_t splitmix64(std::uint64_t x);

// Counter-based generator: draw i of stream s under seed is a pure function of
// (seed, s, i), so results do not depend on thread scheduling.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
      : seed_(seed), stream_(stream) {}

  std::uint64_t next_u64();
  double uniform();                       // [0, 1)
  double uniform(double lo, double hi);   // [lo, hi)
  double normal();
  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t counter_ = 0;
};

}  // namespace relay_osc
