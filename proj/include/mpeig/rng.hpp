#pragma once

#include <cstdint>

namespace mpeig {

// PCG XSL-RR 128/64.  Fixed increment, so a seed fully determines the
// stream; used everywhere randomness is needed to keep runs reproducible
// across platforms (std::normal_distribution is implementation-defined,
// hence the hand-rolled Box-Muller below).
class Pcg64 {
 public:
  explicit Pcg64(std::uint64_t seed);

  std::uint64_t next_u64();

  // uniform on [0,1) with 53 random bits
  double uniform01();

  // standard normal via Box-Muller (caches the second deviate)
  double gaussian();

 private:
  unsigned __int128 state_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace mpeig
