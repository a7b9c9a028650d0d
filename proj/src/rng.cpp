#include "mpeig/rng.hpp"

#include <cmath>

namespace mpeig {

namespace {

constexpr unsigned __int128 make_u128(std::uint64_t hi, std::uint64_t lo) {
  return (static_cast<unsigned __int128>(hi) << 64) | lo;
}

constexpr unsigned __int128 kMult =
    make_u128(2549297995355413924ULL, 4865540595714422341ULL);
constexpr unsigned __int128 kInc =
    make_u128(6364136223846793005ULL, 1442695040888963407ULL);

std::uint64_t rotr64(std::uint64_t v, unsigned rot) {
  return (v >> rot) | (v << ((64u - rot) & 63u));
}

}  // namespace

Pcg64::Pcg64(std::uint64_t seed) {
  state_ = 0;
  state_ = state_ * kMult + kInc;
  state_ += static_cast<unsigned __int128>(seed);
  state_ = state_ * kMult + kInc;
}

std::uint64_t Pcg64::next_u64() {
  state_ = state_ * kMult + kInc;
  const std::uint64_t xored =
      static_cast<std::uint64_t>(state_ >> 64) ^ static_cast<std::uint64_t>(state_);
  const unsigned rot = static_cast<unsigned>(state_ >> 122);
  return rotr64(xored, rot);
}

double Pcg64::uniform01() {
  return static_cast<double>(next_u64() >> 11) * 0x1p-53;
}

double Pcg64::gaussian() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  // u1 in (0,1] so the log is finite
  const double u1 = (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1p-53;
  const double u2 = uniform01();
  const double mag = std::sqrt(-2.0 * std::log(u1));
  constexpr double two_pi = 6.283185307179586476925286766559;
  spare_ = mag * std::sin(two_pi * u2);
  has_spare_ = true;
  return mag * std::cos(two_pi * u2);
}

}  // namespace mpeig
