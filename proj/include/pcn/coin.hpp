#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>

#include "pcn/error.hpp"

namespace pcn {

// Coin amounts are integers in micro-coin units so that budget arithmetic
// (sums of C and per-channel locks) is exact. Rates, probabilities and
// utilities stay in double.
using Coin = std::int64_t;

inline constexpr Coin kCoinScale = 1'000'000;

inline double coin_to_double(Coin c) {
  return static_cast<double>(c) / static_cast<double>(kCoinScale);
}

inline Coin coin_from_double(double coins) {
  if (!std::isfinite(coins)) {
    throw ValidationError("coin amount must be finite");
  }
  const double scaled = coins * static_cast<double>(kCoinScale);
  if (scaled >= 9.2e18 || scaled <= -9.2e18) {
    throw ValidationError("coin amount out of range");
  }
  return static_cast<Coin>(std::llround(scaled));
}

inline Coin coins(std::int64_t whole) { return whole * kCoinScale; }

}  // namespace pcn
