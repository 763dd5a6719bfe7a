#pragma once

// Exact phase reduction for e(v * alpha) = exp(2 pi i v alpha).
//
// A double alpha is the dyadic rational m / 2^e. For an integer v the
// fractional part of v * alpha is ((v * m) mod 2^e) / 2^e, which we compute
// in wrapping 128-bit arithmetic (exact whenever e <= 127) before touching
// floating point. Large frequencies therefore lose no phase accuracy, and
// alpha and alpha + 1 give bit-identical results whenever both are exact.

#include <complex>
#include <cstdint>

#include "waring/common.hpp"

namespace waring {

using u128 = unsigned __int128;
using i128 = __int128;

class DyadicAngle {
 public:
  explicit DyadicAngle(double alpha);

  double value() const { return alpha_; }

  // Fractional part of v * alpha, in [0, 1). `v_mod` is v reduced mod 2^128
  // (two's complement wrap of a signed value is fine).
  double frac_of_wrapped(u128 v_mod) const;
  double frac_of(std::int64_t v) const;
  double frac_of(const BigInt& v) const;

  // True when the 128-bit fast path is exact (e <= 127).
  bool wraps_exactly() const { return !tiny_; }

 private:
  double alpha_;
  std::int64_t mantissa_ = 0;  // signed
  int exponent_ = 0;           // alpha = mantissa * 2^{-exponent}
  bool tiny_ = false;          // exponent > 127
  bool integral_ = false;      // exponent <= 0
};

inline std::complex<double> unit(double frac) {
  constexpr double kTwoPi = 6.283185307179586476925286766559;
  return {std::cos(kTwoPi * frac), std::sin(kTwoPi * frac)};
}

}  // namespace waring
