#include "waring/phase.hpp"

#include <cmath>

namespace waring {

DyadicAngle::DyadicAngle(double alpha) : alpha_(alpha) {
  if (!std::isfinite(alpha)) throw DomainError("DyadicAngle: alpha must be finite");
  if (alpha == 0.0) {
    integral_ = true;
    return;
  }
  int exp2 = 0;
  const double frac = std::frexp(alpha, &exp2);  // alpha = frac * 2^exp2, |frac| in [0.5, 1)
  mantissa_ = static_cast<std::int64_t>(std::ldexp(frac, 53));
  exponent_ = 53 - exp2;
  while (exponent_ > 0 && (mantissa_ & 1) == 0) {
    mantissa_ /= 2;
    --exponent_;
  }
  integral_ = exponent_ <= 0;
  tiny_ = exponent_ > 127;
}

double DyadicAngle::frac_of_wrapped(u128 v_mod) const {
  if (integral_) return 0.0;
  if (tiny_) throw ComputeError("DyadicAngle: wrapped path needs exponent <= 127");
  const u128 prod = v_mod * static_cast<u128>(static_cast<i128>(mantissa_));
  const u128 mask = (static_cast<u128>(1) << exponent_) - 1;
  const u128 r = prod & mask;
  // r < 2^exponent; scale in two halves to keep 64-bit mantissa precision.
  const long double hi = static_cast<long double>(static_cast<std::uint64_t>(r >> 64));
  const long double lo = static_cast<long double>(static_cast<std::uint64_t>(r));
  const long double val = std::ldexp(hi, 64 - exponent_) + std::ldexp(lo, -exponent_);
  const double out = static_cast<double>(val);
  return out >= 1.0 ? 0.0 : out;
}

double DyadicAngle::frac_of(std::int64_t v) const {
  if (integral_) return 0.0;
  if (!tiny_) return frac_of_wrapped(static_cast<u128>(static_cast<i128>(v)));
  // |v * mantissa| < 2^116 < 2^exponent: the product is the whole phase.
  const i128 prod = static_cast<i128>(v) * mantissa_;
  const long double val = std::ldexp(static_cast<long double>(prod), -exponent_);
  return static_cast<double>(val - std::floor(val));
}

double DyadicAngle::frac_of(const BigInt& v) const {
  if (integral_) return 0.0;
  if (!tiny_) {
    const BigInt mag = v < 0 ? BigInt(-v) : v;
    const BigInt reduced = mag & ((BigInt(1) << 128) - 1);
    u128 w = static_cast<u128>(static_cast<std::uint64_t>(reduced >> 64)) << 64 |
             static_cast<std::uint64_t>(reduced & ((BigInt(1) << 64) - 1));
    if (v < 0) w = ~w + 1;
    return frac_of_wrapped(w);
  }
  const BigInt prod = v * mantissa_;
  const BigInt modulus = BigInt(1) << exponent_;
  BigInt r = prod % modulus;
  if (r < 0) r += modulus;
  // r < 2^exponent: convert via long double scaling.
  const long double val = std::ldexp(r.convert_to<long double>(), -exponent_);
  return static_cast<double>(val);
}

}  // namespace waring
