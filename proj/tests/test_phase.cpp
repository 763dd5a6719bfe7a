#include <cmath>
#include <limits>
#include <random>

#include "doctest.h"
#include "waring/phase.hpp"

using namespace waring;

namespace {

// frac(v * alpha) by exact rational arithmetic.
double frac_exact(double alpha, const BigInt& v) {
  int e = 0;
  const double m = std::frexp(alpha, &e);
  const BigInt mant = static_cast<std::int64_t>(std::ldexp(m, 53));
  const int shift = 53 - e;
  if (shift <= 0) return 0.0;
  const BigInt den = BigInt(1) << shift;
  BigInt num = (mant * v) % den;
  if (num < 0) num += den;
  // top 53 bits of num / den
  const int drop = shift > 60 ? shift - 60 : 0;
  return std::ldexp(static_cast<double>(static_cast<std::uint64_t>(num >> drop)), -(shift - drop));
}

}  // namespace

TEST_CASE("DyadicAngle small cases") {
  const DyadicAngle half(0.5);
  CHECK(half.frac_of(std::int64_t{1}) == 0.5);
  CHECK(half.frac_of(std::int64_t{2}) == 0.0);
  CHECK(half.frac_of(std::int64_t{-1}) == 0.5);
  const DyadicAngle q(0.375);
  CHECK(q.frac_of(std::int64_t{3}) == 0.125);
  CHECK(q.frac_of(std::int64_t{-3}) == 0.875);
  CHECK(DyadicAngle(2.0).frac_of(std::int64_t{7}) == 0.0);
  CHECK(DyadicAngle(0.0).frac_of(std::int64_t{123}) == 0.0);
  CHECK(DyadicAngle(1e-300).wraps_exactly() == false);
  CHECK(DyadicAngle(0.1).wraps_exactly());
}

TEST_CASE("DyadicAngle matches exact rational reduction") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> ua(-3.0, 3.0);
  for (int n = 0; n < 500; ++n) {
    const double alpha = ua(rng);
    const DyadicAngle a(alpha);
    const std::int64_t v = static_cast<std::int64_t>(rng() >> (rng() % 60));
    const double want = frac_exact(alpha, BigInt(v));
    CHECK(std::fabs(a.frac_of(v) - want) < 1e-15);
    CHECK(std::fabs(a.frac_of(BigInt(v)) - want) < 1e-15);
    CHECK(std::fabs(a.frac_of(-v) - frac_exact(alpha, BigInt(-v))) < 1e-15);
  }
  // Frequencies far past 64 bits.
  const DyadicAngle a(0.7071067811865476);
  const BigInt big = BigInt(1) << 150;
  CHECK(std::fabs(a.frac_of(big + 12345) - frac_exact(0.7071067811865476, big + 12345)) < 1e-15);
  // Tiny angle goes through the exact path.
  const DyadicAngle tiny(std::ldexp(1.0, -140));
  CHECK(tiny.frac_of(BigInt(1) << 139) == 0.5);
}

TEST_CASE("alpha and alpha + 1 agree bit for bit") {
  for (double alpha : {0.125, 0.3, 0.61803398874989484, 0.9999}) {
    const DyadicAngle a(alpha);
    const DyadicAngle b(alpha + 1.0);
    for (std::int64_t v : {1LL, 7LL, 1000003LL, 123456789012345LL}) {
      if (std::ldexp(1.0, 52) * alpha == std::floor(std::ldexp(1.0, 52) * alpha))
        CHECK(a.frac_of(v) == b.frac_of(v));
    }
  }
}

TEST_CASE("unit") {
  CHECK(std::abs(unit(0.25) - std::complex<double>(0, 1)) < 1e-15);
  CHECK(std::abs(unit(0.0) - 1.0) < 1e-15);
}
