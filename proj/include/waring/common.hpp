#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

namespace waring {

using BigInt = boost::multiprecision::cpp_int;

// Error hierarchy. The CLI maps these onto exit codes.
struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

struct BudgetError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Raised when a value would not fit the 64-bit element/frequency contract.
struct OverflowError : std::overflow_error {
  using std::overflow_error::overflow_error;
};

// Solver and construction failures (empty windows, missing sign change, ...).
struct ComputeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {

[[noreturn]] inline void throw_overflow(const char* what) {
  throw OverflowError(std::string("64-bit overflow in ") + what);
}

inline std::int64_t checked_mul(std::int64_t a, std::int64_t b, const char* what) {
  std::int64_t r;
  if (__builtin_mul_overflow(a, b, &r)) throw_overflow(what);
  return r;
}

inline std::int64_t checked_add(std::int64_t a, std::int64_t b, const char* what) {
  std::int64_t r;
  if (__builtin_add_overflow(a, b, &r)) throw_overflow(what);
  return r;
}

inline std::int64_t checked_pow(std::int64_t base, int exp, const char* what) {
  std::int64_t r = 1;
  for (int i = 0; i < exp; ++i) r = checked_mul(r, base, what);
  return r;
}

}  // namespace detail
}  // namespace waring
