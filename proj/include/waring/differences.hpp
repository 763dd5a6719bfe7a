#pragma once

// Integer polynomials and the (modified) forward difference operators used
// to peel one power of x off x^k per level, plus the balancing algebra that
// fixes the level exponents.

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "waring/bound_engine.hpp"
#include "waring/common.hpp"
#include "waring/smooth_sets.hpp"

namespace waring::diff {

class IntPolynomial {
 public:
  IntPolynomial() = default;
  explicit IntPolynomial(std::vector<BigInt> ascending);

  static IntPolynomial monomial(int degree, BigInt coeff = 1);

  // -1 for the zero polynomial.
  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  bool is_zero() const { return coeffs_.empty(); }
  const std::vector<BigInt>& coeffs() const { return coeffs_; }
  BigInt coeff(int i) const;
  BigInt leading() const { return is_zero() ? BigInt(0) : coeffs_.back(); }

  BigInt operator()(const BigInt& x) const;
  // phi(x + t)
  IntPolynomial shifted(const BigInt& t) const;
  IntPolynomial scaled(const BigInt& c) const;

  // "c0 c1 ... cd"; the zero polynomial prints as "0".
  std::string to_string() const;

  friend IntPolynomial operator-(const IntPolynomial& a, const IntPolynomial& b);
  friend bool operator==(const IntPolynomial& a, const IntPolynomial& b) { return a.coeffs_ == b.coeffs_; }

 private:
  void trim();
  std::vector<BigInt> coeffs_;
};

// phi(x + t) - phi(x)
IntPolynomial forward_diff(const IntPolynomial& phi, const BigInt& t);

// (phi(x + h m) - phi(x)) / m, exact. Throws ComputeError if m does not divide.
IntPolynomial modified_diff(const IntPolynomial& phi, const BigInt& h, const BigInt& m);

struct DiffChain {
  int k = 0;
  std::vector<std::int64_t> h;
  std::vector<std::int64_t> p;
  std::vector<BigInt> moduli;  // p_j^k
  IntPolynomial result;
};

// Psi_i = chained modified differences of x^k with steps (h_j, p_j^k).
DiffChain psi(int k, const std::vector<std::int64_t>& h, const std::vector<std::int64_t>& p);

struct LevelParams {
  std::vector<std::int64_t> H;             // h_j ranges over [1, H_j]
  std::vector<smooth::PrimeWindow> windows;  // p_j ranges over windows[j]
  std::int64_t x_range = 1;                // x ranges over [1, x_range]
};

// Number of terms of the nested sum.
double f_i_terms(const LevelParams& params);

// sum over h, p, x of e(q^k Psi_i(x; h; p^k) alpha). Budget caps the term count.
std::complex<double> f_i_sum(double alpha, std::int64_t q, int k, const LevelParams& params,
                             double term_budget = 1e8);

// The same terms as integer frequencies q^k Psi_i(x), for use as an exponential sum.
// Throws OverflowError when a frequency leaves the 64-bit range.
std::vector<std::int64_t> f_i_frequencies(std::int64_t q, int k, const LevelParams& params,
                                          double term_budget = 1e8);

// Level geometry for the multi-level construction; index 0 of Z and H is unused.
struct Geometry {
  int k = 0;
  double P = 0;
  std::vector<double> Z;         // Z_j, j = 1..k
  std::vector<double> H;         // H_j = P / Z_j^k
  std::vector<double> P_levels;  // P_0 = P, P_j = P_{j-1} / Z_j

  double log_H_tilde(int i) const;  // log prod_{j<=i} H_j
  double log_Z_tilde(int i) const;  // log prod_{j<=i} Z_j
};

Geometry geometry_from_thetas(int k, double P, const std::vector<double>& thetas);
Geometry geometry_from_schedule(const bounds::ThetaSchedule& schedule, double P);

enum class CountSource { Model, Measured };

// log S_{s-1}(P_j) for j = 0..k.
struct CountsInput {
  std::vector<double> log_S;
  CountSource source = CountSource::Model;
};

// S_{s-1}(P_j) = P_j^{lambda_prev}
CountsInput model_counts(const Geometry& g, double lambda_prev);

struct Lemma7Terms {
  int i = 0;
  double log_U = 0;
  double log_V = 0;
  double U = 0;
  double V = 0;
  double residual = 0;  // |log(U / V)|
  // inputs
  double S_i = 0;
  double S_next = 0;
  double Z_next = 0;
  double H_tilde = 0;
  double Z_tilde = 0;
  double P = 0;
  CountSource source = CountSource::Model;
};

// U_i and V_i for 0 <= i < k. J_{i+1} is replaced by its balanced estimate:
// U_{i+1} for i + 1 < k, and H~_k Z~_k P S_{s-1}(P_k) at the top level.
Lemma7Terms lemma7_terms(int i, int s, const CountsInput& counts, const Geometry& g);

}  // namespace waring::diff
