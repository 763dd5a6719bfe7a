#pragma once

// Exponent recursions for the auxiliary equation and the G(k) upper bounds
// derived from them. Everything here is closed-form or a short contraction,
// evaluated in double precision.

#include <optional>
#include <string>
#include <vector>

#include "waring/common.hpp"

namespace waring::bounds {

struct BoundParams {
  int k = 3;
  int s = 2;
  double theta = 1.0 / 3.0;

  void validate() const;
};

enum class Policy { FixedTheta, CoupledSchedule };

// Which value of theta drives each step of the coupled Delta recursion.
enum class ThetaVariant {
  Truncated,  // theta = 1/(k + Delta(s-1))
  Full,       // theta = theta_1 of the complete schedule
};

// lambda and delta are indexed by s; entries 0 and 1 are unused (NaN).
struct ExponentTable {
  int k = 0;
  Policy policy = Policy::FixedTheta;
  double fixed_theta = 0.0;  // only meaningful for FixedTheta
  ThetaVariant variant = ThetaVariant::Truncated;
  std::vector<double> lambda;
  std::vector<double> delta;
  std::vector<double> theta_used;

  int s_max() const { return static_cast<int>(lambda.size()) - 1; }
};

struct SigmaData {
  int k = 0;
  double beta = 0;         // (k-2)(k+1)^2/k^2
  double lambda_root = 0;  // root of (1+lambda) beta = e^lambda
  double sigma_hat = 0;    // log(1+1/k) / (4(1+lambda))
  double mu = 0;           // log((k+1)/k)
  double s_star = 0;       // lambda / log(1+1/k)
  double residual = 0;
};

struct ThetaSchedule {
  int k = 0;
  double delta_prev = 0;
  std::vector<double> thetas;  // thetas[j-1] holds theta_j, j = 1..k

  double theta(int j) const { return thetas.at(static_cast<std::size_t>(j - 1)); }
  // Coefficients of the linear recurrence theta_j = a * theta_{j+1} + b.
  double slope() const { return (k - delta_prev) / (2.0 * k); }
  double offset() const { return 1.0 / (2.0 * k); }
};

enum class Theorem { T1, T2 };

struct GkResult {
  int k = 0;
  Theorem theorem = Theorem::T1;
  long bound = 0;
  // T1: v and t. T2: u from the closed-form choice, ceil term, plus the scan optimum.
  long v = 0;
  long t = 0;
  long u = 0;
  long ceil_term = 0;
  long scan_choice = 0;  // v (T1) or u (T2) minimising the bound over the scan window
  long scan_bound = 0;
  long scan_lo = 0;
  long scan_hi = 0;
  double continuous_optimum = 0;
  double asymptote = 0;
  // T2 only: Delta(u) from the exponential bound and from the exact iteration.
  double delta_u_bound = 0;
  double delta_u_exact = 0;
  long bound_exact_delta = 0;
  bool small_k = false;  // k < 10: theorems are asymptotic, flag the result
  SigmaData sigma;
};

double lambda_closed(int k, int s);
ExponentTable lambda_iterate(int k, int s_max, double theta);

SigmaData solve_sigma(int k);
double sigma_of_s(int k, int s);

ThetaSchedule theta_schedule(int k, double delta_prev);

ExponentTable delta_iterate(int k, int s_max, ThetaVariant variant = ThetaVariant::Truncated);
// 2k exp(-2(s-1)/(k+1))
double delta_bound(int k, int s);

// Formula values at a given integer choice. Exposed so callers and tests can
// evaluate the objective away from the optimiser.
long t1_formula(int k, double sigma_hat, long v);
long t2_formula(double sigma_hat, long u, double delta_u);

GkResult gk_bound(int k, Theorem theorem);
// Same as gk_bound but with an explicit scan window (used to test optimiser soundness).
GkResult gk_bound(int k, Theorem theorem, long scan_lo, long scan_hi);

const char* to_string(Theorem t);
const char* to_string(Policy p);
const char* to_string(ThetaVariant v);

}  // namespace waring::bounds
