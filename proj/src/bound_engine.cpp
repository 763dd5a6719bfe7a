#include "waring/bound_engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace waring::bounds {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void require_k(int k) {
  if (k < 3) throw DomainError("k must be >= 3, got " + std::to_string(k));
}

void require_s(int s) {
  if (s < 2) throw DomainError("s must be >= 2, got " + std::to_string(s));
}

void require_theta(double theta) {
  if (!(theta > 0.0 && theta <= 1.0))
    throw DomainError("theta must lie in (0, 1], got " + std::to_string(theta));
}

}  // namespace

void BoundParams::validate() const {
  require_k(k);
  require_s(s);
  require_theta(theta);
}

double lambda_closed(int k, int s) {
  require_k(k);
  require_s(s);
  const double ratio = static_cast<double>(k) / (k + 1);
  return (2.0 * s - k) + (k - 2) * std::pow(ratio, s - 2);
}

ExponentTable lambda_iterate(int k, int s_max, double theta) {
  require_k(k);
  require_s(s_max);
  require_theta(theta);
  ExponentTable t;
  t.k = k;
  t.policy = Policy::FixedTheta;
  t.fixed_theta = theta;
  t.lambda.assign(static_cast<std::size_t>(s_max) + 1, kNaN);
  t.delta.assign(t.lambda.size(), kNaN);
  t.theta_used.assign(t.lambda.size(), kNaN);
  t.lambda[2] = 2.0;
  t.delta[2] = 2.0 - (4 - k);
  for (int s = 3; s <= s_max; ++s) {
    t.lambda[s] = (t.lambda[s - 1] + 1.0 + 2.0 * s * theta) / (1.0 + theta);
    t.delta[s] = t.lambda[s] - (2.0 * s - k);
    t.theta_used[s] = theta;
  }
  return t;
}

SigmaData solve_sigma(int k) {
  require_k(k);
  SigmaData d;
  d.k = k;
  d.beta = (k - 2.0) * (k + 1.0) * (k + 1.0) / (static_cast<double>(k) * k);
  const auto g = [beta = d.beta](double x) { return (1.0 + x) * beta - std::exp(x); };

  // g(0) = beta - 1 > 0 for k >= 3, and e^x wins eventually.
  double lo = 0.0;
  double hi = 4.0 * std::log(static_cast<double>(k)) + 10.0;
  double glo = g(lo);
  double ghi = g(hi);
  if (!(glo > 0.0 && ghi < 0.0))
    throw ComputeError("solve_sigma: no sign change of (1+l)beta - e^l on (0, " + std::to_string(hi) +
                       "] for k=" + std::to_string(k));
  for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double gm = g(mid);
    if (gm > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  d.lambda_root = 0.5 * (lo + hi);
  d.residual = std::fabs(g(d.lambda_root));
  if (d.residual >= 1e-9) throw ComputeError("solve_sigma: bisection residual too large");
  const double log1p_k = std::log1p(1.0 / k);
  d.sigma_hat = log1p_k / (4.0 * (1.0 + d.lambda_root));
  d.mu = log1p_k;
  d.s_star = d.lambda_root / log1p_k;
  return d;
}

double sigma_of_s(int k, int s) {
  require_k(k);
  require_s(s);
  const double ratio = static_cast<double>(k) / (k + 1);
  return (1.0 - (k - 2) * std::pow(ratio, s - 2)) / (4.0 * s);
}

ThetaSchedule theta_schedule(int k, double delta_prev) {
  require_k(k);
  if (!(delta_prev > 0.0 && delta_prev < k))
    throw DomainError("theta_schedule: need 0 < Delta < k, got " + std::to_string(delta_prev));
  ThetaSchedule ts;
  ts.k = k;
  ts.delta_prev = delta_prev;
  ts.thetas.resize(static_cast<std::size_t>(k));
  const double fixed = 1.0 / (k + delta_prev);
  const double gap = 1.0 / k - fixed;
  const double base = (k - delta_prev) / (2.0 * k);
  for (int j = 1; j <= k; ++j) ts.thetas[j - 1] = fixed + gap * std::pow(base, k - j);
  // pow(base, 0) is exactly 1 but fixed + (1/k - fixed) may round; pin the endpoint.
  ts.thetas[k - 1] = 1.0 / k;
  return ts;
}

ExponentTable delta_iterate(int k, int s_max, ThetaVariant variant) {
  require_k(k);
  require_s(s_max);
  ExponentTable t;
  t.k = k;
  t.policy = Policy::CoupledSchedule;
  t.variant = variant;
  t.lambda.assign(static_cast<std::size_t>(s_max) + 1, kNaN);
  t.delta.assign(t.lambda.size(), kNaN);
  t.theta_used.assign(t.lambda.size(), kNaN);
  t.delta[2] = k - 2.0;
  t.lambda[2] = 2.0;
  for (int s = 3; s <= s_max; ++s) {
    const double prev = t.delta[s - 1];
    double theta = 1.0 / (k + prev);
    if (variant == ThetaVariant::Full && prev > 0.0 && prev < k) theta = theta_schedule(k, prev).theta(1);
    t.theta_used[s] = theta;
    t.delta[s] = (prev + k * theta - 1.0) / (1.0 + theta);
    t.lambda[s] = t.delta[s] + (2.0 * s - k);
  }
  return t;
}

double delta_bound(int k, int s) {
  return 2.0 * k * std::exp(-2.0 * (s - 1) / (k + 1.0));
}

long t1_formula(int k, double sigma_hat, long v) {
  const double inner = (k - 2) / (2.0 * sigma_hat) * std::pow(static_cast<double>(k) / (k + 1), v);
  return 7 + 2 * v + 2 * static_cast<long>(std::ceil(inner));
}

long t2_formula(double sigma_hat, long u, double delta_u) {
  return 3 + 2 * u + 2 * static_cast<long>(std::ceil(delta_u / (2.0 * sigma_hat)));
}

namespace {

double log_k_log_k(int k) {
  const double kk = static_cast<double>(k);
  return std::log(kk * std::log(kk));
}

long paper_u(int k, double sigma_hat) {
  return 1 + static_cast<long>(std::ceil((k + 1) / 2.0 * std::log(1.0 / sigma_hat)));
}

GkResult gk_t1(int k, const SigmaData& sd, std::optional<std::pair<long, long>> window) {
  GkResult r;
  r.k = k;
  r.theorem = Theorem::T1;
  r.sigma = sd;
  r.small_k = k < 10;
  r.continuous_optimum = std::log(sd.mu * (k - 2) / (2.0 * sd.sigma_hat)) / sd.mu;
  r.asymptote = 2.0 * k * (log_k_log_k(k) + 1.0 + std::log(2.0));
  r.scan_lo = window ? window->first : 0;
  r.scan_hi = window ? window->second : static_cast<long>(std::floor(4.0 * r.continuous_optimum));
  if (r.scan_lo < 0) r.scan_lo = 0;
  if (r.scan_hi < r.scan_lo) r.scan_hi = r.scan_lo;
  r.scan_bound = std::numeric_limits<long>::max();
  for (long v = r.scan_lo; v <= r.scan_hi; ++v) {
    const long b = t1_formula(k, sd.sigma_hat, v);
    if (b < r.scan_bound) {
      r.scan_bound = b;
      r.scan_choice = v;
    }
  }
  r.v = r.scan_choice;
  r.bound = r.scan_bound;
  r.ceil_term = (r.bound - 7 - 2 * r.v) / 2;
  r.t = 1 + r.ceil_term;
  r.u = r.v + 2;
  return r;
}

GkResult gk_t2(int k, const SigmaData& sd, std::optional<std::pair<long, long>> window) {
  GkResult r;
  r.k = k;
  r.theorem = Theorem::T2;
  r.sigma = sd;
  r.small_k = k < 10;
  r.asymptote = k * log_k_log_k(k);
  r.u = paper_u(k, sd.sigma_hat);
  r.continuous_optimum = (k + 1) / 2.0 * std::log(1.0 / sd.sigma_hat) + 1.0;

  r.scan_lo = window ? window->first : r.u - 3L * k;
  r.scan_hi = window ? window->second : r.u + 3L * k;
  if (r.scan_lo < 2) r.scan_lo = 2;
  if (r.scan_hi < r.scan_lo) r.scan_hi = r.scan_lo;

  const long table_end = std::max(r.scan_hi, r.u);
  const ExponentTable exact = delta_iterate(k, static_cast<int>(table_end));
  r.delta_u_bound = delta_bound(k, static_cast<int>(r.u));
  r.delta_u_exact = exact.delta[static_cast<std::size_t>(r.u)];
  r.bound = t2_formula(sd.sigma_hat, r.u, r.delta_u_bound);
  r.bound_exact_delta = t2_formula(sd.sigma_hat, r.u, r.delta_u_exact);
  r.ceil_term = (r.bound - 3 - 2 * r.u) / 2;

  r.scan_bound = std::numeric_limits<long>::max();
  for (long u = r.scan_lo; u <= r.scan_hi; ++u) {
    const long b = t2_formula(sd.sigma_hat, u, delta_bound(k, static_cast<int>(u)));
    if (b < r.scan_bound) {
      r.scan_bound = b;
      r.scan_choice = u;
    }
  }
  return r;
}

}  // namespace

GkResult gk_bound(int k, Theorem theorem) {
  require_k(k);
  const SigmaData sd = solve_sigma(k);
  return theorem == Theorem::T1 ? gk_t1(k, sd, std::nullopt) : gk_t2(k, sd, std::nullopt);
}

GkResult gk_bound(int k, Theorem theorem, long scan_lo, long scan_hi) {
  require_k(k);
  if (scan_hi < scan_lo) throw DomainError("gk_bound: empty scan window");
  const SigmaData sd = solve_sigma(k);
  const std::pair<long, long> w{scan_lo, scan_hi};
  return theorem == Theorem::T1 ? gk_t1(k, sd, w) : gk_t2(k, sd, w);
}

const char* to_string(Theorem t) { return t == Theorem::T1 ? "T1" : "T2"; }

const char* to_string(Policy p) {
  return p == Policy::FixedTheta ? "fixed-theta" : "coupled-schedule";
}

const char* to_string(ThetaVariant v) { return v == ThetaVariant::Truncated ? "truncated" : "full"; }

}  // namespace waring::bounds
