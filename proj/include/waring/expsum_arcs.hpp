#pragma once

// Exponential sums over k-th powers, the major/minor arc dissection of the
// unit interval, and moments of products of such sums.
//
// Moments over the full period are computed exactly: a product of
// trigonometric polynomials whose frequencies span F integrates exactly on
// any uniform grid with more than F points, so counting moments come back as
// integers up to rounding. Arc-restricted moments are plain quadrature.

#include <complex>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "waring/common.hpp"
#include "waring/differences.hpp"
#include "waring/smooth_sets.hpp"

namespace waring::arcs {

enum class SumKind { Full, Smooth, PrimeSmooth, Difference, SinglePrime, Custom };

// A finite sum sum_f c_f e(f alpha) with integer frequencies f and positive
// integer multiplicities c_f.
class ExpSum {
 public:
  using Term = std::pair<std::int64_t, std::uint64_t>;

  // f(alpha) = sum_{x <= P} e(alpha x^k)
  static ExpSum full(std::int64_t P, int k);
  // g(alpha) = sum_{x in set} e(alpha x^k)
  static ExpSum smooth(const std::vector<std::int64_t>& set, int k);
  // h(alpha) = sum_{X/2 < p <= X} sum_{x in inner} e(alpha p^k x^k), X = floor(sqrt(P))
  static ExpSum prime_smooth(std::int64_t P, int k, const std::vector<std::int64_t>& inner);
  // f(alpha, p) = sum_{x in set} e(alpha p^k x^k)
  static ExpSum single_prime(const std::vector<std::int64_t>& set, std::int64_t p, int k);
  // F_i(alpha, q) as an explicit sum of e(q^k Psi_i alpha)
  static ExpSum difference(std::int64_t q, int k, const diff::LevelParams& params);
  static ExpSum from_frequencies(SumKind kind, std::string label, std::vector<std::int64_t> freqs);

  SumKind kind() const { return kind_; }
  const std::string& label() const { return label_; }
  const std::vector<Term>& terms() const { return terms_; }
  std::uint64_t term_count() const { return term_count_; }
  std::int64_t min_frequency() const { return terms_.empty() ? 0 : terms_.front().first; }
  std::int64_t max_frequency() const { return terms_.empty() ? 0 : terms_.back().first; }
  // Largest |f| occurring.
  std::int64_t max_abs_frequency() const;

  std::complex<double> eval(double alpha) const;

 private:
  SumKind kind_ = SumKind::Custom;
  std::string label_;
  std::vector<Term> terms_;
  std::uint64_t term_count_ = 0;
};

struct Factor {
  std::shared_ptr<const ExpSum> sum;
  int exponent = 1;
  bool conjugated = false;
};

enum class Region { Full, Major, MajorN, Minor, MinorN, MajorMinusN };

struct MomentSpec {
  std::vector<Factor> factors;
  Region region = Region::Full;
  std::optional<std::int64_t> target;  // multiplies by e(-N alpha)

  // |S|^{2s} as S^s conj(S)^s.
  static MomentSpec abs_power(std::shared_ptr<const ExpSum> sum, int two_s);
  // |S|^m for any m; only meaningful for quadrature (odd m is not a polynomial).
  static MomentSpec modulus_power(std::shared_ptr<const ExpSum> sum, int m);

  // Frequency range of the product as a trigonometric polynomial.
  std::pair<std::int64_t, std::int64_t> frequency_range() const;
};

struct ExactMoment {
  double value = 0;        // real part of the integral over [0, 1)
  double imag = 0;         // imaginary residue (zero for real moments)
  std::uint64_t grid = 0;  // grid size M
  double seconds = 0;
};

struct GridBudget {
  double grid_ops = 4e9;  // M * sum of term counts
  unsigned threads = 0;
};

ExactMoment exact_moment(const MomentSpec& m, const GridBudget& budget = {});
// Smallest uniform grid size that integrates the product exactly.
std::uint64_t exact_grid_size(const MomentSpec& m);

struct Interval {
  double lo = 0;
  double hi = 0;
  double length() const { return hi - lo; }
};

struct Arc {
  std::int64_t q = 0;
  std::int64_t a = 0;
  double center = 0;
  double halfwidth = 0;
};

enum class ArcFamily { M, N };

class ArcDissection {
 public:
  // W defaults to sqrt(P). Requires k >= 2, P >= 1, 1 <= W <= P.
  ArcDissection(double P, int k, std::optional<double> W = std::nullopt);

  double P() const { return P_; }
  int k() const { return k_; }
  double tau() const { return tau_; }
  double W() const { return W_; }
  std::int64_t Q(ArcFamily f) const;
  double halfwidth(std::int64_t q, ArcFamily f) const;
  Interval interval() const { return {1.0 / tau_, 1.0 + 1.0 / tau_}; }

  std::vector<Arc> arcs(ArcFamily f) const;
  // Arcs clipped to the base interval, sorted, overlaps merged.
  std::vector<Interval> merged(ArcFamily f) const;
  std::vector<Interval> region(Region r) const;

 private:
  double P_;
  int k_;
  double tau_;
  double W_;
};

struct Major {
  std::int64_t q = 0;
  std::int64_t a = 0;
};
struct Minor {};
using Classification = std::variant<Major, Minor>;

// alpha must lie in the base interval [1/tau, 1 + 1/tau].
Classification classify(double alpha, const ArcDissection& d, ArcFamily f);

double total_length(const std::vector<Interval>& iv);
std::vector<Interval> subtract(const std::vector<Interval>& from, const std::vector<Interval>& remove);

struct ArcMoment {
  double value = 0;
  double err_est = 0;
  std::uint64_t samples = 0;
  std::size_t intervals = 0;
  double seconds = 0;
};

// Composite midpoint rule of |product| (times e(-N alpha) if targeted, then
// modulus) over the region's intervals.
ArcMoment arc_moment(const MomentSpec& m, const ArcDissection& d, int samples_per_arc = 16);

struct SamplingPolicy {
  int count = 512;
  std::uint64_t seed = 0;
  std::vector<double> forced;  // extra candidates, classified like the rest
};

struct WeylResult {
  double max_ratio = 0;
  double argmax_alpha = 0;
  int kept = 0;
  int rejected = 0;
};

// max over sampled minor-arc alpha of |f(alpha)| / P^{1 - 1/2^{k-1}}
WeylResult weyl_ratio(std::int64_t P, int k, const SamplingPolicy& policy = {});

// Measured d log I / d log W slope of the N-arc moment over a grid of W values.
double measured_w_exponent(const MomentSpec& m, double P, int k, const std::vector<double>& Ws,
                           int samples_per_arc = 16);

std::string to_string(Region r);

}  // namespace waring::arcs
