#include "waring/expsum_arcs.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <numeric>
#include <sstream>
#include <thread>

#include "waring/phase.hpp"

namespace waring::arcs {

namespace {

// Neumaier compensated accumulator.
struct CompensatedSum {
  double sum = 0;
  double comp = 0;
  void add(double x) {
    const double t = sum + x;
    if (std::fabs(sum) >= std::fabs(x)) {
      comp += (sum - t) + x;
    } else {
      comp += (x - t) + sum;
    }
    sum = t;
  }
  double value() const { return sum + comp; }
};

std::vector<ExpSum::Term> collect(std::vector<std::int64_t> freqs) {
  std::sort(freqs.begin(), freqs.end());
  std::vector<ExpSum::Term> out;
  for (const auto f : freqs) {
    if (!out.empty() && out.back().first == f) {
      ++out.back().second;
    } else {
      out.emplace_back(f, 1);
    }
  }
  return out;
}

std::int64_t isqrt(std::int64_t n) {
  auto r = static_cast<std::int64_t>(std::sqrt(static_cast<double>(n)));
  while (r * r > n) --r;
  while ((r + 1) * (r + 1) <= n) ++r;
  return r;
}

unsigned resolve_threads(unsigned requested) {
  if (requested != 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

std::uint64_t mod_nonneg(std::int64_t f, std::uint64_t M) {
  const i128 r = static_cast<i128>(f) % static_cast<i128>(M);
  return static_cast<std::uint64_t>(r < 0 ? r + static_cast<i128>(M) : r);
}

std::complex<double> ipow(std::complex<double> z, int e) {
  std::complex<double> r{1.0, 0.0};
  while (e > 0) {
    if (e & 1) r *= z;
    z *= z;
    e >>= 1;
  }
  return r;
}

double integrand_modulus(const MomentSpec& m, double alpha) {
  double v = 1.0;
  for (const auto& f : m.factors) v *= std::pow(std::abs(f.sum->eval(alpha)), f.exponent);
  return v;
}

}  // namespace

// ---------------------------------------------------------------- ExpSum

ExpSum ExpSum::from_frequencies(SumKind kind, std::string label, std::vector<std::int64_t> freqs) {
  ExpSum s;
  s.kind_ = kind;
  s.label_ = std::move(label);
  s.term_count_ = freqs.size();
  s.terms_ = collect(std::move(freqs));
  return s;
}

ExpSum ExpSum::full(std::int64_t P, int k) {
  if (P < 1 || k < 1) throw DomainError("ExpSum::full: need P >= 1 and k >= 1");
  std::vector<std::int64_t> f;
  for (std::int64_t x = 1; x <= P; ++x) f.push_back(detail::checked_pow(x, k, "x^k"));
  return from_frequencies(SumKind::Full, "full(P=" + std::to_string(P) + ",k=" + std::to_string(k) + ")",
                          std::move(f));
}

ExpSum ExpSum::smooth(const std::vector<std::int64_t>& set, int k) {
  std::vector<std::int64_t> xs = set;
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  std::vector<std::int64_t> f;
  for (const auto x : xs) f.push_back(detail::checked_pow(x, k, "x^k"));
  return from_frequencies(SumKind::Smooth, "smooth(|E|=" + std::to_string(set.size()) + ",k=" + std::to_string(k) + ")",
                          std::move(f));
}

ExpSum ExpSum::prime_smooth(std::int64_t P, int k, const std::vector<std::int64_t>& inner) {
  if (P < 4) throw DomainError("ExpSum::prime_smooth: P too small for a prime window");
  const std::int64_t X = isqrt(P);
  const std::int64_t lo = X / 2 + 1;  // (X/2, X]
  const auto window = smooth::primes_in(std::max<std::int64_t>(2, lo), X);
  std::vector<std::int64_t> f;
  for (const auto p : window.primes) {
    const std::int64_t pk = detail::checked_pow(p, k, "p^k");
    for (const auto x : inner) f.push_back(detail::checked_mul(pk, detail::checked_pow(x, k, "x^k"), "p^k x^k"));
  }
  return from_frequencies(SumKind::PrimeSmooth,
                          "prime_smooth(P=" + std::to_string(P) + ",k=" + std::to_string(k) +
                              ",Z=" + std::to_string(window.Z()) + ")",
                          std::move(f));
}

ExpSum ExpSum::single_prime(const std::vector<std::int64_t>& set, std::int64_t p, int k) {
  const std::int64_t pk = detail::checked_pow(p, k, "p^k");
  std::vector<std::int64_t> f;
  for (const auto x : set) f.push_back(detail::checked_mul(pk, detail::checked_pow(x, k, "x^k"), "p^k x^k"));
  return from_frequencies(SumKind::SinglePrime, "single_prime(p=" + std::to_string(p) + ",k=" + std::to_string(k) + ")",
                          std::move(f));
}

ExpSum ExpSum::difference(std::int64_t q, int k, const diff::LevelParams& params) {
  return from_frequencies(SumKind::Difference,
                          "difference(q=" + std::to_string(q) + ",i=" + std::to_string(params.H.size()) + ")",
                          diff::f_i_frequencies(q, k, params));
}

std::int64_t ExpSum::max_abs_frequency() const {
  if (terms_.empty()) return 0;
  return std::max(std::llabs(terms_.front().first), std::llabs(terms_.back().first));
}

std::complex<double> ExpSum::eval(double alpha) const {
  const DyadicAngle angle(alpha);
  std::complex<double> acc{0.0, 0.0};
  for (const auto& [f, c] : terms_) acc += static_cast<double>(c) * unit(angle.frac_of(f));
  return acc;
}

// ---------------------------------------------------------------- moments

MomentSpec MomentSpec::abs_power(std::shared_ptr<const ExpSum> sum, int two_s) {
  if (two_s < 2 || two_s % 2 != 0) throw DomainError("abs_power: exponent must be even and >= 2");
  MomentSpec m;
  m.factors.push_back({sum, two_s / 2, false});
  m.factors.push_back({std::move(sum), two_s / 2, true});
  return m;
}

MomentSpec MomentSpec::modulus_power(std::shared_ptr<const ExpSum> sum, int power) {
  if (power < 1) throw DomainError("modulus_power: exponent must be positive");
  MomentSpec m;
  m.factors.push_back({std::move(sum), power, false});
  return m;
}

std::pair<std::int64_t, std::int64_t> MomentSpec::frequency_range() const {
  std::int64_t lo = 0;
  std::int64_t hi = 0;
  for (const auto& f : factors) {
    if (f.exponent < 1) throw DomainError("MomentSpec: exponents must be positive integers");
    std::int64_t flo = f.sum->min_frequency();
    std::int64_t fhi = f.sum->max_frequency();
    if (f.conjugated) {
      std::swap(flo, fhi);
      flo = -flo;
      fhi = -fhi;
    }
    lo = detail::checked_add(lo, detail::checked_mul(flo, f.exponent, "frequency span"), "frequency span");
    hi = detail::checked_add(hi, detail::checked_mul(fhi, f.exponent, "frequency span"), "frequency span");
  }
  if (target) {
    lo = detail::checked_add(lo, -*target, "frequency span");
    hi = detail::checked_add(hi, -*target, "frequency span");
  }
  return {lo, hi};
}

std::uint64_t exact_grid_size(const MomentSpec& m) {
  const auto [lo, hi] = m.frequency_range();
  // M > hi - lo keeps distinct frequencies distinct mod M; M > |lo|, |hi| keeps
  // every nonzero frequency off the multiples of M.
  const auto span = static_cast<std::uint64_t>(static_cast<i128>(hi) - lo);
  const std::uint64_t reach = std::max<std::uint64_t>(std::llabs(lo), std::llabs(hi));
  return std::max(span, reach) + 1;
}

ExactMoment exact_moment(const MomentSpec& m, const GridBudget& budget) {
  if (m.region != Region::Full) throw DomainError("exact_moment: only the full region is exact");
  if (m.factors.empty()) throw DomainError("exact_moment: no factors");
  const auto start = std::chrono::steady_clock::now();
  const std::uint64_t M = exact_grid_size(m);
  double terms = 0;
  for (const auto& f : m.factors) terms += static_cast<double>(f.sum->terms().size());
  if (static_cast<double>(M) * terms > budget.grid_ops) {
    std::ostringstream os;
    os << "exact_moment: grid " << M << " x " << terms << " terms exceeds budget " << budget.grid_ops;
    throw BudgetError(os.str());
  }

  constexpr std::uint64_t kTableLimit = 1ULL << 24;
  std::vector<std::complex<double>> roots;
  if (M <= kTableLimit) {
    roots.resize(M);
    for (std::uint64_t r = 0; r < M; ++r)
      roots[r] = unit(static_cast<double>(static_cast<long double>(r) / static_cast<long double>(M)));
  }
  const auto root = [&](std::uint64_t r) {
    return roots.empty() ? unit(static_cast<double>(static_cast<long double>(r) / static_cast<long double>(M)))
                         : roots[r];
  };

  // Frequencies reduced mod M, per factor.
  struct Reduced {
    std::vector<std::uint64_t> freq;
    std::vector<double> mult;
  };
  std::vector<Reduced> reduced;
  for (const auto& f : m.factors) {
    Reduced r;
    for (const auto& [freq, c] : f.sum->terms()) {
      r.freq.push_back(mod_nonneg(freq, M));
      r.mult.push_back(static_cast<double>(c));
    }
    reduced.push_back(std::move(r));
  }
  const std::uint64_t target_step = m.target ? mod_nonneg(-*m.target, M) : 0;

  // Fixed chunking: the reduction order does not depend on the thread count.
  constexpr std::uint64_t kChunk = 1024;
  const std::uint64_t chunks = (M + kChunk - 1) / kChunk;
  std::vector<std::pair<double, double>> partial(chunks);

  const auto run_chunk = [&](std::uint64_t c) {
    const std::uint64_t j0 = c * kChunk;
    const std::uint64_t j1 = std::min(M, j0 + kChunk);
    std::vector<std::vector<std::uint64_t>> idx(reduced.size());
    for (std::size_t fi = 0; fi < reduced.size(); ++fi) {
      idx[fi].resize(reduced[fi].freq.size());
      for (std::size_t t = 0; t < idx[fi].size(); ++t)
        idx[fi][t] = static_cast<std::uint64_t>(static_cast<u128>(reduced[fi].freq[t]) * j0 % M);
    }
    std::uint64_t tidx = static_cast<std::uint64_t>(static_cast<u128>(target_step) * j0 % M);
    CompensatedSum re;
    CompensatedSum im;
    for (std::uint64_t j = j0; j < j1; ++j) {
      std::complex<double> prod{1.0, 0.0};
      for (std::size_t fi = 0; fi < reduced.size(); ++fi) {
        std::complex<double> v{0.0, 0.0};
        auto& ix = idx[fi];
        const auto& rf = reduced[fi];
        for (std::size_t t = 0; t < ix.size(); ++t) {
          v += rf.mult[t] * root(ix[t]);
          ix[t] += rf.freq[t];
          if (ix[t] >= M) ix[t] -= M;
        }
        if (m.factors[fi].conjugated) v = std::conj(v);
        prod *= ipow(v, m.factors[fi].exponent);
      }
      if (m.target) {
        prod *= root(tidx);
        tidx += target_step;
        if (tidx >= M) tidx -= M;
      }
      re.add(prod.real());
      im.add(prod.imag());
    }
    partial[c] = {re.value(), im.value()};
  };

  const unsigned workers = std::min<std::uint64_t>(resolve_threads(budget.threads), chunks);
  if (workers <= 1) {
    for (std::uint64_t c = 0; c < chunks; ++c) run_chunk(c);
  } else {
    std::atomic<std::uint64_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (std::uint64_t c = next++; c < chunks; c = next++) run_chunk(c);
      });
    for (auto& t : pool) t.join();
  }

  CompensatedSum re;
  CompensatedSum im;
  for (const auto& [r, i] : partial) {
    re.add(r);
    im.add(i);
  }
  ExactMoment out;
  out.grid = M;
  out.value = re.value() / static_cast<double>(M);
  out.imag = im.value() / static_cast<double>(M);
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

// ---------------------------------------------------------------- arcs

ArcDissection::ArcDissection(double P, int k, std::optional<double> W) : P_(P), k_(k) {
  if (k < 2) throw DomainError("ArcDissection: k must be >= 2");
  if (!(P >= 1.0)) throw DomainError("ArcDissection: P must be >= 1");
  tau_ = 2.0 * k * std::pow(P, k - 1);
  W_ = W.value_or(std::sqrt(P));
  if (!(W_ >= 1.0 && W_ <= P)) throw DomainError("ArcDissection: need 1 <= W <= P");
}

std::int64_t ArcDissection::Q(ArcFamily f) const {
  return static_cast<std::int64_t>(std::floor(f == ArcFamily::M ? P_ : W_));
}

double ArcDissection::halfwidth(std::int64_t q, ArcFamily f) const {
  const double base = 1.0 / (static_cast<double>(q) * tau_);
  return f == ArcFamily::M ? base : base * W_ / P_;
}

std::vector<Arc> ArcDissection::arcs(ArcFamily f) const {
  std::vector<Arc> out;
  const std::int64_t Qmax = Q(f);
  for (std::int64_t q = 1; q <= Qmax; ++q)
    for (std::int64_t a = 1; a <= q; ++a)
      if (std::gcd(a, q) == 1)
        out.push_back({q, a, static_cast<double>(a) / static_cast<double>(q), halfwidth(q, f)});
  return out;
}

std::vector<Interval> ArcDissection::merged(ArcFamily f) const {
  const Interval base = interval();
  std::vector<Interval> iv;
  for (const auto& arc : arcs(f)) {
    const double lo = std::max(base.lo, arc.center - arc.halfwidth);
    const double hi = std::min(base.hi, arc.center + arc.halfwidth);
    if (hi > lo) iv.push_back({lo, hi});
  }
  std::sort(iv.begin(), iv.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  std::vector<Interval> out;
  for (const auto& i : iv) {
    if (!out.empty() && i.lo <= out.back().hi) {
      out.back().hi = std::max(out.back().hi, i.hi);
    } else {
      out.push_back(i);
    }
  }
  return out;
}

std::vector<Interval> ArcDissection::region(Region r) const {
  const std::vector<Interval> whole{interval()};
  switch (r) {
    case Region::Full:
      return whole;
    case Region::Major:
      return merged(ArcFamily::M);
    case Region::MajorN:
      return merged(ArcFamily::N);
    case Region::Minor:
      return subtract(whole, merged(ArcFamily::M));
    case Region::MinorN:
      return subtract(whole, merged(ArcFamily::N));
    case Region::MajorMinusN:
      return subtract(merged(ArcFamily::M), merged(ArcFamily::N));
  }
  return {};
}

double total_length(const std::vector<Interval>& iv) {
  CompensatedSum s;
  for (const auto& i : iv) s.add(i.length());
  return s.value();
}

std::vector<Interval> subtract(const std::vector<Interval>& from, const std::vector<Interval>& remove) {
  std::vector<Interval> out;
  for (const auto& f : from) {
    double cursor = f.lo;
    for (const auto& r : remove) {
      if (r.hi <= cursor || r.lo >= f.hi) continue;
      if (r.lo > cursor) out.push_back({cursor, r.lo});
      cursor = std::max(cursor, r.hi);
      if (cursor >= f.hi) break;
    }
    if (cursor < f.hi) out.push_back({cursor, f.hi});
  }
  return out;
}

Classification classify(double alpha, const ArcDissection& d, ArcFamily f) {
  const Interval base = d.interval();
  if (!(alpha >= base.lo && alpha <= base.hi)) throw DomainError("classify: alpha outside [1/tau, 1 + 1/tau]");

  // alpha = num / den exactly.
  int exp2 = 0;
  const double frac = std::frexp(alpha, &exp2);
  BigInt num = static_cast<std::int64_t>(std::ldexp(frac, 53));
  BigInt den = 1;
  const int e = 53 - exp2;
  if (e > 0) {
    den <<= e;
  } else {
    num <<= -e;
  }
  const BigInt alpha_num = num;
  const BigInt alpha_den = den;

  const std::int64_t Qmax = d.Q(f);
  // Any covering a/q has |alpha - a/q| < 1/(2 q^2), so it is a convergent.
  BigInt h_prev = 1, h_prev2 = 0, k_prev = 0, k_prev2 = 1;
  while (den != 0) {
    const BigInt a_n = num / den;
    const BigInt h = a_n * h_prev + h_prev2;
    const BigInt q = a_n * k_prev + k_prev2;
    if (q > Qmax) break;
    const auto qi = q.convert_to<std::int64_t>();
    if (qi >= 1 && h >= 1 && h <= q) {
      const BigInt dist_num = boost::multiprecision::abs(alpha_num * q - h * alpha_den);
      const long double dist =
          dist_num.convert_to<long double>() / alpha_den.convert_to<long double>() / static_cast<long double>(qi);
      if (dist <= static_cast<long double>(d.halfwidth(qi, f))) return Major{qi, h.convert_to<std::int64_t>()};
    }
    h_prev2 = h_prev;
    h_prev = h;
    k_prev2 = k_prev;
    k_prev = q;
    const BigInt rem = num - a_n * den;
    num = den;
    den = rem;
  }
  return Minor{};
}

ArcMoment arc_moment(const MomentSpec& m, const ArcDissection& d, int samples_per_arc) {
  if (samples_per_arc < 16) throw DomainError("arc_moment: samples_per_arc must be >= 16");
  if (m.factors.empty()) throw DomainError("arc_moment: no factors");
  const auto start = std::chrono::steady_clock::now();
  const auto intervals = d.region(m.region);

  // Oscillation scale of the integrand: total frequency spread of all factors.
  double spread = 0;
  for (const auto& f : m.factors)
    spread += static_cast<double>(f.exponent) *
              static_cast<double>(f.sum->max_frequency() - f.sum->min_frequency());
  spread = std::max(spread, 1.0);

  ArcMoment out;
  out.intervals = intervals.size();
  CompensatedSum fine_total;
  CompensatedSum coarse_total;
  for (const auto& iv : intervals) {
    const double len = iv.length();
    if (len <= 0) continue;
    auto n = static_cast<std::uint64_t>(std::ceil(8.0 * len * spread));
    n = std::max<std::uint64_t>(n, static_cast<std::uint64_t>(samples_per_arc));
    n += n % 2;  // even, so the halved rule is well defined
    CompensatedSum fine;
    CompensatedSum coarse;
    const double hf = len / static_cast<double>(n);
    for (std::uint64_t j = 0; j < n; ++j) fine.add(integrand_modulus(m, iv.lo + (static_cast<double>(j) + 0.5) * hf));
    const double hc = 2.0 * hf;
    for (std::uint64_t j = 0; j < n / 2; ++j)
      coarse.add(integrand_modulus(m, iv.lo + (static_cast<double>(j) + 0.5) * hc));
    fine_total.add(fine.value() * hf);
    coarse_total.add(coarse.value() * hc);
    out.samples += n + n / 2;
  }
  out.value = fine_total.value();
  out.err_est = std::fabs(fine_total.value() - coarse_total.value());
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

WeylResult weyl_ratio(std::int64_t P, int k, const SamplingPolicy& policy) {
  if (P < 1 || k < 2) throw DomainError("weyl_ratio: need P >= 1 and k >= 2");
  if (policy.count < 0) throw DomainError("weyl_ratio: negative sample count");
  const ArcDissection d(static_cast<double>(P), k);
  const ExpSum f = ExpSum::full(P, k);
  const double scale = std::pow(static_cast<double>(P), 1.0 - std::ldexp(1.0, -(k - 1)));
  const double base = 1.0 / d.tau();

  // Kronecker sequence with the golden-ratio step, offset by the seed.
  const double golden = 0.6180339887498948482;
  const double offset = std::fmod(static_cast<double>(policy.seed) * 0.4142135623730950488, 1.0);
  std::vector<double> candidates;
  for (int j = 0; j < policy.count; ++j) {
    const double u = std::fmod(offset + (j + 1) * golden, 1.0);
    candidates.push_back(base + u);
  }
  for (const double a : policy.forced) candidates.push_back(a - std::floor(a - base));

  WeylResult r;
  bool any = false;
  for (const double a : candidates) {
    if (std::holds_alternative<Major>(classify(a, d, ArcFamily::M))) {
      ++r.rejected;
      continue;
    }
    ++r.kept;
    const double ratio = std::abs(f.eval(a)) / scale;
    if (!any || ratio > r.max_ratio) {
      r.max_ratio = ratio;
      r.argmax_alpha = a;
      any = true;
    }
  }
  if (!any) throw ComputeError("weyl_ratio: no sampled point lies on the minor arcs");
  return r;
}

double measured_w_exponent(const MomentSpec& m, double P, int k, const std::vector<double>& Ws, int samples_per_arc) {
  if (Ws.size() < 2) throw DomainError("measured_w_exponent: need at least two W values");
  std::vector<double> xs;
  std::vector<double> ys;
  for (const double W : Ws) {
    const ArcDissection d(P, k, W);
    const double I = arc_moment(m, d, samples_per_arc).value;
    if (!(I > 0)) throw ComputeError("measured_w_exponent: nonpositive moment");
    xs.push_back(std::log(W));
    ys.push_back(std::log(I));
  }
  const double n = static_cast<double>(xs.size());
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  double sxx = 0;
  double sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  if (sxx == 0) throw DomainError("measured_w_exponent: W values must be distinct");
  return sxy / sxx;
}

std::string to_string(Region r) {
  switch (r) {
    case Region::Full:
      return "full";
    case Region::Major:
      return "major";
    case Region::MajorN:
      return "major_N";
    case Region::Minor:
      return "minor";
    case Region::MinorN:
      return "minor_N";
    case Region::MajorMinusN:
      return "major_minus_N";
  }
  return "?";
}

}  // namespace waring::arcs
