#include "waring/differences.hpp"

#include <cmath>
#include <sstream>

#include "waring/phase.hpp"

namespace waring::diff {

namespace {

u128 wrap128(const BigInt& v) {
  const BigInt mag = v < 0 ? BigInt(-v) : v;
  const BigInt mask64 = (BigInt(1) << 64) - 1;
  const BigInt low = mag & ((BigInt(1) << 128) - 1);
  u128 w = static_cast<u128>(static_cast<std::uint64_t>(low >> 64)) << 64 |
           static_cast<std::uint64_t>(low & mask64);
  return v < 0 ? ~w + 1 : w;
}

BigInt binomial(int n, int r) {
  BigInt out = 1;
  for (int j = 1; j <= r; ++j) out = out * (n - r + j) / j;
  return out;
}

// Odometer over the (h, p) index space of a LevelParams.
template <class Visit>
void for_each_step_choice(const LevelParams& params, Visit&& visit) {
  const std::size_t levels = params.H.size();
  std::vector<std::int64_t> h(levels, 1);
  std::vector<std::size_t> pi(levels, 0);
  std::vector<std::int64_t> p(levels);
  while (true) {
    for (std::size_t j = 0; j < levels; ++j) p[j] = params.windows[j].primes[pi[j]];
    visit(h, p);
    std::size_t j = 0;
    for (; j < levels; ++j) {
      if (++pi[j] < params.windows[j].primes.size()) break;
      pi[j] = 0;
      if (++h[j] <= params.H[j]) break;
      h[j] = 1;
    }
    if (j == levels) return;
  }
}

void validate_levels(int k, const LevelParams& params, double term_budget) {
  if (params.H.empty()) throw DomainError("f_i_sum: need at least one level");
  if (params.H.size() != params.windows.size()) throw DomainError("f_i_sum: H and windows lengths differ");
  if (static_cast<int>(params.H.size()) > k) throw DomainError("f_i_sum: more levels than k");
  if (params.x_range < 1) throw DomainError("f_i_sum: empty x range");
  for (std::size_t j = 0; j < params.H.size(); ++j) {
    if (params.H[j] < 1) throw DomainError("f_i_sum: empty h range at level " + std::to_string(j + 1));
    if (params.windows[j].primes.empty())
      throw DomainError("f_i_sum: empty prime window at level " + std::to_string(j + 1));
  }
  const double terms = f_i_terms(params);
  if (terms > term_budget) {
    std::ostringstream os;
    os << "f_i_sum: " << terms << " terms exceed budget " << term_budget;
    throw BudgetError(os.str());
  }
}

}  // namespace

IntPolynomial::IntPolynomial(std::vector<BigInt> ascending) : coeffs_(std::move(ascending)) { trim(); }

IntPolynomial IntPolynomial::monomial(int degree, BigInt coeff) {
  if (degree < 0) throw DomainError("monomial: negative degree");
  std::vector<BigInt> c(static_cast<std::size_t>(degree) + 1, BigInt(0));
  c.back() = std::move(coeff);
  return IntPolynomial(std::move(c));
}

void IntPolynomial::trim() {
  while (!coeffs_.empty() && coeffs_.back() == 0) coeffs_.pop_back();
}

BigInt IntPolynomial::coeff(int i) const {
  if (i < 0 || i > degree()) return 0;
  return coeffs_[static_cast<std::size_t>(i)];
}

BigInt IntPolynomial::operator()(const BigInt& x) const {
  BigInt acc = 0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * x + *it;
  return acc;
}

IntPolynomial IntPolynomial::shifted(const BigInt& t) const {
  const int d = degree();
  std::vector<BigInt> out(coeffs_.size(), BigInt(0));
  for (int i = 0; i <= d; ++i) {
    if (coeffs_[i] == 0) continue;
    BigInt tpow = 1;
    for (int j = i; j >= 0; --j) {
      out[j] += coeffs_[i] * binomial(i, j) * tpow;
      tpow *= t;
    }
  }
  return IntPolynomial(std::move(out));
}

IntPolynomial IntPolynomial::scaled(const BigInt& c) const {
  std::vector<BigInt> out = coeffs_;
  for (auto& v : out) v *= c;
  return IntPolynomial(std::move(out));
}

std::string IntPolynomial::to_string() const {
  if (is_zero()) return "0";
  std::ostringstream os;
  for (std::size_t i = 0; i < coeffs_.size(); ++i) os << (i ? " " : "") << coeffs_[i];
  return os.str();
}

IntPolynomial operator-(const IntPolynomial& a, const IntPolynomial& b) {
  std::vector<BigInt> out(std::max(a.coeffs_.size(), b.coeffs_.size()), BigInt(0));
  for (std::size_t i = 0; i < a.coeffs_.size(); ++i) out[i] += a.coeffs_[i];
  for (std::size_t i = 0; i < b.coeffs_.size(); ++i) out[i] -= b.coeffs_[i];
  return IntPolynomial(std::move(out));
}

IntPolynomial forward_diff(const IntPolynomial& phi, const BigInt& t) { return phi.shifted(t) - phi; }

IntPolynomial modified_diff(const IntPolynomial& phi, const BigInt& h, const BigInt& m) {
  if (m < 1 || h < 1) throw DomainError("modified_diff: need h >= 1 and m >= 1");
  std::vector<BigInt> c = forward_diff(phi, h * m).coeffs();
  for (auto& v : c) {
    if (v % m != 0) throw ComputeError("modified_diff: coefficient " + v.str() + " not divisible by " + m.str());
    v /= m;
  }
  return IntPolynomial(std::move(c));
}

DiffChain psi(int k, const std::vector<std::int64_t>& h, const std::vector<std::int64_t>& p) {
  if (k < 1) throw DomainError("psi: k must be positive");
  if (h.size() != p.size()) throw DomainError("psi: h and p lengths differ");
  if (static_cast<int>(h.size()) > k) throw DomainError("psi: more steps than k");
  DiffChain chain;
  chain.k = k;
  chain.h = h;
  chain.p = p;
  IntPolynomial cur = IntPolynomial::monomial(k);
  BigInt expected_lead = 1;
  for (std::size_t j = 0; j < h.size(); ++j) {
    if (p[j] < 2) throw DomainError("psi: p entries must be prime");
    BigInt m = boost::multiprecision::pow(BigInt(p[j]), static_cast<unsigned>(k));
    cur = modified_diff(cur, h[j], m);
    chain.moduli.push_back(std::move(m));
    expected_lead *= BigInt(k - static_cast<int>(j)) * h[j];
  }
  const int i = static_cast<int>(h.size());
  if (cur.degree() != k - i || cur.leading() != expected_lead)
    throw ComputeError("psi: degree or leading-coefficient law violated");
  chain.result = std::move(cur);
  return chain;
}

double f_i_terms(const LevelParams& params) {
  double terms = static_cast<double>(params.x_range);
  for (std::size_t j = 0; j < params.H.size(); ++j)
    terms *= static_cast<double>(params.H[j]) * static_cast<double>(params.windows[j].primes.size());
  return terms;
}

std::complex<double> f_i_sum(double alpha, std::int64_t q, int k, const LevelParams& params, double term_budget) {
  validate_levels(k, params, term_budget);
  const DyadicAngle angle(alpha);
  const BigInt qk = boost::multiprecision::pow(BigInt(q), static_cast<unsigned>(k));
  std::complex<double> total{0.0, 0.0};
  for_each_step_choice(params, [&](const std::vector<std::int64_t>& h, const std::vector<std::int64_t>& p) {
    const IntPolynomial g = psi(k, h, p).result.scaled(qk);
    std::complex<double> partial{0.0, 0.0};
    if (angle.wraps_exactly()) {
      std::vector<u128> c;
      for (const auto& v : g.coeffs()) c.push_back(wrap128(v));
      for (std::int64_t x = 1; x <= params.x_range; ++x) {
        u128 acc = 0;
        const u128 xx = static_cast<u128>(x);
        for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * xx + *it;
        partial += unit(angle.frac_of_wrapped(acc));
      }
    } else {
      for (std::int64_t x = 1; x <= params.x_range; ++x) partial += unit(angle.frac_of(g(BigInt(x))));
    }
    total += partial;
  });
  return total;
}

std::vector<std::int64_t> f_i_frequencies(std::int64_t q, int k, const LevelParams& params, double term_budget) {
  validate_levels(k, params, term_budget);
  const BigInt qk = boost::multiprecision::pow(BigInt(q), static_cast<unsigned>(k));
  const BigInt lim = BigInt(std::numeric_limits<std::int64_t>::max());
  std::vector<std::int64_t> out;
  for_each_step_choice(params, [&](const std::vector<std::int64_t>& h, const std::vector<std::int64_t>& p) {
    const IntPolynomial g = psi(k, h, p).result.scaled(qk);
    for (std::int64_t x = 1; x <= params.x_range; ++x) {
      const BigInt v = g(BigInt(x));
      if (v > lim || v < -lim) throw OverflowError("f_i_frequencies: frequency exceeds 64 bits");
      out.push_back(v.convert_to<std::int64_t>());
    }
  });
  return out;
}

double Geometry::log_H_tilde(int i) const {
  double acc = 0;
  for (int j = 1; j <= i; ++j) acc += std::log(H[j]);
  return acc;
}

double Geometry::log_Z_tilde(int i) const {
  double acc = 0;
  for (int j = 1; j <= i; ++j) acc += std::log(Z[j]);
  return acc;
}

Geometry geometry_from_thetas(int k, double P, const std::vector<double>& thetas) {
  if (static_cast<int>(thetas.size()) != k) throw DomainError("geometry: need k thetas");
  if (!(P > 1.0)) throw DomainError("geometry: P must exceed 1");
  Geometry g;
  g.k = k;
  g.P = P;
  g.Z.assign(static_cast<std::size_t>(k) + 1, 1.0);
  g.H.assign(static_cast<std::size_t>(k) + 1, 1.0);
  g.P_levels.assign(static_cast<std::size_t>(k) + 1, P);
  for (int j = 1; j <= k; ++j) {
    g.Z[j] = std::pow(P, thetas[j - 1]);
    g.H[j] = P / std::pow(g.Z[j], k);
    g.P_levels[j] = g.P_levels[j - 1] / g.Z[j];
  }
  return g;
}

Geometry geometry_from_schedule(const bounds::ThetaSchedule& schedule, double P) {
  return geometry_from_thetas(schedule.k, P, schedule.thetas);
}

CountsInput model_counts(const Geometry& g, double lambda_prev) {
  CountsInput c;
  c.source = CountSource::Model;
  for (const double Pj : g.P_levels) c.log_S.push_back(lambda_prev * std::log(Pj));
  return c;
}

namespace {

double log_U(int i, int s, const CountsInput& c, const Geometry& g) {
  const double lP = std::log(g.P);
  const double lZ = std::log(g.Z[i + 1]);
  const double ht = g.log_H_tilde(i) + g.log_Z_tilde(i);
  return 0.5 * c.log_S[i] + 0.5 * (2 * s - 3) * lZ + 0.5 * (lP + 2.0 * ht + lZ + c.log_S[i + 1]);
}

}  // namespace

Lemma7Terms lemma7_terms(int i, int s, const CountsInput& counts, const Geometry& g) {
  const int k = g.k;
  if (i < 0 || i >= k) throw DomainError("lemma7_terms: need 0 <= i < k");
  if (s < 2) throw DomainError("lemma7_terms: s must be >= 2");
  if (static_cast<int>(counts.log_S.size()) != k + 1)
    throw DomainError("lemma7_terms: missing S_{s-1}(P_j) input (need k+1 values)");

  const double lP = std::log(g.P);
  const double lZ = std::log(g.Z[i + 1]);
  const double ht = g.log_H_tilde(i) + g.log_Z_tilde(i);
  const double lJ = i + 1 < k ? log_U(i + 1, s, counts, g)
                              : g.log_H_tilde(k) + g.log_Z_tilde(k) + lP + counts.log_S[k];

  Lemma7Terms t;
  t.i = i;
  t.source = counts.source;
  t.log_U = log_U(i, s, counts, g);
  t.log_V = 0.5 * counts.log_S[i] + 0.5 * (2 * s - 3) * lZ + 0.5 * (ht + lJ);
  t.U = std::exp(t.log_U);
  t.V = std::exp(t.log_V);
  t.residual = std::fabs(t.log_U - t.log_V);
  t.S_i = std::exp(counts.log_S[i]);
  t.S_next = std::exp(counts.log_S[i + 1]);
  t.Z_next = g.Z[i + 1];
  t.H_tilde = std::exp(g.log_H_tilde(i));
  t.Z_tilde = std::exp(g.log_Z_tilde(i));
  t.P = g.P;
  return t;
}

}  // namespace waring::diff
