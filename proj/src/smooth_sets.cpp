#include "waring/smooth_sets.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

namespace waring::smooth {

namespace {

std::vector<std::int64_t> small_primes_upto(std::int64_t n) {
  std::vector<std::int64_t> out;
  if (n < 2) return out;
  std::vector<bool> composite(static_cast<std::size_t>(n) + 1, false);
  for (std::int64_t i = 2; i <= n; ++i) {
    if (composite[i]) continue;
    out.push_back(i);
    for (std::int64_t j = i * i; j <= n; j += i) composite[j] = true;
  }
  return out;
}

std::int64_t isqrt(std::int64_t n) {
  auto r = static_cast<std::int64_t>(std::sqrt(static_cast<double>(n)));
  while (r * r > n) --r;
  while ((r + 1) * (r + 1) <= n) ++r;
  return r;
}

void sort_unique(std::vector<Element>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

std::string fmt_real(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

}  // namespace

bool PrimeWindow::contains(std::int64_t p) const {
  return std::binary_search(primes.begin(), primes.end(), p);
}

PrimeWindow primes_in(std::int64_t lo, std::int64_t hi) {
  if (hi < lo) throw DomainError("primes_in: hi < lo");
  if (lo < 2 || hi > 1'000'000'000) throw DomainError("primes_in: need 2 <= lo and hi <= 1e9");
  PrimeWindow w;
  w.lo = lo;
  w.hi = hi;
  const auto base = small_primes_upto(isqrt(hi));
  constexpr std::int64_t kSegment = 1 << 18;
  std::vector<char> mark;
  for (std::int64_t seg = lo; seg <= hi; seg += kSegment) {
    const std::int64_t seg_hi = std::min(hi, seg + kSegment - 1);
    mark.assign(static_cast<std::size_t>(seg_hi - seg + 1), 1);
    for (const std::int64_t p : base) {
      if (p * p > seg_hi) break;
      std::int64_t start = std::max(p * p, (seg + p - 1) / p * p);
      for (std::int64_t m = start; m <= seg_hi; m += p) mark[m - seg] = 0;
    }
    for (std::int64_t n = seg; n <= seg_hi; ++n)
      if (mark[n - seg]) w.primes.push_back(n);
  }
  return w;
}

PrimeWindow window_for(double Z) {
  const auto lo = std::max<std::int64_t>(2, static_cast<std::int64_t>(std::ceil(Z / 2.0)));
  const auto hi = static_cast<std::int64_t>(std::floor(Z));
  if (hi < lo) {
    PrimeWindow w;
    w.lo = lo;
    w.hi = hi;
    return w;
  }
  return primes_in(lo, hi);
}

std::string SmoothSpec::describe() const {
  if (const auto* s = std::get_if<SingleMode>(&mode))
    return "single(theta=" + fmt_real(s->theta) + ",levels=" + std::to_string(s->levels) + ")";
  const auto& m = std::get<MultiMode>(mode);
  return "multi(delta=" + fmt_real(m.thetas.delta_prev) + ")";
}

bool SmoothSet::contains(Element x) const {
  return std::binary_search(elements.begin(), elements.end(), x);
}

SmoothSet build_single(const std::vector<Element>& base, const PrimeWindow& window) {
  if (base.empty()) throw DomainError("build_single: empty base set");
  if (!std::is_sorted(base.begin(), base.end())) throw DomainError("build_single: base must be sorted");
  SmoothSet out;
  out.level = 1;
  out.windows.push_back(window);
  out.elements.reserve(base.size() * window.Z());
  for (const Element p : window.primes)
    for (const Element x : base) out.elements.push_back(detail::checked_mul(x, p, "build_single"));
  const auto raw = static_cast<std::int64_t>(out.elements.size());
  sort_unique(out.elements);
  out.collision_count = raw - static_cast<std::int64_t>(out.elements.size());
  return out;
}

SmoothSet build_single_levels(int k, double theta, double P, int levels) {
  if (k < 3) throw DomainError("build_single_levels: k must be >= 3");
  if (!(theta > 0.0 && theta <= 1.0)) throw DomainError("build_single_levels: theta out of (0,1]");
  if (levels < 0) throw DomainError("build_single_levels: negative level count");
  if (!(P >= 1.0)) throw DomainError("build_single_levels: P must be >= 1");

  // P_j = P_0^{(1+theta)^j} with P_levels = P.
  const double logP0 = std::log(P) / std::pow(1.0 + theta, levels);
  std::vector<PrimeWindow> windows;
  double midpoint_product = 1.0;
  for (int j = 0; j < levels; ++j) {
    const double logPj = logP0 * std::pow(1.0 + theta, j);
    PrimeWindow w = window_for(std::exp(theta * logPj));
    if (w.primes.empty())
      throw ComputeError("build_single_levels: empty prime window at layer " + std::to_string(j + 1) + " [" +
                         std::to_string(w.lo) + "," + std::to_string(w.hi) + "]");
    midpoint_product *= 0.5 * static_cast<double>(w.lo + w.hi);
    windows.push_back(std::move(w));
  }

  SmoothSpec spec;
  spec.k = k;
  spec.mode = SingleMode{theta, levels};
  spec.P_top = P;
  spec.base_floor = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::floor(P / midpoint_product)));
  spec.theta_at_limit = std::fabs(theta - 1.0 / k) < 1e-15;

  SmoothSet cur;
  cur.elements.resize(static_cast<std::size_t>(spec.base_floor));
  std::iota(cur.elements.begin(), cur.elements.end(), Element{1});
  std::int64_t collisions = 0;
  for (const auto& w : windows) {
    SmoothSet next = build_single(cur.elements, w);
    collisions += next.collision_count;
    cur.elements = std::move(next.elements);
  }
  cur.spec = spec;
  cur.level = levels;
  cur.windows = std::move(windows);
  cur.collision_count = collisions;
  return cur;
}

std::vector<SmoothSet> build_multilevel(const SmoothSpec& spec, double P) {
  const auto* multi = std::get_if<MultiMode>(&spec.mode);
  if (multi == nullptr) throw DomainError("build_multilevel: spec is not in multi mode");
  const int k = spec.k;
  if (static_cast<int>(multi->thetas.thetas.size()) != k)
    throw DomainError("build_multilevel: schedule length does not match k");
  if (!(P > 1.0)) throw DomainError("build_multilevel: P must exceed 1");

  // windows[i] is P_i for i = 1..k; P_{i} = P_{i-1} / Z_i.
  std::vector<PrimeWindow> windows(static_cast<std::size_t>(k) + 1);
  double Pi = P;
  for (int i = 1; i <= k; ++i) {
    const double Z = std::pow(P, multi->thetas.theta(i));
    windows[i] = window_for(Z);
    if (windows[i].primes.empty())
      throw ComputeError("build_multilevel: empty prime window at level " + std::to_string(i) + " [" +
                         std::to_string(windows[i].lo) + "," + std::to_string(windows[i].hi) + "]");
    Pi /= Z;
  }
  const auto floor_k = static_cast<std::int64_t>(std::floor(Pi));
  if (floor_k < 1) throw ComputeError("build_multilevel: innermost range P_k < 1 (P too small)");

  std::vector<SmoothSet> levels(static_cast<std::size_t>(k) + 1);
  SmoothSpec base_spec = spec;
  base_spec.P_top = P;
  base_spec.base_floor = floor_k;

  SmoothSet& inner = levels[k];
  inner.spec = base_spec;
  inner.level = k;
  inner.elements.resize(static_cast<std::size_t>(floor_k));
  std::iota(inner.elements.begin(), inner.elements.end(), Element{1});

  for (int i = k - 1; i >= 0; --i) {
    const SmoothSet& from = levels[i + 1];
    const PrimeWindow& w = windows[i + 1];
    SmoothSet& to = levels[i];
    to.spec = base_spec;
    to.level = i;
    to.windows = from.windows;
    to.windows.push_back(w);
    std::int64_t raw = 0;
    for (const Element p : w.primes) {
      for (const Element x : from.elements) {
        if (x % p == 0) continue;
        to.elements.push_back(detail::checked_mul(x, p, "build_multilevel"));
        ++raw;
      }
    }
    sort_unique(to.elements);
    to.collision_count = raw - static_cast<std::int64_t>(to.elements.size());
    if (to.elements.empty())
      throw ComputeError("build_multilevel: level " + std::to_string(i) + " is empty after coprime filter");
  }
  return levels;
}

double size_estimate(int k, double P) {
  // log log P >= 1, so eta >= k
  if (!(P >= std::exp(std::exp(1.0)))) throw DomainError("size_estimate: need P >= e^e");
  const double logP = std::log(P);
  const double eta = k * std::log(logP);
  return P / std::pow(logP, (eta + 1.0) / 2.0) * std::pow((k + 1) / 2.0, eta);
}

std::int64_t euler_phi(std::int64_t q) {
  if (q < 1) throw DomainError("euler_phi: q must be positive");
  std::int64_t result = q;
  std::int64_t n = q;
  for (std::int64_t p = 2; p * p <= n; ++p) {
    if (n % p != 0) continue;
    while (n % p == 0) n /= p;
    result -= result / p;
  }
  if (n > 1) result -= result / n;
  return result;
}

ResidueProfile residue_profile(const std::vector<Element>& elements, std::int64_t q) {
  if (q < 2) throw DomainError("residue_profile: q must be >= 2");
  ResidueProfile r;
  r.q = q;
  r.phi_q = euler_phi(q);
  r.set_size = elements.size();
  for (std::int64_t a = 1; a < q; ++a)
    if (std::gcd(a, q) == 1) r.counts[a] = 0;
  for (const Element x : elements) {
    const std::int64_t a = ((x % q) + q) % q;
    if (auto it = r.counts.find(a); it != r.counts.end()) ++it->second;
  }
  if (!elements.empty()) {
    const double n = static_cast<double>(elements.size());
    for (const auto& [a, c] : r.counts)
      r.max_deviation = std::max(r.max_deviation, std::fabs(static_cast<double>(c) * r.phi_q / n - 1.0));
  }
  return r;
}

void write_set(std::ostream& os, const SetFile& file) {
  os << "# waring-set k=" << file.k << " mode=" << file.mode << " P=" << file.P << '\n';
  for (const Element x : file.elements) os << x << '\n';
}

void write_set(std::ostream& os, const SmoothSet& set) {
  SetFile f;
  f.k = set.spec.k;
  f.mode = set.spec.describe();
  f.P = fmt_real(set.spec.P_top);
  f.elements = set.elements;
  write_set(os, f);
}

SetFile read_set(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw DomainError("read_set: empty input");
  constexpr std::string_view kTag = "# waring-set ";
  if (line.rfind(kTag, 0) != 0) throw DomainError("read_set: missing '# waring-set' header");
  SetFile f;
  std::istringstream hs(line.substr(kTag.size()));
  std::string tok;
  bool have_k = false;
  while (hs >> tok) {
    const auto eq = tok.find('=');
    if (eq == std::string::npos) throw DomainError("read_set: malformed header field '" + tok + "'");
    const std::string key = tok.substr(0, eq);
    const std::string val = tok.substr(eq + 1);
    if (key == "k") {
      f.k = std::stoi(val);
      have_k = true;
    } else if (key == "mode") {
      f.mode = val;
    } else if (key == "P") {
      f.P = val;
    }
  }
  if (!have_k) throw DomainError("read_set: header lacks k=");
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::size_t pos = 0;
    const long long v = std::stoll(line, &pos);
    if (line.find_first_not_of(" \t\r", pos) != std::string::npos)
      throw DomainError("read_set: trailing characters in line '" + line + "'");
    f.elements.push_back(v);
  }
  return f;
}

}  // namespace waring::smooth
