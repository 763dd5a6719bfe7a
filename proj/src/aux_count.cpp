#include "waring/aux_count.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <queue>
#include <sstream>
#include <thread>

namespace waring::aux {

namespace {

using u128 = unsigned __int128;

BigInt to_big(u128 v) {
  BigInt hi = static_cast<std::uint64_t>(v >> 64);
  return (hi << 64) + BigInt(static_cast<std::uint64_t>(v));
}

BigInt big_pow(std::size_t base, int exp) {
  BigInt r = 1;
  for (int i = 0; i < exp; ++i) r *= base;
  return r;
}

unsigned resolve_threads(unsigned requested) {
  if (requested != 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

SumTable reduce_sorted(std::vector<Key>& keys) {
  std::sort(keys.begin(), keys.end());
  SumTable out;
  for (const Key key : keys) {
    if (!out.empty() && out.back().first == key) {
      ++out.back().second;
    } else {
      out.emplace_back(key, 1);
    }
  }
  return out;
}

// Heap merge over the rows of `rows`, each a shifted copy of `cols`, restricted to
// output keys in [lo, hi). Equal keys are aggregated before being visited.
void merge_range(const SumTable& rows, const SumTable& cols, Key lo, Key hi,
                 const std::function<void(Key, Count)>& visit) {
  struct Cursor {
    Key key;
    std::size_t row;
    std::size_t col;
  };
  const auto later = [](const Cursor& a, const Cursor& b) { return a.key > b.key; };
  std::priority_queue<Cursor, std::vector<Cursor>, decltype(later)> heap(later);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const Key shift = rows[r].first;
    const auto it = std::lower_bound(cols.begin(), cols.end(), lo - shift,
                                     [](const auto& e, Key v) { return e.first < v; });
    if (it == cols.end()) continue;
    const Key key = it->first + shift;
    if (key >= hi) continue;
    heap.push({key, r, static_cast<std::size_t>(it - cols.begin())});
  }
  bool open = false;
  Key cur_key = 0;
  Count cur_count = 0;
  while (!heap.empty()) {
    Cursor c = heap.top();
    heap.pop();
    const Count add = rows[c.row].second * cols[c.col].second;
    if (open && c.key == cur_key) {
      cur_count += add;
    } else {
      if (open) visit(cur_key, cur_count);
      open = true;
      cur_key = c.key;
      cur_count = add;
    }
    if (++c.col < cols.size()) {
      c.key = cols[c.col].first + rows[c.row].first;
      if (c.key < hi) heap.push(c);
    }
  }
  if (open) visit(cur_key, cur_count);
}

void check_sum_width(const SumTable& a, const SumTable& b) {
  if (a.empty() || b.empty()) return;
  detail::checked_add(a.back().first, b.back().first, "sumset key");
  detail::checked_add(a.front().first, b.front().first, "sumset key");
}

// Chunked key-range partition; each chunk is merged independently.
std::vector<std::pair<Key, Key>> key_chunks(const SumTable& a, const SumTable& b, unsigned chunks) {
  const Key lo = a.front().first + b.front().first;
  const Key hi = a.back().first + b.back().first + 1;
  std::vector<std::pair<Key, Key>> out;
  const auto span = static_cast<u128>(static_cast<__int128>(hi) - lo);
  Key prev = lo;
  for (unsigned c = 1; c <= chunks; ++c) {
    const Key next = c == chunks ? hi : static_cast<Key>(lo + static_cast<__int128>(span * c / chunks));
    if (next > prev) out.emplace_back(prev, next);
    prev = next;
  }
  return out;
}

void check_domains(const std::vector<IntSet>& domains, const Budget& budget) {
  if (domains.empty()) throw DomainError("rep_function: need at least one domain");
  double cost = 1;
  for (const auto& d : domains) {
    if (d.empty()) throw DomainError("rep_function: empty domain");
    cost *= static_cast<double>(d.size());
  }
  if (cost > budget.table_ops) {
    std::ostringstream os;
    os << "rep_function: predicted cost " << cost << " table operations exceeds budget " << budget.table_ops;
    throw BudgetError(os.str());
  }
}

SumTable fold(const std::vector<SumTable>& tables, std::size_t begin, std::size_t end, unsigned threads) {
  SumTable acc = {{0, 1}};
  for (std::size_t i = begin; i < end; ++i) acc = convolve(acc, tables[i], threads);
  return acc;
}

std::pair<SumTable, SumTable> split_tables(const std::vector<IntSet>& domains, int k, unsigned threads) {
  std::vector<SumTable> tables;
  tables.reserve(domains.size());
  for (const auto& d : domains) tables.push_back(power_table(d, k));
  const std::size_t a = (tables.size() + 1) / 2;
  return {fold(tables, 0, a, threads), fold(tables, a, tables.size(), threads)};
}

}  // namespace

Count RepFunction::gamma(Key m) const {
  const auto it = std::lower_bound(table.begin(), table.end(), m,
                                   [](const auto& e, Key v) { return e.first < v; });
  return (it != table.end() && it->first == m) ? it->second : 0;
}

SumTable power_table(const IntSet& X, int k) {
  if (k < 1) throw DomainError("power_table: k must be positive");
  std::vector<Key> keys;
  keys.reserve(X.size());
  for (const auto x : X) {
    if (x < 0) throw DomainError("power_table: domain elements must be non-negative");
    keys.push_back(detail::checked_pow(x, k, "x^k"));
  }
  return reduce_sorted(keys);
}

void for_each_convolved(const SumTable& a, const SumTable& b, unsigned threads,
                        const std::function<void(Key, Count)>& visit) {
  if (a.empty() || b.empty()) return;
  check_sum_width(a, b);
  const SumTable& rows = a.size() <= b.size() ? a : b;
  const SumTable& cols = a.size() <= b.size() ? b : a;
  const unsigned workers = std::min<unsigned>(resolve_threads(threads), 64);
  const auto chunks = key_chunks(a, b, workers * 4);
  if (workers <= 1 || chunks.size() <= 1) {
    for (const auto& [lo, hi] : chunks) merge_range(rows, cols, lo, hi, visit);
    return;
  }
  // Each chunk is buffered by its worker, then replayed in key order.
  std::vector<SumTable> buffers(chunks.size());
  std::vector<std::thread> pool;
  std::atomic<std::size_t> next{0};
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t c = next++; c < chunks.size(); c = next++) {
        auto& buf = buffers[c];
        merge_range(rows, cols, chunks[c].first, chunks[c].second,
                    [&buf](Key key, Count n) { buf.emplace_back(key, n); });
      }
    });
  }
  for (auto& t : pool) t.join();
  for (const auto& buf : buffers)
    for (const auto& [key, n] : buf) visit(key, n);
}

SumTable convolve(const SumTable& a, const SumTable& b, unsigned threads) {
  SumTable out;
  for_each_convolved(a, b, threads, [&out](Key key, Count n) { out.emplace_back(key, n); });
  return out;
}

BigInt convolved_sum_of_squares(const SumTable& a, const SumTable& b, unsigned threads) {
  // gamma <= product of domain sizes <= budget < 2^32 in practice; guard anyway.
  BigInt total = 0;
  u128 acc = 0;
  for_each_convolved(a, b, threads, [&](Key, Count n) {
    const u128 sq = static_cast<u128>(n) * n;
    if (acc > ~static_cast<u128>(0) - sq) {
      total += to_big(acc);
      acc = 0;
    }
    acc += sq;
  });
  total += to_big(acc);
  return total;
}

RepFunction rep_function(const std::vector<IntSet>& domains, int k, const Budget& budget) {
  check_domains(domains, budget);
  const unsigned threads = budget.threads;
  RepFunction r;
  r.k = k;
  r.s = static_cast<int>(domains.size());
  r.domains = domains;
  const auto [left, right] = split_tables(domains, k, threads);
  r.table = convolve(left, right, threads);
  r.total = 1;
  for (const auto& d : domains) r.total *= d.size();
  return r;
}

CountResult s_count(const IntSet& X, int s, int k, const Budget& budget) {
  if (s < 1) throw DomainError("s_count: s must be >= 1");
  const auto start = std::chrono::steady_clock::now();
  const std::vector<IntSet> domains(static_cast<std::size_t>(s), X);
  check_domains(domains, budget);
  const auto [left, right] = split_tables(domains, k, budget.threads);
  CountResult c;
  c.S = convolved_sum_of_squares(left, right, budget.threads);
  c.s = s;
  c.k = k;
  c.set_size = X.size();
  c.diagonal_lb = big_pow(X.size(), s);
  c.P_param = X.empty() ? 0.0 : static_cast<double>(*std::max_element(X.begin(), X.end()));
  c.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return c;
}

DistinctSums distinct_sums_bound(const std::vector<IntSet>& domains, int k, const Budget& budget) {
  const RepFunction r = rep_function(domains, k, budget);
  DistinctSums d;
  d.distinct = r.table.size();
  d.total = r.total;
  d.sum_of_squares = 0;
  for (const auto& [key, n] : r.table) d.sum_of_squares += BigInt(n) * n;
  d.lower_bound = to_double(d.total) * to_double(d.total) / to_double(d.sum_of_squares);
  // Exact form of distinct >= total^2 / sum gamma^2.
  d.holds = BigInt(d.distinct) * d.sum_of_squares >= d.total * d.total;
  if (!d.holds) throw ComputeError("distinct_sums_bound: Cauchy-Schwarz inequality violated");
  return d;
}

bool is_prime(std::int64_t n) {
  if (n < 2) return false;
  for (std::int64_t d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

CountResult t_pq_count(const IntSet& E, int s, int k, std::int64_t p, std::int64_t q, const Budget& budget) {
  if (s < 2) throw DomainError("t_pq_count: s must be >= 2");
  if (E.empty()) throw DomainError("t_pq_count: empty set");
  if (p == q) throw DomainError("t_pq_count: p and q must differ");
  if (!is_prime(p) || !is_prime(q)) throw DomainError("t_pq_count: p and q must be prime");
  for (const auto x : E)
    if (x % p == 0)
      throw DomainError("t_pq_count: element " + std::to_string(x) + " is not coprime to p=" + std::to_string(p));
  const double cost = std::pow(static_cast<double>(E.size()), 2.0 * s);
  if (cost > budget.brute_force) {
    std::ostringstream os;
    os << "t_pq_count: |E|^{2s} = " << cost << " exceeds budget " << budget.brute_force;
    throw BudgetError(os.str());
  }
  const auto start = std::chrono::steady_clock::now();

  const std::int64_t pk = detail::checked_pow(p, k, "p^k");
  const std::int64_t qk = detail::checked_pow(q, k, "q^k");
  const std::vector<IntSet> domains(static_cast<std::size_t>(s - 1), E);
  const SumTable r = rep_function(domains, k, budget).table;
  const SumTable powers = power_table(E, k);

  // D(v) = #{(xs, ys) : sum xs^k - sum ys^k = v} = sum_m r(m) r(m - v)
  std::map<Key, u128> diff_cache;
  const auto diff_count = [&](Key v) -> u128 {
    if (auto it = diff_cache.find(v); it != diff_cache.end()) return it->second;
    u128 n = 0;
    for (const auto& [m, c] : r) {
      Key other;
      if (__builtin_sub_overflow(m, v, &other)) continue;
      const auto it = std::lower_bound(r.begin(), r.end(), other,
                                       [](const auto& e, Key x) { return e.first < x; });
      if (it != r.end() && it->first == other) n += static_cast<u128>(c) * it->second;
    }
    diff_cache.emplace(v, n);
    return n;
  };

  BigInt total = 0;
  for (const auto& [xk, cx] : powers) {
    for (const auto& [yk, cy] : powers) {
      const Key w = yk - xk;
      if (w % pk != 0) continue;
      const Key v = detail::checked_mul(qk, w / pk, "q^k (y^k - x^k) / p^k");
      const u128 d = diff_count(v);
      if (d != 0) total += to_big(d) * (BigInt(cx) * cy);
    }
  }

  CountResult c;
  c.S = total;
  c.s = s;
  c.k = k;
  c.set_size = E.size();
  c.diagonal_lb = big_pow(E.size(), s);
  c.P_param = static_cast<double>(*std::max_element(E.begin(), E.end()));
  c.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return c;
}

Lemma1Result lemma1_from_sets(const IntSet& base, const smooth::PrimeWindow& window, int k, int s,
                              std::int64_t P_floor, const Budget& budget) {
  if (s < 2) throw DomainError("lemma1_check: s must be >= 2");
  if (window.primes.empty()) throw ComputeError("lemma1_check: empty prime window");
  const smooth::SmoothSet lifted = smooth::build_single(base, window);
  Lemma1Result r;
  r.Z = window.Z();
  r.base_size = base.size();
  r.lifted_size = lifted.size();
  r.collisions = lifted.collision_count;
  r.lhs = s_count(lifted.elements, s, k, budget).S;
  const BigInt s_base = s_count(base, s, k, budget).S;
  const BigInt s_prev = s_count(base, s - 1, k, budget).S;
  r.rhs = big_pow(r.Z, s) * s_base + big_pow(r.Z, 2 * s) * BigInt(P_floor) * s_prev;
  r.ratio = to_double(r.lhs) / to_double(r.rhs);
  return r;
}

Lemma1Result lemma1_check(int k, int s, double P, double theta, int base_levels, const Budget& budget) {
  const smooth::SmoothSet base = smooth::build_single_levels(k, theta, P, base_levels);
  const smooth::PrimeWindow window = smooth::window_for(std::pow(P, theta));
  return lemma1_from_sets(base.elements, window, k, s, static_cast<std::int64_t>(std::floor(P)), budget);
}

ExponentFit exponent_fit(const std::vector<std::pair<double, BigInt>>& runs) {
  if (runs.size() < 3) throw DomainError("exponent_fit: need at least 3 points");
  std::vector<double> xs;
  std::vector<double> ys;
  for (const auto& [P, S] : runs) {
    if (!(P > 0) || S <= 0) throw DomainError("exponent_fit: P and S must be positive");
    xs.push_back(std::log(P));
    ys.push_back(std::log(to_double(S)));
  }
  auto sorted = xs;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw DomainError("exponent_fit: P values must be distinct");
  const double n = static_cast<double>(xs.size());
  double mx = 0;
  double my = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0;
  double sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  ExponentFit f;
  f.points = runs;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  if (!std::isfinite(f.slope)) throw DomainError("exponent_fit: degenerate input");
  return f;
}

IntSet as_set(IntSet values) {
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  return values;
}

double to_double(const BigInt& v) { return v.convert_to<double>(); }

}  // namespace waring::aux
