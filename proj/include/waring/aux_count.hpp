#pragma once

// Exact counting for the auxiliary equation
//
//   x_1^k + ... + x_s^k = y_1^k + ... + y_s^k,   x_i, y_i in X_i,
//
// through the representation function gamma(m) of the sumset of k-th powers.
// S = sum_m gamma(m)^2. Tables are sorted (sum, multiplicity) vectors; the
// s-fold table is the convolution of an ceil(s/2)-fold and a floor(s/2)-fold
// table, streamed in key order so S never needs the full gamma in memory.

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "waring/common.hpp"
#include "waring/smooth_sets.hpp"

namespace waring::aux {

using Key = std::int64_t;
using Count = std::uint64_t;
using SumTable = std::vector<std::pair<Key, Count>>;
using IntSet = std::vector<std::int64_t>;

struct Budget {
  double table_ops = 1e9;  // predicted table updates (product of domain sizes)
  double brute_force = 1e9;  // |E|^{2s} ceiling for T_{p,q}
  unsigned threads = 0;    // 0: hardware concurrency
};

struct RepFunction {
  int k = 0;
  int s = 0;
  std::vector<IntSet> domains;
  SumTable table;
  BigInt total;

  Count gamma(Key m) const;
};

struct CountResult {
  BigInt S;
  int s = 0;
  int k = 0;
  std::size_t set_size = 0;
  BigInt diagonal_lb;
  double P_param = 0;
  double seconds = 0;
};

struct DistinctSums {
  std::size_t distinct = 0;
  double lower_bound = 0;  // total^2 / sum gamma^2
  BigInt total;
  BigInt sum_of_squares;
  bool holds = false;
};

struct ExponentFit {
  std::vector<std::pair<double, BigInt>> points;
  double slope = 0;
  double intercept = 0;
};

struct Lemma1Result {
  BigInt lhs;  // S_s over E(P~)
  BigInt rhs;  // Z^s S_s(P) + Z^{2s} floor(P) S_{s-1}(P)
  double ratio = 0;
  std::size_t Z = 0;
  std::size_t base_size = 0;
  std::size_t lifted_size = 0;
  std::int64_t collisions = 0;
};

// Multiset {x^k : x in X}, sorted. Throws OverflowError past 64 bits.
SumTable power_table(const IntSet& X, int k);

// Sumset convolution of two sorted tables.
SumTable convolve(const SumTable& a, const SumTable& b, unsigned threads = 0);

// Visit the convolution a * b in ascending key order without materialising it.
void for_each_convolved(const SumTable& a, const SumTable& b, unsigned threads,
                        const std::function<void(Key, Count)>& visit);

// sum gamma(m)^2 for gamma = a * b.
BigInt convolved_sum_of_squares(const SumTable& a, const SumTable& b, unsigned threads = 0);

RepFunction rep_function(const std::vector<IntSet>& domains, int k, const Budget& budget = {});

CountResult s_count(const IntSet& X, int s, int k, const Budget& budget = {});

DistinctSums distinct_sums_bound(const std::vector<IntSet>& domains, int k, const Budget& budget = {});

// Solutions of p^k (sum_{i<s} x_i^k - sum_{i<s} y_i^k) = q^k (y^k - x^k) over E^{2s}.
CountResult t_pq_count(const IntSet& E, int s, int k, std::int64_t p, std::int64_t q,
                       const Budget& budget = {});

Lemma1Result lemma1_check(int k, int s, double P, double theta, int base_levels, const Budget& budget = {});
// Same comparison for an explicit base set and window.
Lemma1Result lemma1_from_sets(const IntSet& base, const smooth::PrimeWindow& window, int k, int s,
                              std::int64_t P_floor, const Budget& budget = {});

ExponentFit exponent_fit(const std::vector<std::pair<double, BigInt>>& runs);

// Sorted copy with duplicates removed; aux counts are over sets.
IntSet as_set(IntSet values);

bool is_prime(std::int64_t n);

double to_double(const BigInt& v);

}  // namespace waring::aux
