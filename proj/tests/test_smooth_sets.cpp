#include <cmath>
#include <random>
#include <set>
#include <sstream>

#include "doctest.h"
#include "waring/smooth_sets.hpp"

using namespace waring;
using namespace waring::smooth;

namespace {

bool trial_prime(std::int64_t n) {
  if (n < 2) return false;
  for (std::int64_t d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

}  // namespace

TEST_CASE("primes_in") {
  CHECK(primes_in(2, 10).primes == std::vector<std::int64_t>{2, 3, 5, 7});
  CHECK(primes_in(2, 10).Z() == 4);
  CHECK(primes_in(8, 10).Z() == 0);
  CHECK(primes_in(1'000'000, 1'000'100).Z() == 6);
  CHECK_THROWS_AS(primes_in(10, 9), DomainError);
  CHECK_THROWS_AS(primes_in(1, 9), DomainError);

  // Against trial division, including a window crossing a sieve segment boundary.
  const auto w = primes_in(262'000, 262'400);
  std::vector<std::int64_t> expect;
  for (std::int64_t n = 262'000; n <= 262'400; ++n)
    if (trial_prime(n)) expect.push_back(n);
  CHECK(w.primes == expect);
}

TEST_CASE("build_single") {
  const auto a = build_single({1, 2, 3}, primes_in(5, 7));
  CHECK(a.elements == std::vector<Element>{5, 7, 10, 14, 15, 21});
  CHECK(a.collision_count == 0);

  PrimeWindow w;
  w.primes = {2, 5};
  const auto b = build_single({2, 5}, w);
  CHECK(b.elements == std::vector<Element>{4, 10, 25});
  CHECK(b.collision_count == 1);

  const auto c = build_single({1}, primes_in(11, 11));
  CHECK(c.elements == std::vector<Element>{11});

  CHECK_THROWS_AS(build_single({}, w), DomainError);
  CHECK_THROWS_AS(build_single({3, 1}, w), DomainError);
  PrimeWindow big;
  big.primes = {4'000'000'007};
  CHECK_THROWS_AS(build_single({4'000'000'000'000LL}, big), OverflowError);
}

TEST_CASE("single-mode soundness and size law") {
  const auto set = build_single_levels(3, 0.4, 400.0, 2);
  REQUIRE(set.windows.size() == 2);
  // Every element is a base integer times one prime from each window.
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<std::size_t> pick(0, set.size() - 1);
  for (int n = 0; n < 100; ++n) {
    const Element x = set.elements[pick(rng)];
    bool found = false;
    for (const auto p1 : set.windows[1].primes) {
      if (x % p1) continue;
      for (const auto p0 : set.windows[0].primes) {
        if ((x / p1) % p0) continue;
        if ((x / p1) / p0 <= set.spec.base_floor) found = true;
      }
    }
    CHECK(found);
  }
  // |E(P~)| <= |E(P)| Z with equality iff no collisions.
  const auto lifted = build_single(set.elements, primes_in(23, 47));
  CHECK(lifted.size() + lifted.collision_count == set.size() * 7);
  CHECK(build_single_levels(3, 0.4, 400.0, 2).elements == set.elements);

  const auto flat = build_single_levels(3, 0.4, 16.0, 0);
  CHECK(flat.size() == 16);
  CHECK(flat.spec.base_floor == 16);
  CHECK(build_single_levels(3, 1.0 / 3.0, 100.0, 0).spec.theta_at_limit);
}

TEST_CASE("single mode with unit base: prime factors come from the windows") {
  const auto w1 = primes_in(5, 11);
  const auto w2 = primes_in(17, 31);
  const auto s1 = build_single({1}, w1);
  const auto s2 = build_single(s1.elements, w2);
  for (const auto x : s2.elements) {
    std::int64_t r = x;
    for (std::int64_t p = 2; p * p <= r; ++p)
      while (r % p == 0) {
        CHECK((w1.contains(p) || w2.contains(p)));
        r /= p;
      }
    if (r > 1) CHECK((w1.contains(r) || w2.contains(r)));
    // elements below the larger window are coprime to every prime in it
    for (const auto p : w2.primes) CHECK((x / p) % p != 0);
  }
}

TEST_CASE("build_multilevel k=3") {
  SmoothSpec spec;
  spec.k = 3;
  spec.mode = MultiMode{bounds::theta_schedule(3, 1.0)};
  const auto levels = build_multilevel(spec, 1e4);
  REQUIRE(levels.size() == 4);
  // tests/oracles/smooth_oracle.py
  CHECK(levels[3].size() == 3);
  CHECK(levels[2].size() == 12);
  CHECK(levels[1].size() == 21);
  CHECK(levels[0].size() == 9);
  CHECK(levels[0].elements.front() == 1001);
  CHECK(levels[0].elements.back() == 4389);
  REQUIRE(levels[0].windows.size() == 3);
  CHECK(levels[0].windows[0].lo == 11);
  CHECK(levels[0].windows[0].hi == 21);
  CHECK(levels[0].windows[2].primes == std::vector<std::int64_t>{7});

  // Coprime chain: each element of level i is x p with x in level i+1, p in window i+1, p not dividing x.
  for (int i = 0; i < 3; ++i) {
    const auto& w = levels[i].windows.back();
    for (const auto e : levels[i].elements) {
      bool ok = false;
      for (const auto p : w.primes)
        if (e % p == 0 && (e / p) % p != 0 && levels[i + 1].contains(e / p)) ok = true;
      CHECK(ok);
    }
  }

  CHECK_THROWS_AS(build_multilevel(spec, 50.0), ComputeError);
  try {
    build_multilevel(spec, 50.0);
  } catch (const ComputeError& e) {
    CHECK(std::string(e.what()).find("level") != std::string::npos);
  }
}

TEST_CASE("size_estimate") {
  CHECK(size_estimate(3, 1e6) == doctest::Approx(2.0e3).epsilon(0.05));
  const double ee = std::exp(std::exp(1.0));
  CHECK(std::isfinite(size_estimate(3, ee)));
  CHECK_THROWS_AS(size_estimate(3, 10.0), DomainError);
}

TEST_CASE("residue_profile") {
  const auto r = residue_profile(std::vector<Element>{5, 7, 10, 14, 15, 21}, 4);
  CHECK(r.phi_q == 2);
  CHECK(r.counts.at(1) == 2);
  CHECK(r.counts.at(3) == 2);
  CHECK(r.max_deviation == doctest::Approx(1.0 / 3.0));

  const auto odd = residue_profile(std::vector<Element>{1, 3, 5, 7}, 2);
  CHECK(odd.counts.size() == 1);
  CHECK(odd.max_deviation == 0.0);
  CHECK_THROWS_AS(residue_profile(std::vector<Element>{1}, 1), DomainError);

  // Large product set mod 5: roughly equidistributed, and better with more elements.
  const auto small = build_single_levels(3, 0.4, 2000.0, 1);
  const auto large = build_single_levels(3, 0.4, 50000.0, 1);
  const auto ps = residue_profile(small, 5);
  const auto pl = residue_profile(large, 5);
  CHECK(pl.max_deviation < 0.5);
  CHECK(pl.max_deviation <= ps.max_deviation + 0.05);
  std::int64_t total = 0;
  for (const auto& [a, c] : pl.counts) total += c;
  CHECK(total <= static_cast<std::int64_t>(large.size()));
}

TEST_CASE("set file round trip") {
  const auto set = build_single_levels(3, 0.4, 300.0, 1);
  std::stringstream ss;
  write_set(ss, set);
  const std::string text = ss.str();
  CHECK(text.rfind("# waring-set k=3 mode=single(theta=0.40000000000000002,levels=1) P=300\n", 0) == 0);
  const SetFile back = read_set(ss);
  CHECK(back.k == 3);
  CHECK(back.elements == set.elements);
  std::stringstream again;
  write_set(again, back);
  CHECK(again.str() == text);

  std::stringstream bad("1\n2\n");
  CHECK_THROWS_AS(read_set(bad), DomainError);
  std::stringstream junk("# waring-set k=3 mode=x P=1\n12abc\n");
  CHECK_THROWS_AS(read_set(junk), DomainError);
}
