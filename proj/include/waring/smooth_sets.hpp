#pragma once

// Recursive product sets E(P): one layer {x * p} per prime window, either with
// a single exponent theta (repeated layers) or with a per-level theta schedule
// and the coprimality filter (p, x) = 1.

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "waring/bound_engine.hpp"
#include "waring/common.hpp"

namespace waring::smooth {

using Element = std::int64_t;

struct PrimeWindow {
  std::int64_t lo = 0;
  std::int64_t hi = 0;
  std::vector<std::int64_t> primes;

  std::size_t Z() const { return primes.size(); }
  bool contains(std::int64_t p) const;
};

// Exact primes in [lo, hi] by a segmented sieve. Requires 2 <= lo, hi <= 1e9.
PrimeWindow primes_in(std::int64_t lo, std::int64_t hi);

// Inclusive integer window [ceil(Z/2), floor(Z)] for a real Z; lo clamped to 2.
PrimeWindow window_for(double Z);

struct SingleMode {
  double theta = 0.4;
  int levels = 0;
};

struct MultiMode {
  bounds::ThetaSchedule thetas;
};

struct SmoothSpec {
  int k = 3;
  std::variant<SingleMode, MultiMode> mode;
  double P_top = 0;
  std::int64_t base_floor = 1;
  bool theta_at_limit = false;  // single mode with theta == 1/k: admissible limit, flagged

  bool is_single() const { return std::holds_alternative<SingleMode>(mode); }
  std::string describe() const;
};

struct SmoothSet {
  SmoothSpec spec;
  int level = 0;
  std::vector<Element> elements;     // sorted, distinct
  std::vector<PrimeWindow> windows;  // windows applied on the way to this level, innermost first
  std::int64_t collision_count = 0;

  std::size_t size() const { return elements.size(); }
  bool contains(Element x) const;
};

// {x * p : x in base, p in window}, deduplicated. base must be sorted and nonempty.
SmoothSet build_single(const std::vector<Element>& base, const PrimeWindow& window);

// Single-theta set E(P): `levels` product layers over the base interval [1, base_floor].
// Layer sizes follow P_{j+1} = P_j^{1+theta} ending at P.
SmoothSet build_single_levels(int k, double theta, double P, int levels);

// Multi-level construction. Result index i holds E(P_i); index k is the base interval
// [1, floor(P_k)] and index 0 the final set.
std::vector<SmoothSet> build_multilevel(const SmoothSpec& spec, double P);

// P / (log P)^{(eta+1)/2} * ((k+1)/2)^eta with eta = k log log P. Requires P >= e^e.
double size_estimate(int k, double P);

struct ResidueProfile {
  std::int64_t q = 0;
  std::map<std::int64_t, std::int64_t> counts;  // coprime residues only
  std::int64_t phi_q = 0;
  std::size_t set_size = 0;
  double max_deviation = 0;
};

ResidueProfile residue_profile(const std::vector<Element>& elements, std::int64_t q);
inline ResidueProfile residue_profile(const SmoothSet& set, std::int64_t q) {
  return residue_profile(set.elements, q);
}

// Newline-delimited decimal integers behind a `# waring-set k=.. mode=.. P=..` header.
struct SetFile {
  int k = 0;
  std::string mode;
  std::string P;
  std::vector<Element> elements;
};

void write_set(std::ostream& os, const SmoothSet& set);
void write_set(std::ostream& os, const SetFile& file);
SetFile read_set(std::istream& is);

std::int64_t euler_phi(std::int64_t q);

}  // namespace waring::smooth
