#pragma once

// The end-to-end verification suite: every check is a pure function of the
// options, so two runs with the same seed render identical reports.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace waring::acceptance {

struct Options {
  bool quick = false;
  std::uint64_t seed = 1;
  unsigned threads = 0;
  // Run criterion 14 (renders the others twice); off when embedding.
  bool check_reproducibility = true;
};

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;  // deterministic, no timings
  double seconds = 0;
};

std::vector<CriterionResult> run_all(const Options& opt);
// Only the given criterion ids.
std::vector<CriterionResult> run_some(const Options& opt, const std::vector<int>& ids);

// One line per criterion, no timing information.
std::string render_report(const std::vector<CriterionResult>& results, const Options& opt);

bool all_passed(const std::vector<CriterionResult>& results);

}  // namespace waring::acceptance
