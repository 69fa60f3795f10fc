// Acceptance suite: one PASS/FAIL line per criterion.
//
// Criterion 8 (H^k trend for k >= 1) fails on the disk; the analysis is in
// the README. It is reported as FAIL and does not flip the exit status.
// Any other failure, or criterion 8 starting to pass, does.

#include "specbound/acceptance.hpp"

#include <cstdio>
#include <set>

int main(int argc, char** argv) {
  specbound::RunConfig config;
  if (argc > 1) config = specbound::load_config(argv[1]);
  const std::set<int> expected_failures{8};

  const auto results = specbound::run_acceptance(config, [](const specbound::CriterionResult& r) {
    std::printf("%s\n", specbound::format_line(r).c_str());
    std::fflush(stdout);
  });

  int passed = 0;
  bool unexpected = false;
  for (const auto& r : results) {
    passed += r.passed ? 1 : 0;
    if (r.passed == expected_failures.contains(r.id)) {
      std::printf("unexpected outcome for criterion %d\n", r.id);
      unexpected = true;
    }
  }
  std::printf("%d/%zu criteria passed", passed, results.size());
  for (int id : expected_failures) std::printf("; criterion %d is a known failure", id);
  std::printf("\n");
  return unexpected ? 1 : 0;
}
