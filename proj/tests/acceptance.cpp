// Acceptance gate: one line per criterion, nonzero exit if any fails.

#include <cstdio>

#include "linopt/verify.hpp"

int main() {
  std::vector<linopt::CriterionResult> results = linopt::run_acceptance();
  bool all_pass = true;
  for (const auto& r : results) {
    std::puts(linopt::format_criterion(r).c_str());
    all_pass = all_pass && r.pass;
  }
  std::printf("%zu/%zu criteria passed\n",
              static_cast<size_t>(std::count_if(results.begin(), results.end(),
                                                [](const auto& r) { return r.pass; })),
              results.size());
  return all_pass ? 0 : 1;
}
