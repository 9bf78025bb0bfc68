// Runs every headline criterion at its pinned size and prints one PASS/FAIL
// line per criterion. Exit status is nonzero if any criterion fails.
//
//   charax_acceptance [artifact-dir]

#include <algorithm>
#include <iostream>

#include "charax/acceptance.hpp"

int main(int argc, char** argv) {
  charax::acceptance::Options opt;
  if (argc > 1) opt.out = argv[1];
  opt.on_result = [](const charax::acceptance::Criterion& c) {
    std::cout << charax::acceptance::format(c) << std::endl;
  };
  const auto all = charax::acceptance::run_all(opt);
  const auto failed = std::count_if(all.begin(), all.end(), [](const auto& c) { return !c.pass; });
  std::cout << all.size() - failed << "/" << all.size() << " criteria passed\n";
  return failed == 0 ? 0 : 1;
}
