// Runs every acceptance criterion once and prints one [PASS]/[FAIL] line each.
// Exit status is nonzero when any criterion fails.

#include <iostream>

#include "fgs/verify.hpp"

int main() {
  const fgs::verify::Settings settings;
  std::size_t failed = 0;
  const auto outcomes = fgs::verify::run(settings, {}, [&](const fgs::verify::Outcome& o) {
    std::cout << fgs::verify::format_line(o) << std::endl;
    failed += !o.pass;
  });
  std::cout << (outcomes.size() - failed) << "/" << outcomes.size() << " criteria passed\n";
  return failed == 0 ? 0 : 1;
}
