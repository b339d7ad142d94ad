#include <iostream>

#include "potlab/acceptance.hpp"

int main() {
  potlab::AcceptanceOptions opts;
  bool all = true;
  for (int id = 1; id <= potlab::kCriteria; ++id) {
    const potlab::CriterionResult r = potlab::run_criterion(id, opts);
    std::cout << potlab::summary_line(r) << std::endl;
    all = all && r.passed();
  }
  return all ? 0 : 1;
}
