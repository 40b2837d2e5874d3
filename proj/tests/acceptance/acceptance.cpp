// One line per acceptance criterion on the reference configuration;
// exit status 0 iff every criterion passes.
#include <iostream>

#include "limcom_app/checks.hpp"

int main() {
  using namespace limcom::app;
  const RunConfig cfg;  // reference parameters, n = 256
  bool all = true;
  int shown = 0;
  run_suite(cfg, SuiteOptions{}, [&](const CheckResult& r) {
    all = all && r.passed;
    if (r.criterion > 0) ++shown;
    std::cout << format_line(r) << std::endl;
  });
  std::cout << (all && shown == 10 ? "ALL PASS" : "FAILURES PRESENT") << " (" << shown << " criteria)" << std::endl;
  return all && shown == 10 ? 0 : 1;
}
