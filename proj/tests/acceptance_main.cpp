// One PASS/FAIL line per acceptance criterion; every tolerance lives in the criterion code.
#include <cstdio>
#include <exception>

#include "pinchlab/acceptance.hpp"

int main() {
  using namespace pinchlab;
  int failed = 0;
  try {
    for (const CriterionReport& r : run_acceptance(AcceptanceConfig{})) {
      std::printf("%s C%d %s (%.2f s)\n", r.pass() ? "PASS" : "FAIL", r.id, r.key.c_str(), r.seconds);
      for (const Check& c : r.checks) {
        if (c.pass()) continue;
        std::printf("    %s = %.6g violates %s %.6g\n", c.name.c_str(), c.value, c.relation == Relation::le ? "<=" : ">=",
                    c.threshold);
      }
      failed += r.pass() ? 0 : 1;
    }
  } catch (const std::exception& e) {
    std::printf("FAIL acceptance aborted: %s\n", e.what());
    return 1;
  }
  std::printf("%d of %d criteria failed\n", failed, kCriterionCount);
  return failed == 0 ? 0 : 1;
}
