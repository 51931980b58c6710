#include "qspec/checks.hpp"

#include <cstdio>

namespace qspec::checks {

std::string format_result(const CheckResult& r) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), "[%s] criterion %d: %s (value %.6g vs bound %.6g)%s%s",
                r.pass ? "PASS" : "FAIL", r.criterion, r.name.c_str(), r.value, r.bound,
                r.detail.empty() ? "" : " — ", r.detail.c_str());
  return buf;
}

}  // namespace qspec::checks
