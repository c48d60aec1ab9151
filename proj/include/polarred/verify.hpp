#pragma once

#include "polarred/io.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace polarred {

struct CheckResult {
  std::string name;
  bool passed = false;
  double value = 0.0;      // measured quantity (max residual, deviation, ...)
  double tolerance = 0.0;  // threshold the value is compared against
  std::string detail;
};

struct VerifyOptions {
  std::uint64_t seed = 20240601;
  bool inject_fault = false;  // wrong sign in the vertical constraint
};

/// Runs every module's invariant checks. Checks are deterministic for a
/// fixed seed; an exception inside a check is reported as its failure.
std::vector<CheckResult> run_verify_suite(const VerifyOptions& options);

/// {"seed", "passed", "checks": [{name, passed, value, tolerance, detail}]}
Json verify_report(const VerifyOptions& options, const std::vector<CheckResult>& checks);

}  // namespace polarred
