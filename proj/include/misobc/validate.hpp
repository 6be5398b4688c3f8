#pragma once

#include <string>
#include <vector>

#include "misobc/harness.hpp"

namespace misobc {

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

// Invariant / property suite behind the `validate` CLI subcommand.
// Deterministic given cfg.seed; runs in seconds.
std::vector<CheckResult> run_validation(const SimConfig& cfg);

}  // namespace misobc
