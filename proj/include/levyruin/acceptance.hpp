#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace levyruin {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

// Runs the full verification suite (deterministic given the seed). The
// callback, when set, receives each result as it completes.
std::vector<CriterionResult> run_acceptance(
    unsigned workers, std::uint64_t seed = 20250801,
    const std::function<void(const CriterionResult&)>& on_done = {});

}  // namespace levyruin
