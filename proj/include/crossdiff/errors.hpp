#pragma once

#include <stdexcept>
#include <string>

namespace crossdiff {

/// Time integration failure (positivity retry exhausted, stability bound
/// violated, root solve stalled).
struct SolverError : std::runtime_error {
  explicit SolverError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace crossdiff
