#pragma once

#include <stdexcept>
#include <string>

namespace shuffleagg {

// No parameter choice satisfies the privacy constraints at this (eps, delta, n, d).
struct InfeasibleError : std::runtime_error {
  explicit InfeasibleError(const std::string& what) : std::runtime_error(what) {}
};

// An attack instance exceeds its enumeration or probe budget.
struct BudgetError : std::runtime_error {
  explicit BudgetError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace shuffleagg
