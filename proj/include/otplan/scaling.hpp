#pragma once

#include <cstdint>
#include <vector>

#include "otplan/core.hpp"

namespace otplan {

// Integerized instance: demands rounded up and supplies rounded down after
// multiplying by alpha = 2nC / (epsilon * U * delta). Rounding the two sides
// in opposite directions keeps total integer supply <= total integer demand.
struct ScaledInstance {
  double alpha = 0.0;
  std::vector<std::int64_t> int_demands;
  std::vector<std::int64_t> int_supplies;
  std::int64_t total_supply = 0;
  double delta_prime = 0.0;
};

struct IntegerPlan {
  Mat<std::int64_t> flow;
};

// Builds the integer instance. Throws ZeroTotalSupply / ZeroMaxCost when the
// caller should short-circuit instead, and OverflowRisk when delta is too
// small for 64-bit bookkeeping.
ScaledInstance scale_instance(const TransportInstance& inst, const SolveConfig& cfg);

// Converts a maximum integer plan back to a feasible maximum real plan:
// divide by alpha, push rounding excess back out of overfull demand rows,
// then route the leftover supply (at most 2n/alpha in total) into leftover
// demand capacity. Adds at most 2nC/alpha to the cost.
TransportPlan recover_plan(const TransportInstance& inst, const ScaledInstance& scaled,
                           const IntegerPlan& int_plan);

}  // namespace otplan
