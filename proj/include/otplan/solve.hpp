#pragma once

#include "otplan/core.hpp"
#include "otplan/gt_solver.hpp"
#include "otplan/scaling.hpp"

namespace otplan {

struct SolveResult {
  TransportPlan plan;
  double cost = 0.0;
  RunStats stats;
  std::vector<std::int64_t> dual_demand;
  std::vector<std::int64_t> dual_supply;
};

// End-to-end delta-close solve: validate, integerize, run the phase solver,
// recover a real plan. The recovered cost is within U * delta of optimal.
// Degenerate instances (no supply, or an all-zero cost matrix) skip the
// solver and return a directly constructed maximum plan.
SolveResult solve_delta_close(const TransportInstance& inst, const SolveConfig& cfg);

}  // namespace otplan
