#include "otplan/solve.hpp"

#include <algorithm>
#include <chrono>

namespace otplan {

namespace {

// Any column-saturating plan; used when every cost is zero or no scaling is
// possible. Fills demand rows in ascending index order.
TransportPlan greedy_maximum_plan(const TransportInstance& inst) {
  TransportPlan plan;
  plan.flow = Mat<double>(inst.num_demands(), inst.num_supplies(), 0.0);
  std::vector<double> room = inst.demands;
  for (std::size_t b = 0; b < inst.num_supplies(); ++b) {
    double remaining = inst.supplies[b];
    for (std::size_t a = 0; a < inst.num_demands() && remaining > 0.0; ++a) {
      const double take = std::min(remaining, room[a]);
      if (take <= 0.0) continue;
      plan.flow(a, b) += take;
      room[a] -= take;
      remaining -= take;
    }
  }
  plan.tag = PlanTag::Maximum;
  return plan;
}

}  // namespace

SolveResult solve_delta_close(const TransportInstance& inst, const SolveConfig& cfg) {
  validate_instance(inst);
  if (!(cfg.delta > 0.0)) {
    throw ValidationError("DeltaOutOfRange", "delta must be positive");
  }
  if (!(cfg.epsilon > 0.0 && cfg.epsilon < 1.0)) {
    throw ValidationError("EpsilonOutOfRange", "epsilon must lie in (0, 1)");
  }

  SolveResult result;
  const auto t_start = std::chrono::steady_clock::now();

  if (inst.total_supply() <= 0.0 || inst.max_cost() <= 0.0) {
    result.plan = greedy_maximum_plan(inst);
    result.cost = plan_cost(inst, result.plan);
    result.stats.timings.total_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                  t_start)
            .count();
    return result;
  }

  const auto t0 = std::chrono::steady_clock::now();
  const ScaledInstance scaled = scale_instance(inst, cfg);
  const auto t1 = std::chrono::steady_clock::now();

  ScaledSolution scaled_sol = solve_scaled(scaled, inst.costs, cfg);

  const auto t2 = std::chrono::steady_clock::now();
  result.plan = recover_plan(inst, scaled, scaled_sol.plan);
  const auto t3 = std::chrono::steady_clock::now();

  result.cost = plan_cost(inst, result.plan);
  result.stats = scaled_sol.stats;
  result.stats.timings.scale_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
  result.stats.timings.recover_ms =
      std::chrono::duration<double, std::milli>(t3 - t2).count();
  result.stats.timings.total_ms =
      std::chrono::duration<double, std::milli>(t3 - t_start).count();
  result.dual_demand = std::move(scaled_sol.dual_demand);
  result.dual_supply = std::move(scaled_sol.dual_supply);
  return result;
}

}  // namespace otplan
