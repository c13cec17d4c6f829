#include "otplan/scaling.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "otplan/gt_solver.hpp"

namespace otplan {

namespace {

constexpr double kInt62 = 4.611686018427388e18;  // 2^62, overflow guard

}  // namespace

ScaledInstance scale_instance(const TransportInstance& inst, const SolveConfig& cfg) {
  if (!(cfg.delta > 0.0)) {
    throw ValidationError("DeltaOutOfRange", "delta must be positive");
  }
  if (!(cfg.epsilon > 0.0 && cfg.epsilon < 1.0)) {
    throw ValidationError("EpsilonOutOfRange", "epsilon must lie in (0, 1)");
  }
  const double big_c = inst.max_cost();
  const double total_supply = inst.total_supply();
  if (total_supply <= 0.0) {
    throw ValidationError("ZeroTotalSupply", "instance has no supply to route");
  }
  if (big_c <= 0.0) {
    throw ValidationError("ZeroMaxCost", "all costs are zero; any maximum plan is optimal");
  }

  ScaledInstance scaled;
  scaled.delta_prime = cfg.delta_prime();
  scaled.alpha = 2.0 * static_cast<double>(inst.num_nodes()) * big_c /
                 (cfg.epsilon * total_supply * cfg.delta);

  const double max_demand = *std::max_element(inst.demands.begin(), inst.demands.end());
  if (scaled.alpha * max_demand >= kInt62 || scaled.alpha * total_supply >= kInt62) {
    throw ValidationError("OverflowRisk",
                          "delta too small: scaled masses exceed the 62-bit guard");
  }

  scaled.int_demands.reserve(inst.num_demands());
  for (double d : inst.demands) {
    scaled.int_demands.push_back(static_cast<std::int64_t>(std::ceil(d * scaled.alpha)));
  }
  scaled.int_supplies.reserve(inst.num_supplies());
  for (double s : inst.supplies) {
    scaled.int_supplies.push_back(static_cast<std::int64_t>(std::floor(s * scaled.alpha)));
  }
  scaled.total_supply = std::accumulate(scaled.int_supplies.begin(),
                                        scaled.int_supplies.end(), std::int64_t{0});

  // The path-length statistic and all dual values live below this product.
  const std::int64_t ceiling = scaled_cost(big_c, scaled.delta_prime);
  if (static_cast<double>(scaled.total_supply) * static_cast<double>(ceiling + 1) >=
      kInt62) {
    throw ValidationError("OverflowRisk",
                          "delta too small: path-length bound exceeds the 62-bit guard");
  }
  return scaled;
}

TransportPlan recover_plan(const TransportInstance& inst, const ScaledInstance& scaled,
                           const IntegerPlan& int_plan) {
  const std::size_t na = inst.num_demands();
  const std::size_t nb = inst.num_supplies();
  if (int_plan.flow.rows() != na || int_plan.flow.cols() != nb ||
      scaled.int_demands.size() != na || scaled.int_supplies.size() != nb) {
    throw ValidationError("DimensionMismatch", "integer plan shape does not match instance");
  }
  if (!(scaled.alpha > 0.0)) {
    throw ValidationError("DimensionMismatch", "scaled instance has no positive alpha");
  }

  // Precondition: the integer plan is maximum for the scaled instance.
  for (std::size_t b = 0; b < nb; ++b) {
    std::int64_t col = 0;
    for (std::size_t a = 0; a < na; ++a) {
      if (int_plan.flow(a, b) < 0) {
        throw ValidationError("NotMaximum", "integer plan has a negative entry");
      }
      col += int_plan.flow(a, b);
    }
    if (col != scaled.int_supplies[b]) {
      throw ValidationError("NotMaximum",
                            "integer plan does not saturate supply " + std::to_string(b));
    }
  }

  TransportPlan plan;
  plan.flow = Mat<double>(na, nb, 0.0);
  for (std::size_t a = 0; a < na; ++a) {
    for (std::size_t b = 0; b < nb; ++b) {
      plan.flow(a, b) = static_cast<double>(int_plan.flow(a, b)) / scaled.alpha;
    }
  }

  // Step 2 of the recovery: demand rows were rounded up, so a row can carry
  // more than d_a. Push the excess back, expensive edges first.
  std::vector<std::size_t> order(nb);
  for (std::size_t a = 0; a < na; ++a) {
    double row = 0.0;
    for (std::size_t b = 0; b < nb; ++b) row += plan.flow(a, b);
    double excess = row - inst.demands[a];
    if (excess <= 0.0) continue;

    for (std::size_t b = 0; b < nb; ++b) order[b] = b;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
      return inst.costs(a, x) > inst.costs(a, y);
    });
    for (std::size_t b : order) {
      if (excess <= 0.0) break;
      const double take = std::min(excess, plan.flow(a, b));
      plan.flow(a, b) -= take;
      excess -= take;
    }
    if (excess > 1e-9 * std::max(1.0, inst.total_demand())) {
      throw InternalError("InternalAccounting",
                          "excess remained at demand node " + std::to_string(a) +
                              " after pushback");
    }
  }

  // Step 3: saturate every supply column from leftover demand capacity,
  // cheapest edges first.
  std::vector<double> row_slack(na);
  for (std::size_t a = 0; a < na; ++a) {
    double row = 0.0;
    for (std::size_t b = 0; b < nb; ++b) row += plan.flow(a, b);
    row_slack[a] = std::max(0.0, inst.demands[a] - row);
  }
  std::vector<std::size_t> demand_order(na);
  for (std::size_t b = 0; b < nb; ++b) {
    double col = 0.0;
    for (std::size_t a = 0; a < na; ++a) col += plan.flow(a, b);
    double leftover = inst.supplies[b] - col;
    if (leftover <= 0.0) continue;

    for (std::size_t a = 0; a < na; ++a) demand_order[a] = a;
    std::stable_sort(demand_order.begin(), demand_order.end(),
                     [&](std::size_t x, std::size_t y) {
                       return inst.costs(x, b) < inst.costs(y, b);
                     });
    for (std::size_t a : demand_order) {
      if (leftover <= 0.0) break;
      const double take = std::min(leftover, row_slack[a]);
      if (take <= 0.0) continue;
      plan.flow(a, b) += take;
      row_slack[a] -= take;
      leftover -= take;
    }
    if (leftover > 1e-9 * std::max(1.0, inst.total_supply())) {
      throw InternalError("InternalAccounting",
                          "supply node " + std::to_string(b) +
                              " could not be saturated from leftover demand");
    }
  }

  plan.tag = PlanTag::Maximum;
  return plan;
}

}  // namespace otplan
