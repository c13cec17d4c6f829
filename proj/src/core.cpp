#include "otplan/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace otplan {

double TransportInstance::total_demand() const {
  return std::accumulate(demands.begin(), demands.end(), 0.0);
}

double TransportInstance::total_supply() const {
  return std::accumulate(supplies.begin(), supplies.end(), 0.0);
}

double TransportInstance::max_cost() const {
  double c = 0.0;
  for (double v : costs.data()) c = std::max(c, v);
  return c;
}

const TransportInstance& validate_instance(const TransportInstance& inst) {
  if (inst.demands.empty() || inst.supplies.empty()) {
    throw ValidationError("DimensionMismatch",
                          "instance needs at least one demand and one supply node");
  }
  if (inst.costs.rows() != inst.demands.size() ||
      inst.costs.cols() != inst.supplies.size()) {
    throw ValidationError(
        "DimensionMismatch",
        "cost matrix is " + std::to_string(inst.costs.rows()) + "x" +
            std::to_string(inst.costs.cols()) + " but instance has " +
            std::to_string(inst.demands.size()) + " demands and " +
            std::to_string(inst.supplies.size()) + " supplies");
  }
  for (std::size_t a = 0; a < inst.demands.size(); ++a) {
    if (!(inst.demands[a] >= 0.0) || !std::isfinite(inst.demands[a])) {
      throw ValidationError("NegativeValue",
                            "demand " + std::to_string(a) + " is not a non-negative number");
    }
  }
  for (std::size_t b = 0; b < inst.supplies.size(); ++b) {
    if (!(inst.supplies[b] >= 0.0) || !std::isfinite(inst.supplies[b])) {
      throw ValidationError("NegativeValue",
                            "supply " + std::to_string(b) + " is not a non-negative number");
    }
  }
  for (double c : inst.costs.data()) {
    if (!(c >= 0.0) || !std::isfinite(c)) {
      throw ValidationError("NegativeValue", "cost entry is not a non-negative number");
    }
  }
  const double td = inst.total_demand();
  const double ts = inst.total_supply();
  if (ts > td + 1e-12 * td) {
    throw ValidationError("SupplyExceedsDemand",
                          "total supply " + std::to_string(ts) +
                              " exceeds total demand " + std::to_string(td));
  }
  return inst;
}

double plan_cost(const TransportInstance& inst, const TransportPlan& plan) {
  if (plan.flow.rows() != inst.demands.size() ||
      plan.flow.cols() != inst.supplies.size()) {
    throw ValidationError("DimensionMismatch", "plan shape does not match instance");
  }
  double total = 0.0;
  for (std::size_t a = 0; a < plan.flow.rows(); ++a) {
    for (std::size_t b = 0; b < plan.flow.cols(); ++b) {
      total += plan.flow(a, b) * inst.costs(a, b);
    }
  }
  return total;
}

PlanClass classify_plan(const TransportInstance& inst, const TransportPlan& plan,
                        double tol) {
  if (plan.flow.rows() != inst.demands.size() ||
      plan.flow.cols() != inst.supplies.size()) {
    return PlanClass::Infeasible;
  }
  for (double v : plan.flow.data()) {
    if (v < -tol) return PlanClass::Infeasible;
  }
  for (std::size_t a = 0; a < plan.flow.rows(); ++a) {
    double row = 0.0;
    for (std::size_t b = 0; b < plan.flow.cols(); ++b) row += plan.flow(a, b);
    if (row > inst.demands[a] + tol) return PlanClass::Infeasible;
  }
  bool saturated = true;
  for (std::size_t b = 0; b < plan.flow.cols(); ++b) {
    double col = 0.0;
    for (std::size_t a = 0; a < plan.flow.rows(); ++a) col += plan.flow(a, b);
    if (col > inst.supplies[b] + tol) return PlanClass::Infeasible;
    if (col < inst.supplies[b] - tol) saturated = false;
  }
  return saturated ? PlanClass::Maximum : PlanClass::Feasible;
}

double default_feasibility_tol(const TransportInstance& inst) {
  return 1e-9 * std::max(1.0, inst.total_demand());
}

}  // namespace otplan
