#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "otplan/mat.hpp"

namespace otplan {

// Error carrying a stable machine-readable code alongside the message.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& message)
      : std::runtime_error(code + ": " + message), code_(std::move(code)) {}
  const std::string& code() const { return code_; }

 private:
  std::string code_;
};

// Rejected input: bad instance data, bad configuration, unusable file.
class ValidationError : public Error {
  using Error::Error;
};

// Violated solver invariant. Never caused by input; indicates a bug.
class InternalError : public Error {
  using Error::Error;
};

// A transportation instance: demands d_a over A, supplies s_b over B and a
// dense |A| x |B| non-negative cost matrix, with total supply <= total demand.
struct TransportInstance {
  std::vector<double> demands;
  std::vector<double> supplies;
  Mat<double> costs;

  std::size_t num_demands() const { return demands.size(); }
  std::size_t num_supplies() const { return supplies.size(); }
  std::size_t num_nodes() const { return demands.size() + supplies.size(); }

  double total_demand() const;
  double total_supply() const;
  double max_cost() const;
};

enum class PlanTag { Raw, Feasible, Maximum };

// Non-negative mass assignment over the edges of an instance.
struct TransportPlan {
  Mat<double> flow;
  PlanTag tag = PlanTag::Raw;
};

struct SolveConfig {
  double delta = 0.1;
  double epsilon = 0.5;
  bool debug_assertions = false;
  std::uint64_t seed = 0;

  double delta_prime() const { return (1.0 - epsilon) * delta; }
};

struct StageTimings {
  double scale_ms = 0.0;
  double search_ms = 0.0;
  double dfs_ms = 0.0;
  double augment_ms = 0.0;
  double recover_ms = 0.0;
  double total_ms = 0.0;
};

// Per-solve counters. The bound fields are fixed by the instance and config;
// the rest accumulate while the solver runs.
struct RunStats {
  std::int64_t phases = 0;
  std::int64_t paths = 0;
  std::int64_t sum_path_edges = 0;
  std::int64_t sum_half_ceil = 0;
  std::int64_t phase_bound = 0;
  std::int64_t path_bound = 0;
  std::int64_t dijkstra_edge_visits = 0;
  std::int64_t dfs_edge_visits = 0;
  std::int64_t augment_edge_updates = 0;
  StageTimings timings;
};

// Throws ValidationError (NegativeValue, SupplyExceedsDemand,
// DimensionMismatch) unless every instance invariant holds.
const TransportInstance& validate_instance(const TransportInstance& inst);

// Total cost of a plan: sum over edges of flow * cost.
double plan_cost(const TransportInstance& inst, const TransportPlan& plan);

enum class PlanClass { Infeasible, Feasible, Maximum };

// Feasible: marginals within tol of the capacities. Maximum: additionally
// every supply column is saturated within tol.
PlanClass classify_plan(const TransportInstance& inst, const TransportPlan& plan,
                        double tol);

// Default feasibility tolerance; recovery divides by the mass scale, so the
// tolerance tracks the total demand.
double default_feasibility_tol(const TransportInstance& inst);

}  // namespace otplan
