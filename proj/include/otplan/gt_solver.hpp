#pragma once

#include <cstdint>
#include <vector>

#include "otplan/core.hpp"
#include "otplan/scaling.hpp"

namespace otplan {

// floor(2c / delta_prime), with the floating-point quotient repaired so that
// exact multiples land on the exact integer. Throws OverflowRisk past the
// 62-bit guard.
std::int64_t scaled_cost(double cost, double delta_prime);

enum class EdgeDir { Forward, Backward };

struct PathEdge {
  std::size_t demand;
  std::size_t supply;
  EdgeDir dir;
};

// Residual path from a free supply node to a free demand node. Edges
// alternate directions; the first and last are forward.
struct AugmentingPath {
  std::vector<PathEdge> edges;
  std::int64_t bottleneck = 0;  // set by augment()
};

// Mutable state of one scaled solve: integer flow, integer duals, marginals,
// and the per-phase admissible-graph bookkeeping used by the partial DFS.
struct SolverState {
  std::vector<std::int64_t> int_demands;
  std::vector<std::int64_t> int_supplies;
  Mat<std::int64_t> scaled_costs;
  std::int64_t cost_ceiling = 0;  // max scaled cost entry
  std::int64_t total_supply = 0;

  Mat<std::int64_t> flow;
  std::vector<std::int64_t> dual_demand;
  std::vector<std::int64_t> dual_supply;
  std::vector<std::int64_t> demand_filled;
  std::vector<std::int64_t> supply_used;
  std::int64_t total_shipped = 0;

  bool debug_checks = false;

  // Admissible graph for the current phase. Adjacency lists hold the
  // zero-slack residual edges found right after the Hungarian search; the
  // arc cursors implement edge deletion, the dead flags vertex deletion.
  std::vector<std::vector<std::uint32_t>> admissible_from_supply;
  std::vector<std::vector<std::uint32_t>> admissible_from_demand;
  std::vector<std::size_t> arc_supply;
  std::vector<std::size_t> arc_demand;
  std::vector<char> dead_demand;
  std::vector<char> dead_supply;

  std::size_t num_demands() const { return int_demands.size(); }
  std::size_t num_supplies() const { return int_supplies.size(); }

  bool demand_free(std::size_t a) const { return demand_filled[a] < int_demands[a]; }
  bool supply_free(std::size_t b) const { return supply_used[b] < int_supplies[b]; }

  std::int64_t edge_capacity(std::size_t a, std::size_t b) const {
    return std::min(int_demands[a], int_supplies[b]);
  }
  bool forward_exists(std::size_t a, std::size_t b) const {
    return flow(a, b) < edge_capacity(a, b);
  }
  bool backward_exists(std::size_t a, std::size_t b) const { return flow(a, b) > 0; }
};

// Fresh state: zero flow, zero duals. The real-cost variant scales the cost
// matrix through scaled_cost(); the integer variant takes scaled costs as-is.
SolverState make_solver_state(const ScaledInstance& scaled, const Mat<double>& costs);
SolverState make_solver_state(std::vector<std::int64_t> int_demands,
                              std::vector<std::int64_t> int_supplies,
                              Mat<std::int64_t> scaled_costs);

// Slack of a residual edge. Forward: c + 1 - y(a) - y(b). Backward:
// y(a) + y(b) - c. Throws NoSuchResidualEdge when the edge is absent in the
// queried direction.
std::int64_t slack(const SolverState& state, std::size_t a, std::size_t b, EdgeDir dir);

struct SearchResult {
  std::vector<std::int64_t> dist_demand;
  std::vector<std::int64_t> dist_supply;
  std::int64_t dist_sink = 0;
};

// One Hungarian search: Dijkstra over slacks from a virtual source attached
// to the free supply nodes, then the dual adjustment for every vertex closer
// than the sink. Afterwards at least one admissible augmenting path exists.
// Distances are reported as computed; vertices at or beyond the sink
// distance may be unsettled and only their lower bound matters.
SearchResult hungarian_search(SolverState& state, RunStats* stats = nullptr);

// One partial-DFS pass over the admissible graph: finds augmenting paths
// from the free supply nodes, applies each immediately, and deletes what the
// searches touched. On return no admissible augmenting path remains.
std::vector<AugmentingPath> partial_dfs_phase(SolverState& state, RunStats* stats = nullptr,
                                              double* augment_ms = nullptr);

// Pushes the bottleneck amount along the path and updates flow, marginals
// and free sets. Interior marginals are untouched by construction.
void augment(SolverState& state, AugmentingPath& path, RunStats* stats = nullptr);

// Full post-phase scan: both dual feasibility inequalities, demand duals
// <= 0 with free demand duals == 0, free supply duals within the ceiling,
// marginal consistency, and (via an independent BFS over zero-slack residual
// edges) the absence of admissible augmenting paths.
void check_phase_invariants(const SolverState& state);

struct ScaledSolution {
  IntegerPlan plan;
  std::vector<std::int64_t> dual_demand;
  std::vector<std::int64_t> dual_supply;
  RunStats stats;
};

// Runs phases until the integer plan is maximum. The result is 1-feasible,
// satisfies the demand-side dual condition, and uses at most
// floor(2C/delta') + 1 phases.
ScaledSolution solve_scaled(const ScaledInstance& scaled, const Mat<double>& costs,
                            const SolveConfig& cfg);
ScaledSolution solve_scaled(std::vector<std::int64_t> int_demands,
                            std::vector<std::int64_t> int_supplies,
                            Mat<std::int64_t> scaled_costs, const SolveConfig& cfg);

}  // namespace otplan
