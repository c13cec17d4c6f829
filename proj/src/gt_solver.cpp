#include "otplan/gt_solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>

namespace otplan {

namespace {

constexpr std::int64_t kDistInf = std::numeric_limits<std::int64_t>::max() / 4;
constexpr double kInt62 = 4.611686018427388e18;

double ms_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                   start)
      .count();
}

}  // namespace

std::int64_t scaled_cost(double cost, double delta_prime) {
  if (!(cost >= 0.0) || !(delta_prime > 0.0)) {
    throw ValidationError("NegativeValue", "scaled_cost needs cost >= 0 and delta' > 0");
  }
  const double ratio = 2.0 * cost / delta_prime;
  if (ratio >= kInt62) {
    throw ValidationError("OverflowRisk", "scaled cost exceeds the 62-bit guard");
  }
  auto q = static_cast<std::int64_t>(std::floor(ratio));
  // The quotient can land one off when 2c is an exact multiple of delta'.
  while (static_cast<double>(q + 1) * delta_prime <= 2.0 * cost) ++q;
  while (q > 0 && static_cast<double>(q) * delta_prime > 2.0 * cost) --q;
  return q;
}

SolverState make_solver_state(std::vector<std::int64_t> int_demands,
                              std::vector<std::int64_t> int_supplies,
                              Mat<std::int64_t> scaled_costs) {
  SolverState st;
  st.int_demands = std::move(int_demands);
  st.int_supplies = std::move(int_supplies);
  st.scaled_costs = std::move(scaled_costs);
  const std::size_t na = st.int_demands.size();
  const std::size_t nb = st.int_supplies.size();
  if (st.scaled_costs.rows() != na || st.scaled_costs.cols() != nb || na == 0 || nb == 0) {
    throw ValidationError("DimensionMismatch", "scaled cost shape does not match masses");
  }
  for (std::int64_t c : st.scaled_costs.data()) {
    if (c < 0) throw ValidationError("NegativeValue", "scaled costs must be non-negative");
    st.cost_ceiling = std::max(st.cost_ceiling, c);
  }
  st.total_supply =
      std::accumulate(st.int_supplies.begin(), st.int_supplies.end(), std::int64_t{0});

  st.flow = Mat<std::int64_t>(na, nb, 0);
  st.dual_demand.assign(na, 0);
  st.dual_supply.assign(nb, 0);
  st.demand_filled.assign(na, 0);
  st.supply_used.assign(nb, 0);

  st.admissible_from_supply.resize(nb);
  st.admissible_from_demand.resize(na);
  st.arc_supply.assign(nb, 0);
  st.arc_demand.assign(na, 0);
  st.dead_demand.assign(na, 0);
  st.dead_supply.assign(nb, 0);
  return st;
}

SolverState make_solver_state(const ScaledInstance& scaled, const Mat<double>& costs) {
  Mat<std::int64_t> cbar(costs.rows(), costs.cols(), 0);
  for (std::size_t i = 0; i < costs.rows(); ++i) {
    for (std::size_t j = 0; j < costs.cols(); ++j) {
      cbar(i, j) = scaled_cost(costs(i, j), scaled.delta_prime);
    }
  }
  return make_solver_state(scaled.int_demands, scaled.int_supplies, std::move(cbar));
}

std::int64_t slack(const SolverState& state, std::size_t a, std::size_t b, EdgeDir dir) {
  if (dir == EdgeDir::Forward) {
    if (!state.forward_exists(a, b)) {
      throw InternalError("NoSuchResidualEdge", "no forward residual edge for this pair");
    }
    return state.scaled_costs(a, b) + 1 - state.dual_demand[a] - state.dual_supply[b];
  }
  if (!state.backward_exists(a, b)) {
    throw InternalError("NoSuchResidualEdge", "no backward residual edge for this pair");
  }
  return state.dual_demand[a] + state.dual_supply[b] - state.scaled_costs(a, b);
}

SearchResult hungarian_search(SolverState& state, RunStats* stats) {
  const std::size_t na = state.num_demands();
  const std::size_t nb = state.num_supplies();

  SearchResult res;
  res.dist_demand.assign(na, kDistInf);
  res.dist_supply.assign(nb, kDistInf);
  res.dist_sink = kDistInf;

  std::vector<char> settled_demand(na, 0), settled_supply(nb, 0);
  bool any_free_supply = false;
  for (std::size_t b = 0; b < nb; ++b) {
    if (state.supply_free(b)) {
      res.dist_supply[b] = 0;  // zero-weight edge from the virtual source
      any_free_supply = true;
    }
  }
  if (!any_free_supply) {
    throw InternalError("SinkUnreachable", "Hungarian search started with no free supply");
  }

  // Dense Dijkstra; on distance ties the lower vertex index settles first,
  // demand nodes before supply nodes. Stops once every vertex strictly
  // closer than the sink is settled.
  while (true) {
    std::int64_t best = kDistInf;
    std::size_t best_idx = 0;
    bool best_is_demand = false, found = false;
    for (std::size_t a = 0; a < na; ++a) {
      if (!settled_demand[a] && res.dist_demand[a] < best) {
        best = res.dist_demand[a];
        best_idx = a;
        best_is_demand = true;
        found = true;
      }
    }
    for (std::size_t b = 0; b < nb; ++b) {
      if (!settled_supply[b] && res.dist_supply[b] < best) {
        best = res.dist_supply[b];
        best_idx = b;
        best_is_demand = false;
        found = true;
      }
    }
    if (!found || best >= res.dist_sink) break;

    if (best_is_demand) {
      const std::size_t a = best_idx;
      settled_demand[a] = 1;
      if (state.demand_free(a)) res.dist_sink = std::min(res.dist_sink, best);
      for (std::size_t b = 0; b < nb; ++b) {
        if (settled_supply[b] || !state.backward_exists(a, b)) continue;
        if (stats) ++stats->dijkstra_edge_visits;
        const std::int64_t w =
            state.dual_demand[a] + state.dual_supply[b] - state.scaled_costs(a, b);
        if (best + w < res.dist_supply[b]) res.dist_supply[b] = best + w;
      }
    } else {
      const std::size_t b = best_idx;
      settled_supply[b] = 1;
      for (std::size_t a = 0; a < na; ++a) {
        if (settled_demand[a] || !state.forward_exists(a, b)) continue;
        if (stats) ++stats->dijkstra_edge_visits;
        const std::int64_t w =
            state.scaled_costs(a, b) + 1 - state.dual_demand[a] - state.dual_supply[b];
        if (best + w < res.dist_demand[a]) res.dist_demand[a] = best + w;
      }
    }
  }

  if (res.dist_sink >= kDistInf) {
    throw InternalError("SinkUnreachable",
                        "no residual augmenting path although free supply remains");
  }
  if (state.debug_checks && res.dist_sink < 1) {
    throw InternalError("AdmissiblePathAtPhaseStart",
                        "previous phase left an admissible augmenting path");
  }

  for (std::size_t a = 0; a < na; ++a) {
    if (res.dist_demand[a] < res.dist_sink) {
      state.dual_demand[a] -= res.dist_sink - res.dist_demand[a];
    }
  }
  for (std::size_t b = 0; b < nb; ++b) {
    if (res.dist_supply[b] < res.dist_sink) {
      state.dual_supply[b] += res.dist_sink - res.dist_supply[b];
    }
  }
  return res;
}

void augment(SolverState& state, AugmentingPath& path, RunStats* stats) {
  if (path.edges.empty()) {
    throw InternalError("CapacityViolation", "empty augmenting path");
  }
  const PathEdge& first = path.edges.front();
  const PathEdge& last = path.edges.back();
  if (first.dir != EdgeDir::Forward || last.dir != EdgeDir::Forward) {
    throw InternalError("CapacityViolation", "augmenting path must start and end forward");
  }
  const std::size_t source_supply = first.supply;
  const std::size_t target_demand = last.demand;

  std::int64_t bottleneck = std::min(
      state.int_supplies[source_supply] - state.supply_used[source_supply],
      state.int_demands[target_demand] - state.demand_filled[target_demand]);
  for (const PathEdge& e : path.edges) {
    const std::int64_t cap = e.dir == EdgeDir::Forward
                                 ? state.edge_capacity(e.demand, e.supply) -
                                       state.flow(e.demand, e.supply)
                                 : state.flow(e.demand, e.supply);
    bottleneck = std::min(bottleneck, cap);
    if (state.debug_checks && slack(state, e.demand, e.supply, e.dir) != 0) {
      throw InternalError("CapacityViolation", "augmenting path edge is not admissible");
    }
  }
  if (bottleneck < 1) {
    throw InternalError("CapacityViolation", "augmenting path has no residual capacity");
  }

  for (const PathEdge& e : path.edges) {
    auto& f = state.flow(e.demand, e.supply);
    f += e.dir == EdgeDir::Forward ? bottleneck : -bottleneck;
    if (f < 0 || f > state.edge_capacity(e.demand, e.supply)) {
      throw InternalError("CapacityViolation", "flow left its capacity bounds");
    }
  }
  state.supply_used[source_supply] += bottleneck;
  state.demand_filled[target_demand] += bottleneck;
  state.total_shipped += bottleneck;
  path.bottleneck = bottleneck;

  if (stats) {
    const auto len = static_cast<std::int64_t>(path.edges.size());
    ++stats->paths;
    stats->sum_path_edges += len;
    stats->sum_half_ceil += (len + 1) / 2;
    stats->augment_edge_updates += len;
  }
}

namespace {

// Rebuilds the admissible adjacency of zero-slack residual edges, ascending
// neighbor index on both sides.
void build_admissible_graph(SolverState& st) {
  const std::size_t na = st.num_demands();
  const std::size_t nb = st.num_supplies();
  for (std::size_t b = 0; b < nb; ++b) {
    auto& lst = st.admissible_from_supply[b];
    lst.clear();
    for (std::size_t a = 0; a < na; ++a) {
      if (st.forward_exists(a, b) &&
          st.scaled_costs(a, b) + 1 - st.dual_demand[a] - st.dual_supply[b] == 0) {
        lst.push_back(static_cast<std::uint32_t>(a));
      }
    }
  }
  for (std::size_t a = 0; a < na; ++a) {
    auto& lst = st.admissible_from_demand[a];
    lst.clear();
    for (std::size_t b = 0; b < nb; ++b) {
      if (st.backward_exists(a, b) &&
          st.dual_demand[a] + st.dual_supply[b] - st.scaled_costs(a, b) == 0) {
        lst.push_back(static_cast<std::uint32_t>(b));
      }
    }
  }
  std::fill(st.arc_supply.begin(), st.arc_supply.end(), 0);
  std::fill(st.arc_demand.begin(), st.arc_demand.end(), 0);
  std::fill(st.dead_demand.begin(), st.dead_demand.end(), 0);
  std::fill(st.dead_supply.begin(), st.dead_supply.end(), 0);
}

struct DfsFrame {
  bool is_supply;
  std::uint32_t idx;
};

}  // namespace

std::vector<AugmentingPath> partial_dfs_phase(SolverState& state, RunStats* stats,
                                              double* augment_ms) {
  const std::size_t na = state.num_demands();
  const std::size_t nb = state.num_supplies();
  build_admissible_graph(state);

  std::vector<AugmentingPath> applied;
  std::vector<DfsFrame> stack;
  std::vector<DfsFrame> visited;
  std::vector<std::uint32_t> seen_demand(na, 0), seen_supply(nb, 0);
  std::uint32_t stamp = 0;

  // One DFS run from source b over the surviving admissible graph. Returns
  // true when a path was found and applied. Edges the search walks past are
  // gone for the rest of the phase (the arc cursor moves), except the edges
  // of the found path, which are re-checked against the updated flow on the
  // next visit. A run that exhausts without a path kills every vertex it saw.
  auto run_dfs = [&](std::uint32_t source) -> bool {
    ++stamp;
    stack.clear();
    visited.clear();
    stack.push_back({true, source});
    visited.push_back({true, source});
    seen_supply[source] = stamp;

    while (!stack.empty()) {
      const DfsFrame top = stack.back();
      bool descended = false;
      if (top.is_supply) {
        const std::uint32_t b = top.idx;
        auto& lst = state.admissible_from_supply[b];
        auto& cursor = state.arc_supply[b];
        while (cursor < lst.size()) {
          const std::uint32_t a = lst[cursor];
          if (stats) ++stats->dfs_edge_visits;
          if (state.dead_demand[a] || seen_demand[a] == stamp ||
              !state.forward_exists(a, b)) {
            ++cursor;
            continue;
          }
          seen_demand[a] = stamp;
          visited.push_back({false, a});
          stack.push_back({false, a});
          descended = true;
          break;  // cursor stays on this edge; it may belong to the path
        }
      } else {
        const std::uint32_t a = top.idx;
        if (state.demand_free(a)) {
          // Free demand node reached: the stack is the augmenting path.
          AugmentingPath path;
          path.edges.reserve(stack.size() - 1);
          for (std::size_t i = 0; i + 1 < stack.size(); ++i) {
            const DfsFrame& u = stack[i];
            const DfsFrame& v = stack[i + 1];
            path.edges.push_back(u.is_supply
                                     ? PathEdge{v.idx, u.idx, EdgeDir::Forward}
                                     : PathEdge{u.idx, v.idx, EdgeDir::Backward});
          }
          if (augment_ms) {
            const auto t0 = std::chrono::steady_clock::now();
            augment(state, path, stats);
            *augment_ms += ms_since(t0);
          } else {
            augment(state, path, stats);
          }
          applied.push_back(std::move(path));
          return true;
        }
        auto& lst = state.admissible_from_demand[a];
        auto& cursor = state.arc_demand[a];
        while (cursor < lst.size()) {
          const std::uint32_t b = lst[cursor];
          if (stats) ++stats->dfs_edge_visits;
          if (state.dead_supply[b] || seen_supply[b] == stamp ||
              !state.backward_exists(a, b)) {
            ++cursor;
            continue;
          }
          seen_supply[b] = stamp;
          visited.push_back({true, b});
          stack.push_back({true, b});
          descended = true;
          break;
        }
      }
      if (!descended) stack.pop_back();
    }

    for (const DfsFrame& f : visited) {
      if (f.is_supply) {
        state.dead_supply[f.idx] = 1;
      } else {
        state.dead_demand[f.idx] = 1;
      }
    }
    return false;
  };

  // A supply node never regains freeness within a phase, so one ascending
  // sweep over the sources is exactly the free-supply worklist.
  for (std::uint32_t b = 0; b < nb; ++b) {
    while (!state.dead_supply[b] && state.supply_free(b)) {
      if (!run_dfs(b)) break;
    }
  }
  return applied;
}

void check_phase_invariants(const SolverState& state) {
  const std::size_t na = state.num_demands();
  const std::size_t nb = state.num_supplies();

  std::vector<std::int64_t> row_sum(na, 0), col_sum(nb, 0);
  for (std::size_t a = 0; a < na; ++a) {
    for (std::size_t b = 0; b < nb; ++b) {
      const std::int64_t f = state.flow(a, b);
      if (f < 0 || f > state.edge_capacity(a, b)) {
        throw InternalError("CapacityViolation", "a flow entry left its bounds");
      }
      row_sum[a] += f;
      col_sum[b] += f;
      const std::int64_t y = state.dual_demand[a] + state.dual_supply[b];
      if (f < state.edge_capacity(a, b) && y > state.scaled_costs(a, b) + 1) {
        throw InternalError("I1Violation", "unsaturated edge violates y(a)+y(b) <= c+1");
      }
      if (f > 0 && y < state.scaled_costs(a, b)) {
        throw InternalError("I1Violation", "carrying edge violates y(a)+y(b) >= c");
      }
    }
  }
  std::int64_t shipped = 0;
  for (std::size_t a = 0; a < na; ++a) {
    shipped += row_sum[a];
    if (row_sum[a] != state.demand_filled[a] || row_sum[a] > state.int_demands[a]) {
      throw InternalError("CapacityViolation", "demand marginal bookkeeping is off");
    }
    if (state.dual_demand[a] > 0) {
      throw InternalError("ConditionCViolation", "a demand dual is positive");
    }
    if (state.demand_free(a) && state.dual_demand[a] != 0) {
      throw InternalError("ConditionCViolation", "a free demand node has nonzero dual");
    }
  }
  for (std::size_t b = 0; b < nb; ++b) {
    if (col_sum[b] != state.supply_used[b] || col_sum[b] > state.int_supplies[b]) {
      throw InternalError("CapacityViolation", "supply marginal bookkeeping is off");
    }
    if (state.supply_free(b) && state.dual_supply[b] > state.cost_ceiling + 1) {
      throw InternalError("FreeSupplyDualBound",
                          "a free supply dual exceeds the cost ceiling + 1");
    }
  }
  if (shipped != state.total_shipped) {
    throw InternalError("CapacityViolation", "shipped-total bookkeeping is off");
  }

  // Independent reachability check: BFS over zero-slack residual edges from
  // the free supply nodes must not reach a free demand node.
  std::vector<char> reach_demand(na, 0), reach_supply(nb, 0);
  std::deque<DfsFrame> queue;
  for (std::size_t b = 0; b < nb; ++b) {
    if (state.supply_free(b)) {
      reach_supply[b] = 1;
      queue.push_back({true, static_cast<std::uint32_t>(b)});
    }
  }
  while (!queue.empty()) {
    const DfsFrame f = queue.front();
    queue.pop_front();
    if (f.is_supply) {
      for (std::size_t a = 0; a < na; ++a) {
        if (reach_demand[a] || !state.forward_exists(a, f.idx)) continue;
        if (slack(state, a, f.idx, EdgeDir::Forward) != 0) continue;
        if (state.demand_free(a)) {
          throw InternalError("AdmissiblePathRemains",
                              "phase ended with an admissible augmenting path");
        }
        reach_demand[a] = 1;
        queue.push_back({false, static_cast<std::uint32_t>(a)});
      }
    } else {
      for (std::size_t b = 0; b < nb; ++b) {
        if (reach_supply[b] || !state.backward_exists(f.idx, b)) continue;
        if (slack(state, f.idx, b, EdgeDir::Backward) != 0) continue;
        reach_supply[b] = 1;
        queue.push_back({true, static_cast<std::uint32_t>(b)});
      }
    }
  }
}

ScaledSolution solve_scaled(std::vector<std::int64_t> int_demands,
                            std::vector<std::int64_t> int_supplies,
                            Mat<std::int64_t> scaled_costs, const SolveConfig& cfg) {
  SolverState state = make_solver_state(std::move(int_demands), std::move(int_supplies),
                                        std::move(scaled_costs));
  state.debug_checks = cfg.debug_assertions;

  const std::int64_t total_demand = std::accumulate(
      state.int_demands.begin(), state.int_demands.end(), std::int64_t{0});
  if (total_demand < state.total_supply) {
    throw ValidationError("SupplyExceedsDemand",
                          "integer supply exceeds integer demand");
  }

  ScaledSolution sol;
  sol.stats.phase_bound = state.cost_ceiling + 1;
  if (static_cast<double>(state.total_supply) *
          static_cast<double>(sol.stats.phase_bound) >=
      kInt62) {
    throw ValidationError("OverflowRisk", "path-length bound exceeds the 62-bit guard");
  }
  sol.stats.path_bound = state.total_supply * sol.stats.phase_bound;

  const auto t_start = std::chrono::steady_clock::now();
  while (state.total_shipped < state.total_supply) {
    ++sol.stats.phases;
    if (sol.stats.phases > sol.stats.phase_bound) {
      throw InternalError("PhaseBoundExceeded",
                          "phase count exceeded floor(2C/delta') + 1");
    }

    const auto t0 = std::chrono::steady_clock::now();
    hungarian_search(state, &sol.stats);
    const auto t1 = std::chrono::steady_clock::now();
    double augment_time = 0.0;
    const auto paths = partial_dfs_phase(state, &sol.stats, &augment_time);
    if (paths.empty()) {
      throw InternalError("NoPathInPhase", "partial DFS produced no augmenting path");
    }
    sol.stats.timings.search_ms +=
        std::chrono::duration<double, std::milli>(t1 - t0).count();
    sol.stats.timings.dfs_ms += ms_since(t1) - augment_time;
    sol.stats.timings.augment_ms += augment_time;

    if (state.debug_checks) check_phase_invariants(state);
  }
  if (state.total_shipped != state.total_supply) {
    throw InternalError("CapacityViolation", "terminated without an exact maximum plan");
  }
  if (sol.stats.sum_half_ceil > sol.stats.path_bound) {
    throw InternalError("PathBoundExceeded",
                        "total forward path edges exceeded the supply-times-phase bound");
  }
  sol.stats.timings.total_ms = ms_since(t_start);

  sol.plan.flow = std::move(state.flow);
  sol.dual_demand = std::move(state.dual_demand);
  sol.dual_supply = std::move(state.dual_supply);
  return sol;
}

ScaledSolution solve_scaled(const ScaledInstance& scaled, const Mat<double>& costs,
                            const SolveConfig& cfg) {
  Mat<std::int64_t> cbar(costs.rows(), costs.cols(), 0);
  for (std::size_t i = 0; i < costs.rows(); ++i) {
    for (std::size_t j = 0; j < costs.cols(); ++j) {
      cbar(i, j) = scaled_cost(costs(i, j), scaled.delta_prime);
    }
  }
  return solve_scaled(scaled.int_demands, scaled.int_supplies, std::move(cbar), cfg);
}

}  // namespace otplan
