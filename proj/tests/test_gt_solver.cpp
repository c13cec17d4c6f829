#include <limits>
#include <random>

#include "doctest.h"
#include "otplan/gt_solver.hpp"
#include "otplan/oracle.hpp"

using namespace otplan;

namespace {

constexpr std::int64_t kInf = std::numeric_limits<std::int64_t>::max() / 4;

struct BfDistances {
  std::vector<std::int64_t> demand;
  std::vector<std::int64_t> supply;
  std::int64_t sink = kInf;
};

// Independent Bellman-Ford over the same augmented residual network the
// Hungarian search uses: relax every residual edge until fixpoint.
BfDistances bellman_ford(const SolverState& st) {
  const std::size_t na = st.num_demands();
  const std::size_t nb = st.num_supplies();
  BfDistances d;
  d.demand.assign(na, kInf);
  d.supply.assign(nb, kInf);
  for (std::size_t b = 0; b < nb; ++b) {
    if (st.supply_free(b)) d.supply[b] = 0;
  }
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t b = 0; b < nb; ++b) {
      if (d.supply[b] >= kInf) continue;
      for (std::size_t a = 0; a < na; ++a) {
        if (!st.forward_exists(a, b)) continue;
        const std::int64_t cand = d.supply[b] + slack(st, a, b, EdgeDir::Forward);
        if (cand < d.demand[a]) {
          d.demand[a] = cand;
          changed = true;
        }
      }
    }
    for (std::size_t a = 0; a < na; ++a) {
      if (d.demand[a] >= kInf) continue;
      if (st.demand_free(a) && d.demand[a] < d.sink) {
        d.sink = d.demand[a];
        changed = true;
      }
      for (std::size_t b = 0; b < nb; ++b) {
        if (!st.backward_exists(a, b)) continue;
        const std::int64_t cand = d.demand[a] + slack(st, a, b, EdgeDir::Backward);
        if (cand < d.supply[b]) {
          d.supply[b] = cand;
          changed = true;
        }
      }
    }
  }
  return d;
}

SolverState two_demand_state() {
  // One free supply, two free demands, scaled costs 0 and 5.
  return make_solver_state({1, 1}, {1}, Mat<std::int64_t>::from_rows({{0}, {5}}));
}

}  // namespace

TEST_CASE("scaled_cost follows the floor definition") {
  CHECK(scaled_cost(0.0, 0.05) == 0);
  CHECK(scaled_cost(1.0, 0.05) == 40);    // exact multiple
  CHECK(scaled_cost(0.123, 0.05) == 4);   // floor(4.92)
  CHECK(scaled_cost(1.0, 0.0005) == 4000);
  CHECK(scaled_cost(1.0, 0.05000000000000000277555756156289135) == 40);
  CHECK_THROWS_AS(scaled_cost(1.0, 1e-20), ValidationError);
  CHECK_THROWS_AS(scaled_cost(-1.0, 0.5), ValidationError);
}

TEST_CASE("slack on fresh and adjusted states") {
  auto st = make_solver_state({1}, {1}, Mat<std::int64_t>::from_rows({{0}}));
  CHECK(slack(st, 0, 0, EdgeDir::Forward) == 1);
  CHECK_THROWS_AS(slack(st, 0, 0, EdgeDir::Backward), InternalError);

  st.dual_supply[0] = 1;  // y(b) = c + 1 makes the edge admissible
  CHECK(slack(st, 0, 0, EdgeDir::Forward) == 0);
}

TEST_CASE("hungarian_search on the one-supply two-demand example") {
  auto st = two_demand_state();
  const auto res = hungarian_search(st);
  CHECK(res.dist_supply[0] == 0);
  CHECK(res.dist_demand[0] == 1);
  CHECK(res.dist_demand[1] == 6);
  CHECK(res.dist_sink == 1);
  CHECK(st.dual_supply[0] == 1);
  CHECK(st.dual_demand[0] == 0);  // at sink distance, so untouched
  CHECK(st.dual_demand[1] == 0);
  CHECK(slack(st, 0, 0, EdgeDir::Forward) == 0);
}

TEST_CASE("free demand duals never move in a search") {
  // Free demand nodes sit at distance >= sink distance by construction.
  std::mt19937_64 rng(37);
  std::uniform_int_distribution<std::int64_t> mass(1, 3), cost(0, 6);
  for (int trial = 0; trial < 25; ++trial) {
    Mat<std::int64_t> cbar(3, 3);
    for (auto& c : cbar.data()) c = cost(rng);
    auto st = make_solver_state({mass(rng), mass(rng), mass(rng)},
                                {mass(rng), mass(rng), mass(rng)}, cbar);
    hungarian_search(st);
    for (std::size_t a = 0; a < 3; ++a) {
      if (st.demand_free(a)) CHECK(st.dual_demand[a] == 0);
      CHECK(st.dual_demand[a] <= 0);
    }
  }
}

TEST_CASE("search distances agree with Bellman-Ford through a full solve") {
  std::mt19937_64 rng(41);
  std::uniform_int_distribution<std::int64_t> mass(1, 4), cost(0, 6);
  for (int trial = 0; trial < 30; ++trial) {
    Mat<std::int64_t> cbar(4, 4);
    for (auto& c : cbar.data()) c = cost(rng);
    std::vector<std::int64_t> demands(4), supplies(4);
    for (auto& d : demands) d = mass(rng) + 4;  // keeps demand above supply
    for (auto& s : supplies) s = mass(rng);
    auto st = make_solver_state(demands, supplies, cbar);
    st.debug_checks = true;

    int guard = 0;
    while (st.total_shipped < st.total_supply) {
      REQUIRE(++guard < 100);
      const auto expected = bellman_ford(st);
      const auto got = hungarian_search(st);
      CHECK(got.dist_sink == expected.sink);
      for (std::size_t a = 0; a < 4; ++a) {
        if (expected.demand[a] < expected.sink) {
          CHECK(got.dist_demand[a] == expected.demand[a]);
        } else {
          CHECK(got.dist_demand[a] >= expected.sink);
        }
      }
      for (std::size_t b = 0; b < 4; ++b) {
        if (expected.supply[b] < expected.sink) {
          CHECK(got.dist_supply[b] == expected.supply[b]);
        } else {
          CHECK(got.dist_supply[b] >= expected.sink);
        }
      }
      const auto paths = partial_dfs_phase(st);
      CHECK(!paths.empty());
      check_phase_invariants(st);
    }
  }
}

TEST_CASE("partial DFS applies the single admissible path") {
  auto st = two_demand_state();
  hungarian_search(st);
  const auto paths = partial_dfs_phase(st);
  REQUIRE(paths.size() == 1);
  REQUIRE(paths[0].edges.size() == 1);
  CHECK(paths[0].edges[0].demand == 0);
  CHECK(paths[0].edges[0].supply == 0);
  CHECK(paths[0].edges[0].dir == EdgeDir::Forward);
  CHECK(paths[0].bottleneck == 1);
  CHECK(st.flow(0, 0) == 1);
}

TEST_CASE("partial DFS routes two disjoint paths in one phase") {
  auto st = make_solver_state({1, 1}, {1, 1},
                              Mat<std::int64_t>::from_rows({{0, 5}, {5, 0}}));
  hungarian_search(st);
  const auto paths = partial_dfs_phase(st);
  REQUIRE(paths.size() == 2);
  CHECK(st.flow(0, 0) == 1);
  CHECK(st.flow(1, 1) == 1);
  CHECK(st.total_shipped == 2);
}

TEST_CASE("partial DFS never revisits vertices a failed search deleted") {
  // b0 only reaches the saturated demand a0 and must die with it; b1 then
  // skips a0 and routes to a1; b2 routes to a2.
  auto st = make_solver_state(
      {1, 1, 5}, {1, 1, 3},
      Mat<std::int64_t>::from_rows({{0, 0, 0}, {5, 0, 3}, {5, 5, 0}}));
  st.flow(0, 2) = 1;
  st.demand_filled[0] = 1;
  st.supply_used[2] = 1;
  st.total_shipped = 1;
  st.dual_supply = {1, 1, 1};
  st.dual_demand = {0, 0, 0};

  RunStats stats;
  const auto paths = partial_dfs_phase(st, &stats);
  REQUIRE(paths.size() == 2);
  CHECK(paths[0].edges.size() == 1);
  CHECK(paths[0].edges[0].demand == 1);
  CHECK(paths[0].edges[0].supply == 1);
  CHECK(paths[1].edges[0].demand == 2);
  CHECK(paths[1].edges[0].supply == 2);
  CHECK(paths[1].bottleneck == 2);
  CHECK(st.dead_supply[0] == 1);
  CHECK(st.dead_demand[0] == 1);
  CHECK(stats.dfs_edge_visits == 5);  // a dead a0 is skipped, not re-explored
}

TEST_CASE("augment pushes the bottleneck and updates the free sets") {
  auto st = make_solver_state({2}, {3}, Mat<std::int64_t>::from_rows({{0}}));
  st.dual_supply[0] = 1;
  st.debug_checks = true;
  AugmentingPath path;
  path.edges = {{0, 0, EdgeDir::Forward}};
  augment(st, path);
  CHECK(path.bottleneck == 2);  // min(3, 2, capacity 2)
  CHECK(st.flow(0, 0) == 2);
  CHECK(!st.demand_free(0));
  CHECK(st.supply_free(0));
  // The saturated forward edge flips; the fresh backward edge has slack 1.
  CHECK(slack(st, 0, 0, EdgeDir::Backward) == 1);
}

TEST_CASE("augment keeps interior marginals unchanged") {
  auto st = make_solver_state({1, 1}, {1, 1},
                              Mat<std::int64_t>::from_rows({{0, 1}, {5, 0}}));
  st.flow(0, 1) = 1;
  st.demand_filled[0] = 1;
  st.supply_used[1] = 1;
  st.total_shipped = 1;
  st.dual_supply = {1, 1};
  st.debug_checks = true;

  AugmentingPath path;
  path.edges = {{0, 0, EdgeDir::Forward},
                {0, 1, EdgeDir::Backward},
                {1, 1, EdgeDir::Forward}};
  augment(st, path);
  CHECK(path.bottleneck == 1);
  CHECK(st.flow(0, 0) == 1);
  CHECK(st.flow(0, 1) == 0);
  CHECK(st.flow(1, 1) == 1);
  CHECK(st.demand_filled[0] == 1);  // interior vertex untouched
  CHECK(st.supply_used[1] == 1);
  CHECK(st.total_shipped == 2);
}

TEST_CASE("augment rejects an empty path") {
  auto st = make_solver_state({1}, {1}, Mat<std::int64_t>::from_rows({{0}}));
  AugmentingPath path;
  CHECK_THROWS_AS(augment(st, path), InternalError);
}

TEST_CASE("solve_scaled trivial and enumerated examples") {
  SolveConfig cfg;
  const auto triv = solve_scaled({1}, {1}, Mat<std::int64_t>::from_rows({{0}}), cfg);
  CHECK(triv.stats.phases == 1);
  CHECK(triv.plan.flow(0, 0) == 1);

  const auto sol =
      solve_scaled({1, 1}, {2}, Mat<std::int64_t>::from_rows({{0}, {3}}), cfg);
  CHECK(sol.plan.flow(0, 0) == 1);
  CHECK(sol.plan.flow(1, 0) == 1);
  std::int64_t scaled_total = 0;
  for (std::size_t a = 0; a < 2; ++a) {
    scaled_total += sol.plan.flow(a, 0) * (a == 0 ? 0 : 3);
  }
  CHECK(scaled_total == 3);
  CHECK(brute_force_enumerate({1, 1}, {2}, Mat<std::int64_t>::from_rows({{0}, {3}})) ==
        3);
}

TEST_CASE("solve_scaled stays within one unit per supply of the exact optimum") {
  std::mt19937_64 rng(43);
  std::uniform_int_distribution<std::int64_t> mass(0, 3), cost(0, 9);
  std::uniform_int_distribution<std::size_t> size(1, 6);
  int solved = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t na = size(rng), nb = size(rng);
    std::vector<std::int64_t> demands(na), supplies(nb);
    for (auto& d : demands) d = mass(rng) + 1;
    for (auto& s : supplies) s = mass(rng);
    std::int64_t total_d = 0, total_s = 0;
    for (auto d : demands) total_d += d;
    for (auto s : supplies) total_s += s;
    if (total_s > total_d || total_s == 0) continue;
    Mat<std::int64_t> cbar(na, nb);
    for (auto& c : cbar.data()) c = cost(rng);

    SolveConfig cfg;
    cfg.debug_assertions = true;
    const auto sol = solve_scaled(demands, supplies, cbar, cfg);
    std::int64_t got = 0;
    for (std::size_t a = 0; a < na; ++a) {
      for (std::size_t b = 0; b < nb; ++b) got += sol.plan.flow(a, b) * cbar(a, b);
    }
    const auto [plan, best] = exact_transport_integer(demands, supplies, cbar);
    (void)plan;
    CHECK(got <= best + total_s);
    CHECK(sol.stats.phases <= sol.stats.phase_bound);
    CHECK(sol.stats.sum_half_ceil <= sol.stats.path_bound);
    ++solved;
  }
  CHECK(solved > 60);
}

TEST_CASE("solve_scaled is deterministic") {
  std::mt19937_64 rng(47);
  std::uniform_int_distribution<std::int64_t> mass(1, 5), cost(0, 12);
  Mat<std::int64_t> cbar(5, 4);
  for (auto& c : cbar.data()) c = cost(rng);
  std::vector<std::int64_t> demands(5), supplies(4);
  for (auto& d : demands) d = mass(rng) + 2;
  for (auto& s : supplies) s = mass(rng);

  SolveConfig cfg;
  const auto first = solve_scaled(demands, supplies, cbar, cfg);
  const auto second = solve_scaled(demands, supplies, cbar, cfg);
  CHECK(first.plan.flow == second.plan.flow);
  CHECK(first.dual_demand == second.dual_demand);
  CHECK(first.dual_supply == second.dual_supply);
  CHECK(first.stats.phases == second.stats.phases);
  CHECK(first.stats.paths == second.stats.paths);
  CHECK(first.stats.sum_path_edges == second.stats.sum_path_edges);
  CHECK(first.stats.dfs_edge_visits == second.stats.dfs_edge_visits);
}

TEST_CASE("free supply duals grow by at least one per phase") {
  auto st = make_solver_state({2, 3, 4}, {3, 3, 2},
                              Mat<std::int64_t>::from_rows(
                                  {{4, 0, 2}, {1, 3, 5}, {0, 2, 1}}));
  int guard = 0;
  while (st.total_shipped < st.total_supply) {
    REQUIRE(++guard < 50);
    const auto before = st.dual_supply;
    std::vector<bool> was_free;
    for (std::size_t b = 0; b < 3; ++b) was_free.push_back(st.supply_free(b));
    hungarian_search(st);
    for (std::size_t b = 0; b < 3; ++b) {
      if (was_free[b]) CHECK(st.dual_supply[b] >= before[b] + 1);
    }
    partial_dfs_phase(st);
  }
}

TEST_CASE("check_phase_invariants flags corrupted states") {
  auto st = two_demand_state();
  hungarian_search(st);
  partial_dfs_phase(st);
  CHECK_NOTHROW(check_phase_invariants(st));

  auto broken = st;
  broken.dual_demand[1] = 7;  // positive demand dual violates the sign condition
  CHECK_THROWS_AS(check_phase_invariants(broken), InternalError);

  auto infeasible = st;
  infeasible.dual_supply[0] += 10;
  CHECK_THROWS_AS(check_phase_invariants(infeasible), InternalError);
}
