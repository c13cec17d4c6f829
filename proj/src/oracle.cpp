#include "otplan/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace otplan {

namespace {

constexpr double kDistInf = std::numeric_limits<double>::infinity();

// Successive shortest paths with vertex potentials on the bipartite
// transportation network. Middle arcs are uncapacitated; the node masses
// bound every edge flow, so each augmentation exhausts a source arc, a sink
// arc, or drains a carrying edge.
template <typename FlowT, typename CostT>
struct SspSolver {
  const std::vector<FlowT>& demands;
  const std::vector<FlowT>& supplies;
  const Mat<CostT>& costs;
  std::size_t na, nb;

  Mat<FlowT> flow;
  std::vector<FlowT> filled, used;
  std::vector<double> pot_demand, pot_supply;
  double pot_sink = 0.0;

  SspSolver(const std::vector<FlowT>& d, const std::vector<FlowT>& s,
            const Mat<CostT>& c)
      : demands(d),
        supplies(s),
        costs(c),
        na(d.size()),
        nb(s.size()),
        flow(na, nb, FlowT{0}),
        filled(na, FlowT{0}),
        used(nb, FlowT{0}),
        pot_demand(na, 0.0),
        pot_supply(nb, 0.0) {}

  void run() {
    const FlowT total_supply =
        std::accumulate(supplies.begin(), supplies.end(), FlowT{0});
    const FlowT total_demand = std::accumulate(demands.begin(), demands.end(), FlowT{0});
    if (total_supply > total_demand) {
      throw ValidationError("SupplyExceedsDemand",
                            "oracle requires total supply <= total demand");
    }
    FlowT shipped{0};
    long iterations = 0;
    const long iteration_cap = 64L * static_cast<long>(na + nb + 2) *
                               static_cast<long>(na + nb + 2);
    while (shipped < total_supply) {
      if (++iterations > iteration_cap) {
        throw InternalError("CapacityViolation",
                            "successive shortest paths failed to converge");
      }
      shipped += augment_once();
    }
  }

  FlowT augment_once() {
    std::vector<double> dist_demand(na, kDistInf), dist_supply(nb, kDistInf);
    std::vector<char> done_demand(na, 0), done_supply(nb, 0);
    std::vector<std::int32_t> parent_demand(na, -1), parent_supply(nb, -1);
    double dist_sink = kDistInf;
    std::int32_t sink_parent = -1;

    for (std::size_t b = 0; b < nb; ++b) {
      if (used[b] < supplies[b]) dist_supply[b] = -pot_supply[b];
    }

    while (true) {
      double best = kDistInf;
      std::size_t best_idx = 0;
      bool best_is_demand = false, found = false;
      for (std::size_t a = 0; a < na; ++a) {
        if (!done_demand[a] && dist_demand[a] < best) {
          best = dist_demand[a];
          best_idx = a;
          best_is_demand = true;
          found = true;
        }
      }
      for (std::size_t b = 0; b < nb; ++b) {
        if (!done_supply[b] && dist_supply[b] < best) {
          best = dist_supply[b];
          best_idx = b;
          best_is_demand = false;
          found = true;
        }
      }
      if (!found) break;

      if (best_is_demand) {
        const std::size_t a = best_idx;
        done_demand[a] = 1;
        if (filled[a] < demands[a] && best + pot_demand[a] - pot_sink < dist_sink) {
          dist_sink = best + pot_demand[a] - pot_sink;
          sink_parent = static_cast<std::int32_t>(a);
        }
        for (std::size_t b = 0; b < nb; ++b) {
          if (done_supply[b] || !(flow(a, b) > FlowT{0})) continue;
          const double rc = -static_cast<double>(costs(a, b)) + pot_demand[a] -
                            pot_supply[b];
          if (best + rc < dist_supply[b]) {
            dist_supply[b] = best + rc;
            parent_supply[b] = static_cast<std::int32_t>(a);
          }
        }
      } else {
        const std::size_t b = best_idx;
        done_supply[b] = 1;
        for (std::size_t a = 0; a < na; ++a) {
          if (done_demand[a]) continue;
          const double rc = static_cast<double>(costs(a, b)) + pot_supply[b] -
                            pot_demand[a];
          if (best + rc < dist_demand[a]) {
            dist_demand[a] = best + rc;
            parent_demand[a] = static_cast<std::int32_t>(b);
          }
        }
      }
    }

    if (sink_parent < 0) {
      throw InternalError("SinkUnreachable", "oracle found no augmenting path");
    }

    // Walk back from the sink, collecting the path and its bottleneck.
    std::vector<std::pair<std::size_t, std::size_t>> forward_edges, backward_edges;
    std::size_t a = static_cast<std::size_t>(sink_parent);
    FlowT amount = demands[a] - filled[a];
    while (true) {
      const std::size_t b = static_cast<std::size_t>(parent_demand[a]);
      forward_edges.emplace_back(a, b);
      if (parent_supply[b] < 0) {
        amount = std::min(amount, supplies[b] - used[b]);
        break;
      }
      const auto prev = static_cast<std::size_t>(parent_supply[b]);
      backward_edges.emplace_back(prev, b);
      amount = std::min(amount, flow(prev, b));
      a = prev;
    }
    const std::size_t source = forward_edges.back().second;

    for (const auto& [fa, fb] : forward_edges) flow(fa, fb) += amount;
    for (const auto& [ba, bb] : backward_edges) flow(ba, bb) -= amount;
    filled[static_cast<std::size_t>(sink_parent)] += amount;
    used[source] += amount;

    for (std::size_t i = 0; i < na; ++i) {
      pot_demand[i] += std::min(dist_demand[i], dist_sink);
    }
    for (std::size_t i = 0; i < nb; ++i) {
      pot_supply[i] += std::min(dist_supply[i], dist_sink);
    }
    pot_sink += dist_sink;
    return amount;
  }

  double total_cost() const {
    double total = 0.0;
    for (std::size_t i = 0; i < na; ++i) {
      for (std::size_t j = 0; j < nb; ++j) {
        total += static_cast<double>(flow(i, j)) * static_cast<double>(costs(i, j));
      }
    }
    return total;
  }
};

void check_oracle_size(std::size_t na, std::size_t nb, std::int64_t total_supply) {
  if (na + nb > 200) {
    throw ValidationError("TooLarge", "oracle guard: more than 200 nodes");
  }
  if (total_supply > 100000) {
    throw ValidationError("TooLarge", "oracle guard: total supply above 1e5");
  }
}

template <typename CostT>
std::pair<IntegerPlan, double> exact_integer_impl(
    const std::vector<std::int64_t>& int_demands,
    const std::vector<std::int64_t>& int_supplies, const Mat<CostT>& costs) {
  if (costs.rows() != int_demands.size() || costs.cols() != int_supplies.size()) {
    throw ValidationError("DimensionMismatch", "oracle cost shape mismatch");
  }
  check_oracle_size(int_demands.size(), int_supplies.size(),
                    std::accumulate(int_supplies.begin(), int_supplies.end(),
                                    std::int64_t{0}));
  SspSolver<std::int64_t, CostT> solver(int_demands, int_supplies, costs);
  solver.run();
  IntegerPlan plan;
  plan.flow = std::move(solver.flow);
  double cost = 0.0;
  for (std::size_t i = 0; i < costs.rows(); ++i) {
    for (std::size_t j = 0; j < costs.cols(); ++j) {
      cost += static_cast<double>(plan.flow(i, j)) * static_cast<double>(costs(i, j));
    }
  }
  return {std::move(plan), cost};
}

// Depth-first enumeration of every way to split the supplies across the
// demand nodes, demand caps respected.
template <typename CostT>
struct BruteForcer {
  const std::vector<std::int64_t>& demands;
  const std::vector<std::int64_t>& supplies;
  const Mat<CostT>& costs;
  std::vector<std::int64_t> room;
  double best = std::numeric_limits<double>::infinity();

  BruteForcer(const std::vector<std::int64_t>& d, const std::vector<std::int64_t>& s,
              const Mat<CostT>& c)
      : demands(d), supplies(s), costs(c), room(d) {}

  void over_supplies(std::size_t b, double cost_so_far) {
    if (b == supplies.size()) {
      best = std::min(best, cost_so_far);
      return;
    }
    split(b, 0, supplies[b], cost_so_far);
  }

  void split(std::size_t b, std::size_t a, std::int64_t remaining, double cost_so_far) {
    if (a + 1 == demands.size()) {
      if (remaining <= room[a]) {
        room[a] -= remaining;
        over_supplies(b + 1, cost_so_far + static_cast<double>(remaining) *
                                               static_cast<double>(costs(a, b)));
        room[a] += remaining;
      }
      return;
    }
    const std::int64_t cap = std::min(remaining, room[a]);
    for (std::int64_t t = 0; t <= cap; ++t) {
      room[a] -= t;
      split(b, a + 1, remaining - t,
            cost_so_far + static_cast<double>(t) * static_cast<double>(costs(a, b)));
      room[a] += t;
    }
  }
};

double binomial_capped(std::int64_t n, std::int64_t k, double cap) {
  double v = 1.0;
  for (std::int64_t i = 1; i <= k; ++i) {
    v *= static_cast<double>(n - k + i) / static_cast<double>(i);
    if (v > cap) return cap + 1.0;
  }
  return v;
}

template <typename CostT>
double brute_force_impl(const std::vector<std::int64_t>& int_demands,
                        const std::vector<std::int64_t>& int_supplies,
                        const Mat<CostT>& costs) {
  if (costs.rows() != int_demands.size() || costs.cols() != int_supplies.size()) {
    throw ValidationError("DimensionMismatch", "brute force cost shape mismatch");
  }
  const std::int64_t total_supply =
      std::accumulate(int_supplies.begin(), int_supplies.end(), std::int64_t{0});
  const std::int64_t total_demand =
      std::accumulate(int_demands.begin(), int_demands.end(), std::int64_t{0});
  if (total_supply > total_demand) {
    throw ValidationError("SupplyExceedsDemand",
                          "brute force requires total supply <= total demand");
  }
  const auto parts = static_cast<std::int64_t>(int_demands.size());
  double space = 1.0;
  for (std::int64_t s : int_supplies) {
    space *= binomial_capped(s + parts - 1, parts - 1, 1e6);
    if (space > 1e6) {
      throw ValidationError("TooLarge", "brute force guard: search space above 1e6");
    }
  }
  BruteForcer<CostT> bf(int_demands, int_supplies, costs);
  bf.over_supplies(0, 0.0);
  return bf.best;
}

}  // namespace

std::pair<IntegerPlan, std::int64_t> exact_transport_integer(
    const std::vector<std::int64_t>& int_demands,
    const std::vector<std::int64_t>& int_supplies, const Mat<std::int64_t>& costs) {
  auto [plan, unused] = exact_integer_impl(int_demands, int_supplies, costs);
  (void)unused;
  std::int64_t cost = 0;
  for (std::size_t i = 0; i < costs.rows(); ++i) {
    for (std::size_t j = 0; j < costs.cols(); ++j) cost += plan.flow(i, j) * costs(i, j);
  }
  return {std::move(plan), cost};
}

std::pair<IntegerPlan, double> exact_transport_integer(
    const std::vector<std::int64_t>& int_demands,
    const std::vector<std::int64_t>& int_supplies, const Mat<double>& costs) {
  return exact_integer_impl(int_demands, int_supplies, costs);
}

std::pair<Mat<double>, double> exact_transport_real(const std::vector<double>& demands,
                                                    const std::vector<double>& supplies,
                                                    const Mat<double>& costs) {
  if (costs.rows() != demands.size() || costs.cols() != supplies.size()) {
    throw ValidationError("DimensionMismatch", "oracle cost shape mismatch");
  }
  if (demands.size() + supplies.size() > 200) {
    throw ValidationError("TooLarge", "oracle guard: more than 200 nodes");
  }
  SspSolver<double, double> solver(demands, supplies, costs);
  solver.run();
  return {std::move(solver.flow), solver.total_cost()};
}

std::int64_t brute_force_enumerate(const std::vector<std::int64_t>& int_demands,
                                   const std::vector<std::int64_t>& int_supplies,
                                   const Mat<std::int64_t>& costs) {
  return static_cast<std::int64_t>(
      std::llround(brute_force_impl(int_demands, int_supplies, costs)));
}

double brute_force_enumerate(const std::vector<std::int64_t>& int_demands,
                             const std::vector<std::int64_t>& int_supplies,
                             const Mat<double>& costs) {
  return brute_force_impl(int_demands, int_supplies, costs);
}

}  // namespace otplan
