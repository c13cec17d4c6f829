#include "otplan/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>
#include <thread>

#include "otplan/oracle.hpp"
#include "otplan/sinkhorn.hpp"
#include "otplan/solve.hpp"

namespace otplan {

TransportInstance image_pair_to_instance(const GrayImage& demand_img,
                                         const GrayImage& supply_img, bool prune) {
  if (demand_img.rows != supply_img.rows || demand_img.cols != supply_img.cols) {
    throw ValidationError("DimensionMismatch", "image dimensions differ");
  }
  if (demand_img.pixels.empty()) {
    throw ValidationError("EmptyImage", "images have no pixels");
  }
  const double mass_d = demand_img.total_mass();
  const double mass_s = supply_img.total_mass();
  if (mass_d <= 0.0 || mass_s <= 0.0) {
    throw ValidationError("EmptyImage", "an image has zero total mass");
  }

  const std::size_t rows = demand_img.rows;
  const std::size_t cols = demand_img.cols;

  std::vector<std::size_t> demand_pixels, supply_pixels;
  for (std::size_t p = 0; p < demand_img.pixels.size(); ++p) {
    if (!prune || demand_img.pixels[p] > 0.0) demand_pixels.push_back(p);
  }
  for (std::size_t p = 0; p < supply_img.pixels.size(); ++p) {
    if (!prune || supply_img.pixels[p] > 0.0) supply_pixels.push_back(p);
  }

  TransportInstance inst;
  inst.demands.reserve(demand_pixels.size());
  for (std::size_t p : demand_pixels) inst.demands.push_back(demand_img.pixels[p] / mass_d);
  inst.supplies.reserve(supply_pixels.size());
  for (std::size_t p : supply_pixels) inst.supplies.push_back(supply_img.pixels[p] / mass_s);

  // Dividing by the extreme squared distance keeps the maximum entry at
  // exactly 1 whenever both corner pixels are present.
  const double max_sq =
      static_cast<double>((rows - 1) * (rows - 1) + (cols - 1) * (cols - 1));
  const double denom = max_sq > 0.0 ? max_sq : 1.0;
  inst.costs = Mat<double>(demand_pixels.size(), supply_pixels.size(), 0.0);
  for (std::size_t i = 0; i < demand_pixels.size(); ++i) {
    const std::size_t prow = demand_pixels[i] / cols;
    const std::size_t pcol = demand_pixels[i] % cols;
    for (std::size_t j = 0; j < supply_pixels.size(); ++j) {
      const std::size_t qrow = supply_pixels[j] / cols;
      const std::size_t qcol = supply_pixels[j] % cols;
      const double dr = static_cast<double>(prow) - static_cast<double>(qrow);
      const double dc = static_cast<double>(pcol) - static_cast<double>(qcol);
      inst.costs(i, j) = (dr * dr + dc * dc) / denom;
    }
  }
  return inst;
}

TransportInstance synthetic_instance(std::size_t n_demands, std::size_t n_supplies,
                                     std::uint64_t seed, const std::string& mass_profile,
                                     const std::string& cost_profile) {
  if (n_demands == 0 || n_supplies == 0) {
    throw ValidationError("DimensionMismatch", "need at least one node per side");
  }
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);

  // Supplies are integer shares of 128, so the masses are dyadic and the
  // totals are exact: total supply 1, total demand >= 1.
  constexpr std::int64_t kGrid = 128;
  std::vector<std::int64_t> supply_units(n_supplies, 0);
  const bool sparse = mass_profile == "sparse";
  std::uniform_int_distribution<std::size_t> pick_supply(0, n_supplies - 1);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::vector<char> blocked(n_supplies, 0);
  if (sparse) {
    for (std::size_t b = 0; b < n_supplies; ++b) blocked[b] = coin(rng) < 0.5 ? 1 : 0;
    if (std::all_of(blocked.begin(), blocked.end(), [](char c) { return c == 1; })) {
      blocked[pick_supply(rng)] = 0;
    }
  }
  for (std::int64_t u = 0; u < kGrid; ++u) {
    std::size_t b = pick_supply(rng);
    while (blocked[b]) b = pick_supply(rng);
    ++supply_units[b];
  }

  std::vector<std::int64_t> demand_units(n_demands, 0);
  std::uniform_int_distribution<std::int64_t> demand_chunk(0, 3 * kGrid / 2);
  for (auto& d : demand_units) d = demand_chunk(rng);
  if (sparse) {
    for (auto& d : demand_units) {
      if (coin(rng) < 0.5) d = 0;
    }
  }
  std::int64_t total_demand = std::accumulate(demand_units.begin(), demand_units.end(),
                                              std::int64_t{0});
  std::uniform_int_distribution<std::size_t> pick_demand(0, n_demands - 1);
  while (total_demand < kGrid) {
    ++demand_units[pick_demand(rng)];
    ++total_demand;
  }
  if (mass_profile == "tight") {
    // Trim demand down to exactly the supply total.
    while (total_demand > kGrid) {
      const std::size_t a = pick_demand(rng);
      if (demand_units[a] > 0) {
        --demand_units[a];
        --total_demand;
      }
    }
  }

  TransportInstance inst;
  inst.demands.reserve(n_demands);
  for (std::int64_t d : demand_units) {
    inst.demands.push_back(static_cast<double>(d) / static_cast<double>(kGrid));
  }
  inst.supplies.reserve(n_supplies);
  for (std::int64_t s : supply_units) {
    inst.supplies.push_back(static_cast<double>(s) / static_cast<double>(kGrid));
  }

  inst.costs = Mat<double>(n_demands, n_supplies, 0.0);
  if (cost_profile != "zero") {
    const std::int64_t denom = cost_profile == "duplicates" ? 4 : 4096;
    std::uniform_int_distribution<std::int64_t> cost_num(0, denom);
    for (auto& c : inst.costs.data()) {
      c = static_cast<double>(cost_num(rng)) / static_cast<double>(denom);
    }
  }
  return inst;
}

GrayImage synthetic_image(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  GrayImage img;
  img.rows = rows;
  img.cols = cols;
  img.pixels.resize(rows * cols);
  std::mt19937_64 rng(seed ^ 0xda3e39cb94b95bdbULL);
  std::uniform_int_distribution<int> intensity(0, 255);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  for (double& p : img.pixels) {
    p = coin(rng) < 0.35 ? 0.0 : static_cast<double>(intensity(rng));
  }
  if (img.total_mass() <= 0.0) img.pixels[0] = 1.0;
  return img;
}

namespace {

std::string solver_name(SolverKind kind) {
  return kind == SolverKind::GabowTarjan ? "gt" : "sinkhorn";
}

std::size_t worker_pool_size(std::size_t tasks) {
  std::size_t n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("OT_GT_THREADS")) {
    char* end = nullptr;
    const long cap = std::strtol(env, &end, 10);
    if (end != env && cap >= 1) n = std::min<std::size_t>(n, static_cast<std::size_t>(cap));
  }
  return std::min(n, std::max<std::size_t>(tasks, 1));
}

ExperimentRow compute_row(const ExperimentSpec& spec, double delta, SolverKind kind,
                          const std::optional<double>& oracle_cost) {
  ExperimentRow row;
  row.instance_id = spec.instance_id;
  row.n_demands = spec.instance.num_demands();
  row.n_supplies = spec.instance.num_supplies();
  row.delta = delta;
  row.epsilon = spec.epsilon;
  row.solver = solver_name(kind);
  row.oracle_cost = oracle_cost;

  try {
    if (kind == SolverKind::GabowTarjan) {
      SolveConfig cfg;
      cfg.delta = delta;
      cfg.epsilon = spec.epsilon;
      cfg.debug_assertions = spec.debug_assertions;
      cfg.seed = spec.seed;
      const SolveResult res = solve_delta_close(spec.instance, cfg);
      row.cost = res.cost;
      row.phases = res.stats.phases;
      row.phase_bound = res.stats.phase_bound > 0
                            ? std::optional<std::int64_t>(res.stats.phase_bound)
                            : std::nullopt;
      row.sum_path_edges = res.stats.sum_path_edges;
      row.sum_half_ceil = res.stats.sum_half_ceil;
      row.path_bound = res.stats.path_bound > 0
                           ? std::optional<std::int64_t>(res.stats.path_bound)
                           : std::nullopt;
      row.t_search_ms = res.stats.timings.search_ms;
      row.t_dfs_ms = res.stats.timings.dfs_ms;
      row.t_augment_ms = res.stats.timings.augment_ms;
      row.t_total_ms = res.stats.timings.total_ms;
    } else {
      SinkhornParams params = default_sinkhorn_params(spec.instance, delta);
      if (spec.sinkhorn_eta > 0.0) params.eta = spec.sinkhorn_eta;
      if (spec.sinkhorn_tol > 0.0) params.marginal_tol = spec.sinkhorn_tol;
      params.max_iters = spec.sinkhorn_max_iters;
      const auto t0 = std::chrono::steady_clock::now();
      const SinkhornResult res = sinkhorn_scale(spec.instance, params);
      const TransportPlan rounded =
          round_to_feasible(res.plan, spec.instance.demands, spec.instance.supplies);
      row.t_total_ms = std::chrono::duration<double, std::milli>(
                           std::chrono::steady_clock::now() - t0)
                           .count();
      row.cost = plan_cost(spec.instance, rounded);
      row.phases = res.iters;
      if (!res.converged) row.error = "DidNotConverge";
    }
    if (oracle_cost) {
      row.delta_bound_ok =
          row.cost <= *oracle_cost + spec.instance.total_supply() * delta + 1e-9;
    }
  } catch (const Error& e) {
    row.error = e.code();
  }
  return row;
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

}  // namespace

std::vector<ExperimentRow> run_experiment(const ExperimentSpec& spec) {
  if (spec.deltas.empty() || spec.solvers.empty() || spec.repetitions < 1) {
    throw ValidationError("DimensionMismatch",
                          "experiment needs deltas, solvers and repetitions >= 1");
  }
  validate_instance(spec.instance);

  std::optional<double> oracle_cost;
  if (spec.instance.num_nodes() <= spec.oracle_node_cap) {
    try {
      oracle_cost = exact_transport_real(spec.instance.demands, spec.instance.supplies,
                                         spec.instance.costs)
                        .second;
    } catch (const Error&) {
      oracle_cost = std::nullopt;
    }
  }

  struct Task {
    double delta;
    SolverKind kind;
  };
  std::vector<Task> tasks;
  for (int rep = 0; rep < spec.repetitions; ++rep) {
    for (double delta : spec.deltas) {
      for (SolverKind kind : spec.solvers) tasks.push_back({delta, kind});
    }
  }

  std::vector<ExperimentRow> rows(tasks.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= tasks.size()) break;
      rows[i] = compute_row(spec, tasks[i].delta, tasks[i].kind, oracle_cost);
    }
  };
  const std::size_t pool = worker_pool_size(tasks.size());
  if (pool <= 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    threads.reserve(pool);
    for (std::size_t i = 0; i < pool; ++i) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
  }
  return rows;
}

std::string csv_header() {
  return "instance_id,n_a,n_b,delta,epsilon,solver,cost,oracle_cost,delta_bound_ok,"
         "phases,phase_bound,sum_path_edges,sum_half_ceil,path_bound,"
         "t_search_ms,t_dfs_ms,t_augment_ms,t_total_ms";
}

std::string csv_row(const ExperimentRow& row) {
  std::ostringstream out;
  out << row.instance_id << ',' << row.n_demands << ',' << row.n_supplies << ','
      << format_double(row.delta) << ',' << format_double(row.epsilon) << ','
      << row.solver << ',' << format_double(row.cost) << ',';
  if (row.oracle_cost) out << format_double(*row.oracle_cost);
  out << ',';
  if (row.delta_bound_ok) out << (*row.delta_bound_ok ? 1 : 0);
  out << ',' << row.phases << ',';
  if (row.phase_bound) out << *row.phase_bound;
  out << ',';
  if (row.sum_path_edges) out << *row.sum_path_edges;
  out << ',';
  if (row.sum_half_ceil) out << *row.sum_half_ceil;
  out << ',';
  if (row.path_bound) out << *row.path_bound;
  out << ',';
  if (row.t_search_ms) out << format_double(*row.t_search_ms);
  out << ',';
  if (row.t_dfs_ms) out << format_double(*row.t_dfs_ms);
  out << ',';
  if (row.t_augment_ms) out << format_double(*row.t_augment_ms);
  out << ',' << format_double(row.t_total_ms);
  return out.str();
}

void write_csv(std::ostream& out, const std::vector<ExperimentRow>& rows) {
  out << csv_header() << '\n';
  for (const auto& row : rows) out << csv_row(row) << '\n';
}

namespace {

// Recovers the integer mass grid behind a synthetic instance; masses are
// multiples of 1/128 by construction.
std::vector<std::int64_t> to_units(const std::vector<double>& masses) {
  std::vector<std::int64_t> units;
  units.reserve(masses.size());
  for (double m : masses) units.push_back(std::llround(m * 128.0));
  return units;
}

}  // namespace

std::optional<CheckFailure> property_check(std::size_t size_cap, std::uint64_t seeds,
                                           std::uint64_t base_seed,
                                           std::ostream* progress) {
  const std::vector<double> deltas = {0.5, 0.1, 0.05, 0.01};
  const std::vector<std::string> mass_profiles = {"uniform", "sparse", "tight"};
  const std::vector<std::string> cost_profiles = {"dyadic", "zero", "duplicates"};
  size_cap = std::max<std::size_t>(size_cap, 2);

  for (std::uint64_t s = 0; s < seeds; ++s) {
    const std::uint64_t seed = base_seed + s;
    std::mt19937_64 rng(seed * 0x2545f4914f6cdd1dULL + 1);
    std::uniform_int_distribution<std::size_t> size_dist(2, size_cap);

    for (const auto& mass_profile : mass_profiles) {
      for (const auto& cost_profile : cost_profiles) {
        const std::size_t na = size_dist(rng);
        const std::size_t nb = size_dist(rng);
        const TransportInstance inst =
            synthetic_instance(na, nb, seed * 131 + na * 7 + nb, mass_profile, cost_profile);

        for (double delta : deltas) {
          SolveConfig cfg;
          cfg.delta = delta;
          cfg.epsilon = 0.5;
          cfg.debug_assertions = true;
          cfg.seed = seed;
          auto fail = [&](const std::string& property, const std::string& detail) {
            return CheckFailure{property, detail, inst, cfg};
          };
          try {
            const SolveResult res = solve_delta_close(inst, cfg);
            if (classify_plan(inst, res.plan, default_feasibility_tol(inst)) !=
                PlanClass::Maximum) {
              return fail("maximum-plan", "recovered plan is not maximum");
            }
            if (res.stats.phase_bound > 0 && res.stats.phases > res.stats.phase_bound) {
              return fail("phase-bound", "phases " + std::to_string(res.stats.phases) +
                                             " > bound " +
                                             std::to_string(res.stats.phase_bound));
            }
            if (res.stats.path_bound > 0 &&
                res.stats.sum_half_ceil > res.stats.path_bound) {
              return fail("path-length-bound",
                          "sum of ceil(|P|/2) " + std::to_string(res.stats.sum_half_ceil) +
                              " > bound " + std::to_string(res.stats.path_bound));
            }
            const auto [plan, int_cost] = exact_transport_integer(
                to_units(inst.demands), to_units(inst.supplies), inst.costs);
            (void)plan;
            const double opt = int_cost / 128.0;
            const double bound = opt + inst.total_supply() * delta + 1e-9;
            if (res.cost > bound) {
              return fail("delta-closeness", "cost " + format_double(res.cost) +
                                                 " > oracle bound " + format_double(bound));
            }
          } catch (const Error& e) {
            return fail(e.code(), e.what());
          }
        }
      }
    }
    if (progress) {
      *progress << "seed " << seed << ": ok\n";
    }
  }
  return std::nullopt;
}

}  // namespace otplan
