#include "otplan/cli.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "otplan/harness.hpp"
#include "otplan/io.hpp"
#include "otplan/oracle.hpp"
#include "otplan/solve.hpp"

namespace otplan {

namespace {

std::vector<double> parse_delta_list(const std::string& text) {
  std::vector<double> deltas;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    deltas.push_back(std::stod(item));
  }
  if (deltas.empty()) {
    throw ValidationError("DeltaOutOfRange", "empty delta list");
  }
  return deltas;
}

std::string stem_of(const std::string& path) {
  const auto slash = path.find_last_of("/\\");
  std::string name = slash == std::string::npos ? path : path.substr(slash + 1);
  const auto dot = name.find_last_of('.');
  return dot == std::string::npos ? name : name.substr(0, dot);
}

int cmd_solve(const std::string& instance_path, double delta, double epsilon,
              std::uint64_t seed, bool debug_assert, const std::string& out_path,
              const std::string& stats_path) {
  const TransportInstance inst = validate_instance(load_instance_file(instance_path));
  SolveConfig cfg;
  cfg.delta = delta;
  cfg.epsilon = epsilon;
  cfg.seed = seed;
  cfg.debug_assertions = debug_assert;

  const SolveResult res = solve_delta_close(inst, cfg);

  if (out_path.empty()) {
    save_plan(std::cout, res.plan, res.cost);
  } else {
    save_plan_file(out_path, res.plan, res.cost);
  }
  const std::string stats_json = stats_to_json(res.stats, cfg);
  if (!stats_path.empty()) {
    std::ofstream out(stats_path, std::ios::binary);
    if (!out) throw ValidationError("FileError", "cannot write " + stats_path);
    out << stats_json;
  }
  std::cerr << "solved " << instance_path << ": cost " << res.cost << ", "
            << res.stats.phases << " phases (bound " << res.stats.phase_bound << "), "
            << res.stats.paths << " augmenting paths\n";
  return 0;
}

int cmd_compare(const std::string& instance_path, const std::vector<std::string>& images,
                const std::string& delta_list, const std::string& solver_list,
                double epsilon, int reps, std::uint64_t seed, bool prune,
                bool debug_assert, std::size_t oracle_cap, double sk_eta, double sk_tol,
                int sk_iters, const std::string& csv_path) {
  ExperimentSpec spec;
  if (!images.empty()) {
    spec.instance = image_pair_to_instance(load_image_file(images[0]),
                                           load_image_file(images[1]), prune);
    spec.instance_id = stem_of(images[0]) + "-" + stem_of(images[1]);
  } else if (!instance_path.empty()) {
    spec.instance = load_instance_file(instance_path);
    spec.instance_id = stem_of(instance_path);
  } else {
    throw ValidationError("FileError", "compare needs an instance file or --images");
  }

  spec.deltas = parse_delta_list(delta_list);
  spec.epsilon = epsilon;
  spec.repetitions = reps;
  spec.seed = seed;
  spec.debug_assertions = debug_assert;
  spec.oracle_node_cap = oracle_cap;
  spec.sinkhorn_eta = sk_eta;
  spec.sinkhorn_tol = sk_tol;
  spec.sinkhorn_max_iters = sk_iters;

  spec.solvers.clear();
  std::stringstream ss(solver_list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item == "gt") {
      spec.solvers.push_back(SolverKind::GabowTarjan);
    } else if (item == "sinkhorn") {
      spec.solvers.push_back(SolverKind::Sinkhorn);
    } else if (!item.empty()) {
      throw ValidationError("UnknownSolver", "unknown solver \"" + item + "\"");
    }
  }
  if (spec.solvers.empty()) {
    throw ValidationError("UnknownSolver", "empty solver list");
  }

  std::cerr << "comparing " << spec.instance_id << " with seed " << spec.seed << "\n";
  const auto rows = run_experiment(spec);
  if (csv_path.empty()) {
    write_csv(std::cout, rows);
  } else {
    std::ofstream out(csv_path, std::ios::binary);
    if (!out) throw ValidationError("FileError", "cannot write " + csv_path);
    write_csv(out, rows);
  }
  for (const auto& row : rows) {
    if (!row.error.empty()) {
      std::cerr << "row " << row.instance_id << " delta " << row.delta << " solver "
                << row.solver << ": " << row.error << "\n";
    }
  }
  return 0;
}

int cmd_check(std::size_t size_cap, std::uint64_t seeds, std::uint64_t seed) {
  std::cerr << "property check: size cap " << size_cap << ", " << seeds
            << " seeds starting at " << seed << "\n";
  const auto failure = property_check(size_cap, seeds, seed, &std::cerr);
  if (!failure) {
    std::cerr << "all properties hold\n";
    return 0;
  }
  const std::string dump_path = "check-failure-" + std::to_string(failure->config.seed) +
                                ".json";
  try {
    save_instance_file(dump_path, failure->instance);
    std::cerr << "failing instance written to " << dump_path << "\n";
  } catch (const Error& e) {
    std::cerr << "could not serialize failing instance: " << e.what() << "\n";
  }
  std::cerr << "property \"" << failure->property << "\" failed: " << failure->detail
            << " (delta " << failure->config.delta << ", seed " << failure->config.seed
            << ")\n";
  return 3;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"delta-close optimal transport solver"};
  app.require_subcommand(1);

  // solve
  std::string solve_instance, solve_out, solve_stats;
  double solve_delta = 0.1, solve_epsilon = 0.5;
  std::uint64_t solve_seed = 0;
  bool solve_debug = false;
  auto* solve = app.add_subcommand("solve", "compute a delta-close transport plan");
  solve->add_option("instance", solve_instance, "instance JSON file")->required();
  solve->add_option("--delta", solve_delta, "additive error per unit of supply")
      ->required();
  solve->add_option("--epsilon", solve_epsilon, "scaling split in (0,1)")->capture_default_str();
  solve->add_option("--seed", solve_seed, "seed recorded with the run")->capture_default_str();
  solve->add_option("--out", solve_out, "plan output file (default stdout)");
  solve->add_option("--stats", solve_stats, "run statistics output file");
  solve->add_flag("--debug-assert", solve_debug, "verify invariants after every phase");

  // compare
  std::string cmp_instance, cmp_deltas, cmp_solvers = "gt,sinkhorn", cmp_csv;
  std::vector<std::string> cmp_images;
  double cmp_epsilon = 0.5, cmp_eta = 0.0, cmp_tol = 0.0;
  int cmp_reps = 1, cmp_iters = 10000;
  std::uint64_t cmp_seed = 0;
  std::size_t cmp_oracle_cap = 200;
  bool cmp_prune = false, cmp_debug = false;
  auto* compare = app.add_subcommand("compare", "sweep solvers over deltas, emit CSV");
  compare->add_option("instance", cmp_instance, "instance JSON file");
  compare->add_option("--images", cmp_images, "demand and supply image files")
      ->expected(2);
  compare->add_option("--delta-list", cmp_deltas, "comma-separated delta values")
      ->required();
  compare->add_option("--solvers", cmp_solvers, "comma-separated subset of gt,sinkhorn")
      ->capture_default_str();
  compare->add_option("--epsilon", cmp_epsilon, "scaling split in (0,1)")->capture_default_str();
  compare->add_option("--reps", cmp_reps, "repetitions per combination")->capture_default_str();
  compare->add_option("--seed", cmp_seed, "seed recorded with the runs")->capture_default_str();
  compare->add_option("--csv", cmp_csv, "CSV output file (default stdout)");
  compare->add_option("--oracle-cap", cmp_oracle_cap,
                      "max node count for the exact reference column")
      ->capture_default_str();
  compare->add_option("--sinkhorn-eta", cmp_eta, "override entropic regularization");
  compare->add_option("--sinkhorn-tol", cmp_tol, "override marginal tolerance");
  compare->add_option("--sinkhorn-max-iters", cmp_iters, "iteration cap")->capture_default_str();
  compare->add_flag("--prune", cmp_prune, "drop zero-mass pixels");
  compare->add_flag("--debug-assert", cmp_debug, "verify invariants after every phase");

  // check
  std::size_t chk_cap = 20;
  std::uint64_t chk_seeds = 5, chk_seed = 1;
  auto* check = app.add_subcommand("check", "run the randomized property suite");
  check->add_option("--size-cap", chk_cap, "max nodes per side")->capture_default_str();
  check->add_option("--seeds", chk_seeds, "number of seeds")->capture_default_str();
  check->add_option("--seed", chk_seed, "base seed")->capture_default_str();

  try {
    app.parse(argc, argv);
    if (solve->parsed()) {
      return cmd_solve(solve_instance, solve_delta, solve_epsilon, solve_seed,
                       solve_debug, solve_out, solve_stats);
    }
    if (compare->parsed()) {
      return cmd_compare(cmp_instance, cmp_images, cmp_deltas, cmp_solvers, cmp_epsilon,
                         cmp_reps, cmp_seed, cmp_prune, cmp_debug, cmp_oracle_cap,
                         cmp_eta, cmp_tol, cmp_iters, cmp_csv);
    }
    if (check->parsed()) {
      return cmd_check(chk_cap, chk_seeds, chk_seed);
    }
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);  // prints the usage message
    return code == 0 ? 0 : 1;
  } catch (const InternalError& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 2;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace otplan
