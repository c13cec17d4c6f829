#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "otplan/core.hpp"
#include "otplan/io.hpp"

namespace otplan {

// Builds an instance from two equal-sized grayscale grids: demands from the
// first image, supplies from the second, each normalized to total mass 1.
// Costs are squared Euclidean distances between pixel coordinates, scaled so
// the maximum entry is 1. Zero-intensity pixels stay as zero-mass nodes
// unless prune is set.
TransportInstance image_pair_to_instance(const GrayImage& demand_img,
                                         const GrayImage& supply_img, bool prune = false);

// Deterministic pseudo-random instance. Mass profiles: "uniform" (all nodes
// carry mass), "sparse" (many zero-mass nodes), "tight" (total supply equals
// total demand). Cost profiles: "dyadic" (random multiples of 1/4096 in
// [0,1]), "zero", "duplicates" (coarse grid with many ties). Masses are
// dyadic with supplies summing to exactly 1.
TransportInstance synthetic_instance(std::size_t n_demands, std::size_t n_supplies,
                                     std::uint64_t seed,
                                     const std::string& mass_profile = "uniform",
                                     const std::string& cost_profile = "dyadic");

// Random synthetic grayscale grid for image-pair experiments.
GrayImage synthetic_image(std::size_t rows, std::size_t cols, std::uint64_t seed);

enum class SolverKind { GabowTarjan, Sinkhorn };

struct ExperimentSpec {
  std::string instance_id;
  TransportInstance instance;
  std::vector<double> deltas;
  double epsilon = 0.5;
  std::vector<SolverKind> solvers = {SolverKind::GabowTarjan};
  int repetitions = 1;
  std::uint64_t seed = 0;
  bool debug_assertions = false;
  std::size_t oracle_node_cap = 200;  // larger instances leave the column blank
  // Sinkhorn overrides; 0 means derive the default from delta.
  double sinkhorn_eta = 0.0;
  double sinkhorn_tol = 0.0;
  int sinkhorn_max_iters = 10000;
};

struct ExperimentRow {
  std::string instance_id;
  std::size_t n_demands = 0;
  std::size_t n_supplies = 0;
  double delta = 0.0;
  double epsilon = 0.0;
  std::string solver;
  double cost = 0.0;
  std::optional<double> oracle_cost;
  std::optional<bool> delta_bound_ok;
  std::int64_t phases = 0;  // GT phases, or Sinkhorn iterations
  std::optional<std::int64_t> phase_bound;
  std::optional<std::int64_t> sum_path_edges;
  std::optional<std::int64_t> sum_half_ceil;
  std::optional<std::int64_t> path_bound;
  std::optional<double> t_search_ms;
  std::optional<double> t_dfs_ms;
  std::optional<double> t_augment_ms;
  double t_total_ms = 0.0;
  std::string error;  // per-row failure; the sweep keeps going
};

// Runs every (delta, solver, repetition) combination. Rows are computed by a
// small worker pool (capped by the OT_GT_THREADS environment variable) and
// returned in deterministic order.
std::vector<ExperimentRow> run_experiment(const ExperimentSpec& spec);

std::string csv_header();
std::string csv_row(const ExperimentRow& row);
void write_csv(std::ostream& out, const std::vector<ExperimentRow>& rows);

// Randomized property suite behind `check`: delta-closeness against the
// oracle, the phase and path-length bounds, the per-phase invariant scans,
// and rounding sanity. Returns the first failure, if any.
struct CheckFailure {
  std::string property;
  std::string detail;
  TransportInstance instance;
  SolveConfig config;
};

std::optional<CheckFailure> property_check(std::size_t size_cap, std::uint64_t seeds,
                                           std::uint64_t base_seed,
                                           std::ostream* progress = nullptr);

}  // namespace otplan
