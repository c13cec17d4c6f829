#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "otplan/core.hpp"

namespace otplan {

// Grayscale grid; pixel (r, c) at r * cols + c.
struct GrayImage {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> pixels;

  double total_mass() const;
};

// Instance files are JSON objects with "demands", "supplies" and "costs".
TransportInstance load_instance(std::istream& in, const std::string& origin = "<stream>");
TransportInstance load_instance_file(const std::string& path);
void save_instance(std::ostream& out, const TransportInstance& inst);
void save_instance_file(const std::string& path, const TransportInstance& inst);

// Plan files are JSON objects with "flow" and "cost".
void save_plan(std::ostream& out, const TransportPlan& plan, double cost);
void save_plan_file(const std::string& path, const TransportPlan& plan, double cost);

// Run statistics as JSON; timing fields live under "timings_ms" so callers
// can compare runs with timings stripped.
std::string stats_to_json(const RunStats& stats, const SolveConfig& cfg);

// Reads PGM (P2 or P5) or a plain whitespace-separated grid of intensities.
GrayImage load_image(std::istream& in, const std::string& origin = "<stream>");
GrayImage load_image_file(const std::string& path);

}  // namespace otplan
