#include "otplan/io.hpp"

#include <fstream>
#include <numeric>
#include <sstream>

#include "json.hpp"

namespace otplan {

using nlohmann::json;

double GrayImage::total_mass() const {
  return std::accumulate(pixels.begin(), pixels.end(), 0.0);
}

namespace {

std::vector<double> number_array(const json& j, const std::string& field,
                                 const std::string& origin) {
  if (!j.contains(field) || !j[field].is_array()) {
    throw ValidationError("DimensionMismatch",
                          origin + ": missing or non-array field \"" + field + "\"");
  }
  std::vector<double> out;
  out.reserve(j[field].size());
  for (const auto& v : j[field]) {
    if (!v.is_number()) {
      throw ValidationError("DimensionMismatch",
                            origin + ": field \"" + field + "\" holds a non-number");
    }
    out.push_back(v.get<double>());
  }
  return out;
}

std::ifstream open_or_throw(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ValidationError("FileError", "cannot open " + path);
  }
  return in;
}

}  // namespace

TransportInstance load_instance(std::istream& in, const std::string& origin) {
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ValidationError("ParseError", origin + ": " + e.what());
  }
  TransportInstance inst;
  inst.demands = number_array(j, "demands", origin);
  inst.supplies = number_array(j, "supplies", origin);
  if (!j.contains("costs") || !j["costs"].is_array()) {
    throw ValidationError("DimensionMismatch",
                          origin + ": missing or non-array field \"costs\"");
  }
  const auto& rows = j["costs"];
  inst.costs = Mat<double>(inst.demands.size(), inst.supplies.size(), 0.0);
  if (rows.size() != inst.demands.size()) {
    throw ValidationError("DimensionMismatch",
                          origin + ": field \"costs\" must have one row per demand");
  }
  for (std::size_t a = 0; a < rows.size(); ++a) {
    if (!rows[a].is_array() || rows[a].size() != inst.supplies.size()) {
      throw ValidationError("DimensionMismatch",
                            origin + ": field \"costs\" row " + std::to_string(a) +
                                " must have one entry per supply");
    }
    for (std::size_t b = 0; b < inst.supplies.size(); ++b) {
      if (!rows[a][b].is_number()) {
        throw ValidationError("DimensionMismatch",
                              origin + ": field \"costs\" holds a non-number");
      }
      inst.costs(a, b) = rows[a][b].get<double>();
    }
  }
  return inst;
}

TransportInstance load_instance_file(const std::string& path) {
  auto in = open_or_throw(path);
  return load_instance(in, path);
}

void save_instance(std::ostream& out, const TransportInstance& inst) {
  json j;
  j["demands"] = inst.demands;
  j["supplies"] = inst.supplies;
  json rows = json::array();
  for (std::size_t a = 0; a < inst.costs.rows(); ++a) {
    json row = json::array();
    for (std::size_t b = 0; b < inst.costs.cols(); ++b) row.push_back(inst.costs(a, b));
    rows.push_back(std::move(row));
  }
  j["costs"] = std::move(rows);
  out << j.dump(2) << '\n';
}

void save_instance_file(const std::string& path, const TransportInstance& inst) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("FileError", "cannot write " + path);
  save_instance(out, inst);
}

void save_plan(std::ostream& out, const TransportPlan& plan, double cost) {
  json j;
  json rows = json::array();
  for (std::size_t a = 0; a < plan.flow.rows(); ++a) {
    json row = json::array();
    for (std::size_t b = 0; b < plan.flow.cols(); ++b) row.push_back(plan.flow(a, b));
    rows.push_back(std::move(row));
  }
  j["flow"] = std::move(rows);
  j["cost"] = cost;
  out << j.dump(2) << '\n';
}

void save_plan_file(const std::string& path, const TransportPlan& plan, double cost) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("FileError", "cannot write " + path);
  save_plan(out, plan, cost);
}

std::string stats_to_json(const RunStats& stats, const SolveConfig& cfg) {
  json j;
  j["delta"] = cfg.delta;
  j["epsilon"] = cfg.epsilon;
  j["seed"] = cfg.seed;
  j["phases"] = stats.phases;
  j["paths"] = stats.paths;
  j["sum_path_edges"] = stats.sum_path_edges;
  j["sum_half_ceil"] = stats.sum_half_ceil;
  j["phase_bound"] = stats.phase_bound;
  j["path_bound"] = stats.path_bound;
  j["dijkstra_edge_visits"] = stats.dijkstra_edge_visits;
  j["dfs_edge_visits"] = stats.dfs_edge_visits;
  j["augment_edge_updates"] = stats.augment_edge_updates;
  j["timings_ms"] = {{"scale", stats.timings.scale_ms},
                     {"search", stats.timings.search_ms},
                     {"dfs", stats.timings.dfs_ms},
                     {"augment", stats.timings.augment_ms},
                     {"recover", stats.timings.recover_ms},
                     {"total", stats.timings.total_ms}};
  return j.dump(2) + "\n";
}

namespace {

GrayImage parse_pgm(std::istream& in, bool binary, const std::string& origin) {
  // Header tokens may be separated by comments starting with '#'.
  auto next_token = [&]() -> std::string {
    std::string tok;
    while (in >> tok) {
      if (tok[0] == '#') {
        std::string rest;
        std::getline(in, rest);
        continue;
      }
      return tok;
    }
    throw ValidationError("ParseError", origin + ": truncated PGM header");
  };
  GrayImage img;
  const std::size_t cols = std::stoul(next_token());
  const std::size_t rows = std::stoul(next_token());
  const unsigned long maxval = std::stoul(next_token());
  if (cols == 0 || rows == 0) {
    throw ValidationError("EmptyImage", origin + ": image has zero pixels");
  }
  img.rows = rows;
  img.cols = cols;
  img.pixels.resize(rows * cols);
  if (binary) {
    if (maxval > 255) {
      throw ValidationError("ParseError", origin + ": only 8-bit binary PGM supported");
    }
    in.get();  // single whitespace after maxval
    std::vector<unsigned char> raw(rows * cols);
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (static_cast<std::size_t>(in.gcount()) != raw.size()) {
      throw ValidationError("ParseError", origin + ": truncated PGM payload");
    }
    for (std::size_t i = 0; i < raw.size(); ++i) img.pixels[i] = raw[i];
  } else {
    for (double& p : img.pixels) {
      long v;
      if (!(in >> v) || v < 0) {
        throw ValidationError("ParseError", origin + ": bad PGM pixel value");
      }
      p = static_cast<double>(v);
    }
  }
  return img;
}

GrayImage parse_text_grid(std::istream& in, const std::string& origin) {
  GrayImage img;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::vector<double> row;
    double v;
    while (ls >> v) {
      if (v < 0.0) {
        throw ValidationError("NegativeValue", origin + ": negative intensity");
      }
      row.push_back(v);
    }
    if (row.empty()) continue;
    if (img.cols == 0) {
      img.cols = row.size();
    } else if (row.size() != img.cols) {
      throw ValidationError("DimensionMismatch", origin + ": ragged intensity grid");
    }
    img.pixels.insert(img.pixels.end(), row.begin(), row.end());
    ++img.rows;
  }
  if (img.pixels.empty()) {
    throw ValidationError("EmptyImage", origin + ": no intensity values found");
  }
  return img;
}

}  // namespace

GrayImage load_image(std::istream& in, const std::string& origin) {
  // Sniff the magic; fall back to a plain text grid.
  const auto start = in.tellg();
  std::string magic;
  in >> magic;
  if (magic == "P2" || magic == "P5") {
    return parse_pgm(in, magic == "P5", origin);
  }
  in.clear();
  in.seekg(start);
  return parse_text_grid(in, origin);
}

GrayImage load_image_file(const std::string& path) {
  auto in = open_or_throw(path);
  return load_image(in, path);
}

}  // namespace otplan
