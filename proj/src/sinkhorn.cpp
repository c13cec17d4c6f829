#include "otplan/sinkhorn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace otplan {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_sum_exp(const std::vector<double>& terms) {
  double m = kNegInf;
  for (double t : terms) m = std::max(m, t);
  if (m == kNegInf) return kNegInf;
  double acc = 0.0;
  for (double t : terms) acc += std::exp(t - m);
  return m + std::log(acc);
}

}  // namespace

SinkhornParams default_sinkhorn_params(const TransportInstance& inst, double delta) {
  SinkhornParams p;
  const double side = static_cast<double>(
      std::max(inst.num_demands(), inst.num_supplies()));
  p.eta = delta / (4.0 * std::log(side + 1.0));
  const double big_c = inst.max_cost();
  p.marginal_tol = big_c > 0.0 ? delta / (8.0 * big_c) : 1e-9;
  p.max_iters = 10000;
  return p;
}

SinkhornResult sinkhorn_scale(const TransportInstance& inst, const SinkhornParams& params) {
  if (!(params.eta > 0.0) || !(params.marginal_tol > 0.0)) {
    throw ValidationError("NegativeValue", "sinkhorn needs eta > 0 and marginal_tol > 0");
  }
  const double td = inst.total_demand();
  const double ts = inst.total_supply();
  if (std::abs(td - ts) > 1e-9 * std::max(1.0, td)) {
    throw ValidationError("NonBalanced",
                          "sinkhorn requires total demand == total supply");
  }

  const std::size_t na = inst.num_demands();
  const std::size_t nb = inst.num_supplies();
  const double eta = params.eta;

  std::vector<double> log_d(na), log_s(nb);
  for (std::size_t a = 0; a < na; ++a) log_d[a] = std::log(inst.demands[a]);
  for (std::size_t b = 0; b < nb; ++b) log_s[b] = std::log(inst.supplies[b]);

  // Plan entries are exp(f_a + g_b - c(a,b)/eta) with f, g kept in log space.
  std::vector<double> f(na, 0.0), g(nb, 0.0), terms;
  Mat<double> plan(na, nb, 0.0);

  auto rebuild_plan = [&]() {
    for (std::size_t a = 0; a < na; ++a) {
      for (std::size_t b = 0; b < nb; ++b) {
        plan(a, b) = std::exp(f[a] + g[b] - inst.costs(a, b) / eta);
      }
    }
  };
  auto marginal_error = [&]() {
    double err = 0.0;
    for (std::size_t a = 0; a < na; ++a) {
      double row = 0.0;
      for (std::size_t b = 0; b < nb; ++b) row += plan(a, b);
      err += std::abs(row - inst.demands[a]);
    }
    for (std::size_t b = 0; b < nb; ++b) {
      double col = 0.0;
      for (std::size_t a = 0; a < na; ++a) col += plan(a, b);
      err += std::abs(col - inst.supplies[b]);
    }
    return err;
  };

  auto update_pair = [&]() {
    for (std::size_t a = 0; a < na; ++a) {
      terms.assign(nb, kNegInf);
      for (std::size_t b = 0; b < nb; ++b) terms[b] = g[b] - inst.costs(a, b) / eta;
      f[a] = log_d[a] - log_sum_exp(terms);
      if (std::isnan(f[a])) f[a] = kNegInf;  // zero-mass row
    }
    for (std::size_t b = 0; b < nb; ++b) {
      terms.assign(na, kNegInf);
      for (std::size_t a = 0; a < na; ++a) terms[a] = f[a] - inst.costs(a, b) / eta;
      g[b] = log_s[b] - log_sum_exp(terms);
      if (std::isnan(g[b])) g[b] = kNegInf;
    }
    rebuild_plan();
  };

  // The first row+column pass is initialization; iters counts the correction
  // passes needed after it.
  SinkhornResult result;
  update_pair();
  if (marginal_error() <= params.marginal_tol) {
    result.converged = true;
  } else {
    for (int it = 1; it <= params.max_iters; ++it) {
      update_pair();
      result.iters = it;
      if (marginal_error() <= params.marginal_tol) {
        result.converged = true;
        break;
      }
    }
  }
  result.plan.flow = std::move(plan);
  return result;
}

TransportPlan round_to_feasible(const TransportPlan& plan, const std::vector<double>& demands,
                                const std::vector<double>& supplies) {
  const std::size_t na = demands.size();
  const std::size_t nb = supplies.size();
  if (plan.flow.rows() != na || plan.flow.cols() != nb) {
    throw ValidationError("DimensionMismatch", "plan shape does not match marginals");
  }
  double total_d = 0.0, total_s = 0.0;
  for (double d : demands) total_d += d;
  for (double s : supplies) total_s += s;
  if ((total_d <= 0.0) != (total_s <= 0.0)) {
    throw ValidationError("ZeroMass", "one side of the marginals has zero total mass");
  }

  TransportPlan out;
  out.flow = plan.flow;
  out.tag = PlanTag::Maximum;
  if (total_d <= 0.0) {
    for (double& v : out.flow.data()) v = 0.0;
    return out;
  }

  for (std::size_t a = 0; a < na; ++a) {
    double row = 0.0;
    for (std::size_t b = 0; b < nb; ++b) row += out.flow(a, b);
    if (row > demands[a] && row > 0.0) {
      const double scale = demands[a] / row;
      for (std::size_t b = 0; b < nb; ++b) out.flow(a, b) *= scale;
    }
  }
  for (std::size_t b = 0; b < nb; ++b) {
    double col = 0.0;
    for (std::size_t a = 0; a < na; ++a) col += out.flow(a, b);
    if (col > supplies[b] && col > 0.0) {
      const double scale = supplies[b] / col;
      for (std::size_t a = 0; a < na; ++a) out.flow(a, b) *= scale;
    }
  }

  std::vector<double> row_deficit(na, 0.0), col_deficit(nb, 0.0);
  double missing = 0.0;
  for (std::size_t a = 0; a < na; ++a) {
    double row = 0.0;
    for (std::size_t b = 0; b < nb; ++b) row += out.flow(a, b);
    row_deficit[a] = std::max(0.0, demands[a] - row);
    missing += row_deficit[a];
  }
  for (std::size_t b = 0; b < nb; ++b) {
    double col = 0.0;
    for (std::size_t a = 0; a < na; ++a) col += out.flow(a, b);
    col_deficit[b] = std::max(0.0, supplies[b] - col);
  }
  if (missing > 0.0) {
    for (std::size_t a = 0; a < na; ++a) {
      if (row_deficit[a] == 0.0) continue;
      for (std::size_t b = 0; b < nb; ++b) {
        out.flow(a, b) += row_deficit[a] * col_deficit[b] / missing;
      }
    }
  }
  return out;
}

}  // namespace otplan
