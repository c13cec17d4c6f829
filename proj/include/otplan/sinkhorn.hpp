#pragma once

#include <vector>

#include "otplan/core.hpp"

namespace otplan {

struct SinkhornParams {
  double eta = 0.0;           // entropic regularization, > 0
  int max_iters = 10000;
  double marginal_tol = 0.0;  // L1 deviation target, > 0
};

// Theory-guided defaults tied to the target additive error; overridable from
// the CLI.
SinkhornParams default_sinkhorn_params(const TransportInstance& inst, double delta);

struct SinkhornResult {
  TransportPlan plan;  // pre-rounding scaling iterate
  int iters = 0;
  bool converged = false;
};

// Alternating row/column scaling of exp(-c/eta) in the log domain. One
// iteration is one row update plus one column update. Requires a balanced
// instance (total demand == total supply). Non-convergence is reported via
// the flag, with the best iterate returned.
SinkhornResult sinkhorn_scale(const TransportInstance& inst, const SinkhornParams& params);

// Rounds an arbitrary non-negative plan onto the transport polytope with
// marginals exactly (d, s): scale rows down, scale columns down, then spread
// the missing mass as the outer product of the marginal deficits.
TransportPlan round_to_feasible(const TransportPlan& plan, const std::vector<double>& demands,
                                const std::vector<double>& supplies);

}  // namespace otplan
