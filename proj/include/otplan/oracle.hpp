#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "otplan/core.hpp"
#include "otplan/scaling.hpp"

namespace otplan {

// Exact reference solvers for small instances. Tests and acceptance runs
// use them as ground truth; the CLI exposes them through `check`.

// Minimum-cost maximum integer plan via successive shortest paths with
// vertex potentials. Exact for integer costs; for real costs the arithmetic
// is exact whenever the costs are dyadic rationals of moderate size.
// Throws TooLarge beyond n = 200 or total supply 1e5.
std::pair<IntegerPlan, std::int64_t> exact_transport_integer(
    const std::vector<std::int64_t>& int_demands,
    const std::vector<std::int64_t>& int_supplies, const Mat<std::int64_t>& costs);
std::pair<IntegerPlan, double> exact_transport_integer(
    const std::vector<std::int64_t>& int_demands,
    const std::vector<std::int64_t>& int_supplies, const Mat<double>& costs);

// Same algorithm over real-valued masses; used for reference columns on
// instances whose masses are not integers.
std::pair<Mat<double>, double> exact_transport_real(const std::vector<double>& demands,
                                                    const std::vector<double>& supplies,
                                                    const Mat<double>& costs);

// Exhaustive minimum over every maximum integer plan. The oracle's oracle.
// Throws TooLarge when the search space exceeds ~1e6 plans.
std::int64_t brute_force_enumerate(const std::vector<std::int64_t>& int_demands,
                                   const std::vector<std::int64_t>& int_supplies,
                                   const Mat<std::int64_t>& costs);
double brute_force_enumerate(const std::vector<std::int64_t>& int_demands,
                             const std::vector<std::int64_t>& int_supplies,
                             const Mat<double>& costs);

}  // namespace otplan
