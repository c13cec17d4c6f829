#include <random>

#include "doctest.h"
#include "otplan/harness.hpp"
#include "otplan/oracle.hpp"
#include "otplan/scaling.hpp"

using namespace otplan;

TEST_CASE("exact solver on forced single-edge instances") {
  const auto [plan, cost] =
      exact_transport_integer({1}, {1}, Mat<std::int64_t>::from_rows({{7}}));
  CHECK(cost == 7);
  CHECK(plan.flow(0, 0) == 1);
}

TEST_CASE("exact solver picks the zero-cost perfect matching") {
  const auto [plan, cost] = exact_transport_integer(
      {1, 1}, {1, 1}, Mat<std::int64_t>::from_rows({{0, 1}, {1, 0}}));
  CHECK(cost == 0);
  CHECK(plan.flow(0, 0) == 1);
  CHECK(plan.flow(1, 1) == 1);
}

TEST_CASE("exact solver reroutes through backward edges when cheaper") {
  // Greedy per-column assignment is suboptimal here; the second augmentation
  // must reroute the first unit.
  const auto [plan, cost] = exact_transport_integer(
      {1, 1}, {1, 1}, Mat<std::int64_t>::from_rows({{1, 4}, {2, 10}}));
  (void)plan;
  CHECK(cost == 6);  // a0<-b1 (4) + a1<-b0 (2)
  CHECK(cost == brute_force_enumerate({1, 1}, {1, 1},
                                      Mat<std::int64_t>::from_rows({{1, 4}, {2, 10}})));
}

TEST_CASE("brute force on forced saturation") {
  CHECK(brute_force_enumerate({2}, {1, 1}, Mat<std::int64_t>::from_rows({{1, 2}})) == 3);
  CHECK(brute_force_enumerate({1}, {1}, Mat<std::int64_t>::from_rows({{0}})) == 0);
}

TEST_CASE("brute force guard rejects huge search spaces") {
  std::vector<std::int64_t> demands(12, 50), supplies(12, 40);
  CHECK_THROWS_AS(brute_force_enumerate(demands, supplies, Mat<std::int64_t>(12, 12, 1)),
                  ValidationError);
}

TEST_CASE("oracle guard rejects oversized instances") {
  std::vector<std::int64_t> demands(150, 1), supplies(150, 1);
  CHECK_THROWS_AS(exact_transport_integer(demands, supplies, Mat<std::int64_t>(150, 150, 0)),
                  ValidationError);
  CHECK_THROWS_AS(exact_transport_integer({1}, {200000}, Mat<std::int64_t>(1, 1, 0)),
                  ValidationError);
}

TEST_CASE("exact solver equals brute force on exhausted 2x2 micro-instances") {
  // All cost matrices with entries in {0..2}, masses with total supply <= 3.
  for (int c0 = 0; c0 <= 2; ++c0) {
    for (int c1 = 0; c1 <= 2; ++c1) {
      for (int c2 = 0; c2 <= 2; ++c2) {
        for (int c3 = 0; c3 <= 2; ++c3) {
          const auto costs = Mat<std::int64_t>::from_rows(
              {{c0, c1}, {c2, c3}});
          for (std::int64_t s0 = 0; s0 <= 2; ++s0) {
            for (std::int64_t s1 = 0; s1 + s0 <= 3; ++s1) {
              const std::vector<std::int64_t> demands = {2, 2};
              const std::vector<std::int64_t> supplies = {s0, s1};
              if (s0 + s1 > 4) continue;
              const auto exact = exact_transport_integer(demands, supplies, costs).second;
              const auto brute = brute_force_enumerate(demands, supplies, costs);
              CHECK(exact == brute);
            }
          }
        }
      }
    }
  }
}

TEST_CASE("exact solver equals brute force on random micro-instances") {
  std::mt19937_64 rng(53);
  std::uniform_int_distribution<std::int64_t> mass(0, 3), cost(0, 7);
  std::uniform_int_distribution<std::size_t> size(1, 3);
  int used = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t na = size(rng), nb = size(rng);
    std::vector<std::int64_t> demands(na), supplies(nb);
    for (auto& d : demands) d = mass(rng) + 1;
    for (auto& s : supplies) s = mass(rng);
    std::int64_t total_d = 0, total_s = 0;
    for (auto d : demands) total_d += d;
    for (auto s : supplies) total_s += s;
    if (total_s > total_d) continue;
    Mat<std::int64_t> costs(na, nb);
    for (auto& c : costs.data()) c = cost(rng);
    CHECK(exact_transport_integer(demands, supplies, costs).second ==
          brute_force_enumerate(demands, supplies, costs));
    ++used;
  }
  CHECK(used > 120);
}

TEST_CASE("real-cost oracle is exact on dyadic costs") {
  const auto costs = Mat<double>::from_rows({{0.25, 0.5}, {0.75, 0.125}});
  const auto [plan, cost] = exact_transport_integer({1, 1}, {1, 1}, costs);
  (void)plan;
  CHECK(cost == 0.375);  // 0.25 + 0.125 on the diagonal
}

TEST_CASE("real-mass oracle matches the integer oracle after scaling") {
  std::mt19937_64 rng(59);
  std::uniform_int_distribution<std::int64_t> mass(0, 6), num(0, 16);
  for (int trial = 0; trial < 40; ++trial) {
    std::vector<std::int64_t> d_units(3), s_units(2);
    for (auto& d : d_units) d = mass(rng) + 2;
    for (auto& s : s_units) s = mass(rng);
    std::int64_t total_d = 0, total_s = 0;
    for (auto d : d_units) total_d += d;
    for (auto s : s_units) total_s += s;
    if (total_s > total_d) continue;
    Mat<double> costs(3, 2);
    for (auto& c : costs.data()) c = static_cast<double>(num(rng)) / 16.0;

    std::vector<double> demands, supplies;
    for (auto d : d_units) demands.push_back(static_cast<double>(d) / 8.0);
    for (auto s : s_units) supplies.push_back(static_cast<double>(s) / 8.0);

    const double int_cost = exact_transport_integer(d_units, s_units, costs).second;
    const double real_cost = exact_transport_real(demands, supplies, costs).second;
    CHECK(real_cost == doctest::Approx(int_cost / 8.0).epsilon(1e-12));
  }
}

TEST_CASE("scaled optimum is at most alpha times the real optimum") {
  // The scaled instance can only look cheaper than alpha times the original.
  std::mt19937_64 rng(61);
  for (int trial = 0; trial < 50; ++trial) {
    const auto inst = synthetic_instance(2 + trial % 5, 2 + trial % 3, 4000 + trial);
    SolveConfig cfg;
    cfg.delta = 0.25;
    cfg.epsilon = 0.5;
    if (inst.max_cost() <= 0.0) continue;
    const auto scaled = scale_instance(inst, cfg);

    std::vector<std::int64_t> d_units, s_units;
    for (double d : inst.demands) d_units.push_back(std::llround(d * 128.0));
    for (double s : inst.supplies) s_units.push_back(std::llround(s * 128.0));
    const double real_opt =
        exact_transport_integer(d_units, s_units, inst.costs).second / 128.0;
    const double scaled_opt =
        exact_transport_integer(scaled.int_demands, scaled.int_supplies, inst.costs)
            .second;
    CHECK(scaled_opt <= scaled.alpha * real_opt + 1e-9 * (1.0 + scaled.alpha * real_opt));
  }
}
