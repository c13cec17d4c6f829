#include <random>

#include "doctest.h"
#include "otplan/core.hpp"

using namespace otplan;

namespace {

TransportInstance make_instance(std::vector<double> d, std::vector<double> s,
                                Mat<double> c) {
  TransportInstance inst;
  inst.demands = std::move(d);
  inst.supplies = std::move(s);
  inst.costs = std::move(c);
  return inst;
}

}  // namespace

TEST_CASE("validate_instance accepts minimal balanced instance") {
  const auto inst = make_instance({1.0}, {1.0}, Mat<double>::from_rows({{0.0}}));
  CHECK_NOTHROW(validate_instance(inst));
}

TEST_CASE("validate_instance rejects supply above demand") {
  const auto inst = make_instance({0.5}, {1.0}, Mat<double>::from_rows({{0.0}}));
  CHECK_THROWS_AS(validate_instance(inst), ValidationError);
  try {
    validate_instance(inst);
  } catch (const ValidationError& e) {
    CHECK(e.code() == "SupplyExceedsDemand");
  }
}

TEST_CASE("validate_instance evaluates derived fields") {
  const auto inst = make_instance({1.0, 1.0}, {0.5, 0.5},
                                  Mat<double>::from_rows({{0.0, 1.0}, {1.0, 0.0}}));
  CHECK_NOTHROW(validate_instance(inst));
  CHECK(inst.num_nodes() == 4);
  CHECK(inst.max_cost() == 1.0);
  CHECK(inst.total_supply() == 1.0);
}

TEST_CASE("validate_instance rejects negatives and shape mismatches") {
  CHECK_THROWS_AS(
      validate_instance(make_instance({-1.0}, {1.0}, Mat<double>::from_rows({{0.0}}))),
      ValidationError);
  CHECK_THROWS_AS(
      validate_instance(make_instance({1.0}, {1.0}, Mat<double>::from_rows({{-0.5}}))),
      ValidationError);
  CHECK_THROWS_AS(
      validate_instance(make_instance({1.0, 1.0}, {1.0}, Mat<double>::from_rows({{0.0}}))),
      ValidationError);
  CHECK_THROWS_AS(validate_instance(TransportInstance{}), ValidationError);
}

TEST_CASE("validate_instance is idempotent") {
  const auto inst = make_instance({1.0, 1.0}, {0.5, 0.5},
                                  Mat<double>::from_rows({{0.0, 1.0}, {1.0, 0.0}}));
  const auto& once = validate_instance(inst);
  const auto& twice = validate_instance(once);
  CHECK(&twice == &inst);
}

TEST_CASE("plan_cost on zero-cost and symmetric plans") {
  const auto zero = make_instance({1.0}, {1.0}, Mat<double>::from_rows({{0.0}}));
  CHECK(plan_cost(zero, {Mat<double>::from_rows({{1.0}}), PlanTag::Raw}) == 0.0);

  const auto sym = make_instance({1.0, 1.0}, {1.0, 1.0},
                                 Mat<double>::from_rows({{0.0, 1.0}, {1.0, 0.0}}));
  const TransportPlan quarter{Mat<double>::from_rows({{0.25, 0.25}, {0.25, 0.25}}),
                              PlanTag::Raw};
  CHECK(plan_cost(sym, quarter) == doctest::Approx(0.5));
}

TEST_CASE("plan_cost matches naive summation on random matrices") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    Mat<double> costs(3, 3), flow(3, 3);
    for (auto& v : costs.data()) v = unit(rng);
    for (auto& v : flow.data()) v = unit(rng);
    const auto inst = make_instance({9, 9, 9}, {1, 1, 1}, costs);
    double naive = 0.0;
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) naive += flow(a, b) * costs(a, b);
    }
    CHECK(plan_cost(inst, {flow, PlanTag::Raw}) == doctest::Approx(naive).epsilon(1e-12));
  }
}

TEST_CASE("plan_cost rejects shape mismatch") {
  const auto inst = make_instance({1.0}, {1.0}, Mat<double>::from_rows({{0.0}}));
  CHECK_THROWS_AS(plan_cost(inst, {Mat<double>(2, 1, 0.0), PlanTag::Raw}),
                  ValidationError);
}

TEST_CASE("classify_plan distinguishes maximum, feasible, infeasible") {
  const auto inst = make_instance({1.0}, {1.0}, Mat<double>::from_rows({{0.0}}));
  CHECK(classify_plan(inst, {Mat<double>::from_rows({{1.0}}), PlanTag::Raw}, 1e-9) ==
        PlanClass::Maximum);
  CHECK(classify_plan(inst, {Mat<double>::from_rows({{0.5}}), PlanTag::Raw}, 1e-9) ==
        PlanClass::Feasible);
  CHECK(classify_plan(inst, {Mat<double>::from_rows({{2.0}}), PlanTag::Raw}, 1e-9) ==
        PlanClass::Infeasible);
}

TEST_CASE("classify_plan: maximum implies not infeasible") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    Mat<double> flow(2, 2);
    for (auto& v : flow.data()) v = unit(rng);
    const auto inst =
        make_instance({unit(rng) + 2.0, unit(rng) + 2.0}, {unit(rng), unit(rng)},
                      Mat<double>(2, 2, 0.0));
    const TransportPlan plan{flow, PlanTag::Raw};
    if (classify_plan(inst, plan, 1e-9) == PlanClass::Maximum) {
      CHECK(classify_plan(inst, plan, 1e-9) != PlanClass::Infeasible);
    }
  }
}

TEST_CASE("plan_cost is linear in the plan") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Mat<double> costs(4, 3);
  for (auto& v : costs.data()) v = unit(rng);
  const auto inst = make_instance({9, 9, 9, 9}, {1, 1, 1}, costs);
  for (double lambda : {0.0, 0.25, 0.5, 0.75, 1.0}) {
    Mat<double> f1(4, 3), f2(4, 3), mix(4, 3);
    for (auto& v : f1.data()) v = unit(rng);
    for (auto& v : f2.data()) v = unit(rng);
    for (std::size_t i = 0; i < mix.data().size(); ++i) {
      mix.data()[i] = lambda * f1.data()[i] + (1.0 - lambda) * f2.data()[i];
    }
    const double expected = lambda * plan_cost(inst, {f1, PlanTag::Raw}) +
                            (1.0 - lambda) * plan_cost(inst, {f2, PlanTag::Raw});
    CHECK(plan_cost(inst, {mix, PlanTag::Raw}) ==
          doctest::Approx(expected).epsilon(1e-9));
  }
}
