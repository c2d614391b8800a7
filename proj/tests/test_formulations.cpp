#include <catch2/catch_amalgamated.hpp>

#include "raswtg/branch_and_bound.hpp"
#include "raswtg/formulations.hpp"
#include "raswtg/oracle.hpp"
#include "raswtg/rules.hpp"
#include "test_support.hpp"

using namespace raswtg;
using namespace raswtg::milp;
using testsup::CostTag;

namespace {

Instance remark_instance() {
  Instance inst;
  inst.n = 3;
  inst.service_lb.assign(3, 10.0);
  inst.service_ub.assign(3, 10.0);
  inst.wait_guarantee = {0.0, 0.0, 30.0};
  inst.idle_cost.assign(4, 1.0);
  inst.overtime_cost = 1.25;
  inst.horizon = 30.0;
  inst.show_count = 3;
  return inst;
}

MilpSolution solve(const BuiltModel& bm, double time_limit = 120.0) {
  BnbOptions opts;
  opts.time_limit_seconds = time_limit;
  opts.complete_incumbent = bm.completion;
  opts.forced_branch = bm.forced_branch;
  return branch_and_bound(bm.model, opts);
}

}  // namespace

TEST_CASE("zero no-show model on a single boxed customer", "[formulations]") {
  Instance inst;
  inst.n = 1;
  inst.service_lb = {5};
  inst.service_ub = {10};
  inst.wait_guarantee = {0};
  inst.idle_cost = {1, 1};
  inst.overtime_cost = 1.25;
  inst.horizon = 10;
  inst.show_count = 1;
  const auto bm = build_raswtg0(inst);
  const auto sol = solve(bm);
  REQUIRE(sol.status == SolveStatus::kOptimal);
  REQUIRE_THAT(sol.objective, Catch::Matchers::WithinAbs(5.0, 1e-6));
}

TEST_CASE("zero no-show model reproduces the non-monotone optimum", "[formulations]") {
  const auto inst = remark_instance();
  const auto bm = build_raswtg0(inst);
  const auto sol = solve(bm);
  REQUIRE(sol.status == SolveStatus::kOptimal);
  REQUIRE_THAT(sol.objective, Catch::Matchers::WithinAbs(0.0, 1e-6));
  const auto sched = extract_schedule(bm, sol);
  REQUIRE(check_feasibility(sched, inst).feasible);
  REQUIRE_THAT(worst_case_cost(sched, inst).value, Catch::Matchers::WithinAbs(0.0, 1e-6));
}

TEST_CASE("zero no-show model matches the adversary on fixed sequences", "[formulations]") {
  rng::Engine eng(13001);
  for (int trial = 0; trial < 25; ++trial) {
    const int n = rng::uniform_int(eng, 1, 5);
    const auto tag = static_cast<CostTag>(rng::uniform_int(eng, 0, 2));
    auto inst = testsup::random_instance(eng, n, tag, n);
    BuildOptions opts;
    opts.fixed_sequence = Sequence::identity(n);
    const auto bm = build_raswtg0(inst, opts);
    const auto sol = solve(bm);
    REQUIRE(sol.status == SolveStatus::kOptimal);
    const auto sched = extract_schedule(bm, sol);
    // The bound is tight: re-evaluating the schedule reproduces it.
    REQUIRE_THAT(worst_case_cost(sched, inst).value,
                 Catch::Matchers::WithinAbs(sol.objective, 1e-6));
    // And the relaxation never exceeds the integer optimum.
    const auto relax = simplex_solve(bm.model);
    REQUIRE(relax.status == SolveStatus::kOptimal);
    REQUIRE(relax.objective <= sol.objective + 1e-7);
    // Under non-increasing costs the earliest-start rule attains the optimum.
    if (costs_nonincreasing(inst)) {
      const auto asap = asap_schedule(inst, Sequence::identity(n));
      REQUIRE_THAT(worst_case_cost(asap.schedule, inst).value,
                   Catch::Matchers::WithinAbs(sol.objective, 1e-6));
    }
  }
}

TEST_CASE("general model with a full show count reduces to the zero no-show model",
          "[formulations]") {
  rng::Engine eng(13002);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = rng::uniform_int(eng, 1, 3);
    const auto tag = static_cast<CostTag>(rng::uniform_int(eng, 0, 2));
    auto inst = testsup::random_instance(eng, n, tag, n);
    const auto base = solve(build_raswtg0(inst));
    const auto general = solve(build_raswtg_k(inst));
    REQUIRE(base.status == SolveStatus::kOptimal);
    REQUIRE(general.status == SolveStatus::kOptimal);
    REQUIRE_THAT(general.objective, Catch::Matchers::WithinAbs(base.objective, 1e-6));
  }
}

TEST_CASE("general model with nobody showing up", "[formulations]") {
  Instance inst;
  inst.n = 2;
  inst.service_lb = {1, 1};
  inst.service_ub = {2, 2};
  inst.wait_guarantee = {30, 30};
  inst.idle_cost = {1, 1, 1};
  inst.overtime_cost = 1.25;
  inst.horizon = 10;
  inst.show_count = 0;
  const auto bm = build_raswtg_k(inst);
  const auto sol = solve(bm);
  REQUIRE(sol.status == SolveStatus::kOptimal);
  // With no services the whole horizon is idle regardless of the starts.
  REQUIRE_THAT(sol.objective, Catch::Matchers::WithinAbs(10.0, 1e-6));
}

TEST_CASE("general model matches the adversary on fixed sequences with no-shows",
          "[formulations]") {
  rng::Engine eng(13003);
  for (int trial = 0; trial < 12; ++trial) {
    const int n = rng::uniform_int(eng, 2, 3);
    const auto tag = static_cast<CostTag>(rng::uniform_int(eng, 0, 2));
    const int k = rng::uniform_int(eng, 1, n - 1);
    auto inst = testsup::random_instance(eng, n, tag, k);
    BuildOptions opts;
    opts.fixed_sequence = Sequence::identity(n);
    const auto bm = build_raswtg_k(inst, opts);
    const auto sol = solve(bm);
    REQUIRE(sol.status == SolveStatus::kOptimal);
    const auto sched = extract_schedule(bm, sol);
    REQUIRE(check_feasibility(sched, inst).feasible);
    REQUIRE_THAT(worst_case_cost(sched, inst).value,
                 Catch::Matchers::WithinAbs(sol.objective, 1e-6));
  }
}

TEST_CASE("indicator coupling agrees with the big-M coupling", "[formulations]") {
  rng::Engine eng(13004);
  for (int trial = 0; trial < 6; ++trial) {
    const int n = rng::uniform_int(eng, 2, 3);
    const int k = rng::uniform_int(eng, 1, n - 1);
    auto inst = testsup::random_instance(eng, n, CostTag::kDecreasing, k);
    BuildOptions ind;
    ind.indicator_coupling = true;
    const auto a = solve(build_raswtg_k(inst));
    const auto b = solve(build_raswtg_k(inst, ind));
    REQUIRE(a.status == SolveStatus::kOptimal);
    REQUIRE(b.status == SolveStatus::kOptimal);
    REQUIRE_THAT(a.objective, Catch::Matchers::WithinAbs(b.objective, 1e-6));
  }
}

TEST_CASE("weighted-sum model extremes", "[formulations]") {
  Instance inst;
  inst.n = 1;
  inst.service_lb = {5};
  inst.service_ub = {10};
  inst.wait_guarantee = {0};
  inst.idle_cost = {1, 1};
  inst.overtime_cost = 1.25;
  inst.horizon = 10;
  inst.show_count = 1;

  // One customer never waits, so the waiting weight is irrelevant and the
  // zero no-show objective is recovered.
  const auto a = solve(build_wsras(inst, 0.0));
  REQUIRE(a.status == SolveStatus::kOptimal);
  REQUIRE_THAT(a.objective, Catch::Matchers::WithinAbs(5.0, 1e-6));

  // A prohibitive waiting weight forces a schedule with zero worst-case wait.
  Instance several;
  several.n = 3;
  several.service_lb = {2, 3, 4};
  several.service_ub = {6, 7, 8};
  several.wait_guarantee = {100, 100, 100};
  several.idle_cost = {1, 1, 1, 1};
  several.overtime_cost = 1.25;
  several.horizon = 21;
  several.show_count = 3;
  const auto bm = build_wsras(several, 1e6);
  const auto sol = solve(bm);
  REQUIRE(sol.status == SolveStatus::kOptimal);
  const auto sched = extract_schedule(bm, sol);
  for (int i = 1; i <= several.n; ++i)
    REQUIRE_THAT(worst_case_wait(sched, several, i), Catch::Matchers::WithinAbs(0.0, 1e-5));
}

TEST_CASE("sample-average model degenerate cases", "[formulations]") {
  Instance inst;
  inst.n = 2;
  inst.service_lb = {4, 6};
  inst.service_ub = {8, 9};
  inst.wait_guarantee = {10, 10};
  inst.idle_cost = {1, 1, 1};
  inst.overtime_cost = 1.25;
  inst.horizon = 14;
  inst.show_count = 2;

  REQUIRE_THROWS_AS(build_saa_rwtg(inst, {}), validation_error);

  // A single sample at the longest services: the optimum equals the best
  // deterministic cost of that scenario under the robust waiting rows.
  const auto bm = build_saa_rwtg(inst, {inst.service_ub});
  const auto sol = solve(bm);
  REQUIRE(sol.status == SolveStatus::kOptimal);
  const auto sched = extract_schedule(bm, sol);
  Scenario scen{inst.service_ub, {1, 1}};
  REQUIRE_THAT(evaluate(sched, scen, inst).total_cost,
               Catch::Matchers::WithinAbs(sol.objective, 1e-6));
  REQUIRE(check_feasibility(sched, inst).feasible);

  // Identical samples collapse onto the same value.
  const auto twice = solve(build_saa_rwtg(inst, {inst.service_ub, inst.service_ub}));
  REQUIRE_THAT(twice.objective, Catch::Matchers::WithinAbs(sol.objective, 1e-6));
}

TEST_CASE("builders refuse the cases they do not cover", "[formulations]") {
  Instance inst;
  inst.n = 2;
  inst.service_lb = {4, 6};
  inst.service_ub = {8, 9};
  inst.wait_guarantee = {10, 10};
  inst.idle_cost = {1, 1, 1};
  inst.overtime_cost = 1.25;
  inst.horizon = 14;
  inst.show_count = 1;
  REQUIRE_THROWS_AS(build_raswtg0(inst), unsupported_error);
  REQUIRE_THROWS_AS(build_wsras(inst, 1.0), unsupported_error);
  REQUIRE_THROWS_AS(build_saa_rwtg(inst, {inst.service_ub}), unsupported_error);
}
