#include <catch2/catch_amalgamated.hpp>

#include "raswtg/adversary.hpp"
#include "raswtg/oracle.hpp"
#include "test_support.hpp"

using namespace raswtg;
using testsup::CostTag;

namespace {

Instance one_customer_box() {
  Instance inst;
  inst.n = 1;
  inst.service_lb = {5};
  inst.service_ub = {10};
  inst.wait_guarantee = {0};
  inst.idle_cost = {1, 1};
  inst.overtime_cost = 1.25;
  inst.horizon = 10;
  inst.show_count = 1;
  return inst;
}

Schedule schedule_of(const Instance& inst, std::vector<double> start) {
  Schedule s;
  s.sequence = Sequence::identity(inst.n);
  s.start = std::move(start);
  return s;
}

}  // namespace

TEST_CASE("zero no-show worst case on one customer", "[adversary]") {
  const auto inst = one_customer_box();
  const auto res = worst_case_cost_zero_noshow(schedule_of(inst, {0}), inst);
  REQUIRE_THAT(res.value, Catch::Matchers::WithinAbs(5.0, 1e-9));
  REQUIRE(res.breakpoint == 2);  // trailing idle dominates; overtime branch is 0
  const auto rep = evaluate(schedule_of(inst, {0}), res.scenario, inst);
  REQUIRE_THAT(rep.total_cost, Catch::Matchers::WithinAbs(res.value, 1e-6));
}

TEST_CASE("degenerate box reduces to a deterministic evaluation", "[adversary]") {
  Instance inst;
  inst.n = 2;
  inst.service_lb = {10, 10};
  inst.service_ub = {10, 10};
  inst.wait_guarantee = {30, 30};
  inst.idle_cost = {1, 1, 1};
  inst.overtime_cost = 1.25;
  inst.horizon = 18;
  inst.show_count = 2;
  const auto sched = schedule_of(inst, {0, 3});
  Scenario scen{{10, 10}, {1, 1}};
  const auto res = worst_case_cost_zero_noshow(sched, inst);
  REQUIRE_THAT(res.value, Catch::Matchers::WithinAbs(evaluate(sched, scen, inst).total_cost, 1e-9));
}

TEST_CASE("zero no-show path requires a full show count", "[adversary]") {
  auto inst = one_customer_box();
  inst.show_count = 0;
  REQUIRE_THROWS_AS(worst_case_cost_zero_noshow(schedule_of(inst, {0}), inst), unsupported_error);
}

TEST_CASE("general worst case matches the dedicated zero no-show path", "[adversary]") {
  rng::Engine eng(9001);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = rng::uniform_int(eng, 1, 7);
    const auto tag = static_cast<CostTag>(rng::uniform_int(eng, 0, 2));
    auto inst = testsup::random_instance(eng, n, tag, n);
    auto sched = testsup::random_schedule(eng, inst);
    sched.start[0] = 0.0;
    const auto a = worst_case_cost_zero_noshow(sched, inst);
    const auto b = worst_case_cost(sched, inst);
    REQUIRE_THAT(a.value, Catch::Matchers::WithinAbs(b.value, 1e-9));
  }
}

TEST_CASE("all-no-show worst case by hand", "[adversary]") {
  Instance inst;
  inst.n = 2;
  inst.service_lb = {1, 1};
  inst.service_ub = {2, 2};
  inst.wait_guarantee = {30, 30};
  inst.idle_cost = {1, 1, 1};
  inst.overtime_cost = 1.25;
  inst.horizon = 10;
  inst.show_count = 0;
  const auto res = worst_case_cost(schedule_of(inst, {0, 5}), inst);
  // Nobody shows: idle 5 before the second appointment and 5 up to the horizon.
  REQUIRE_THAT(res.value, Catch::Matchers::WithinAbs(10.0, 1e-9));
  REQUIRE(res.scenario.show_total() == 0);
}

TEST_CASE("worst-case cost equals brute force over corners and show sets", "[adversary]") {
  rng::Engine eng(9002);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = rng::uniform_int(eng, 1, 7);
    const auto tag = static_cast<CostTag>(rng::uniform_int(eng, 0, 2));
    const int k = rng::uniform_int(eng, 0, n);
    auto inst = testsup::random_instance(eng, n, tag, k);
    auto sched = testsup::random_schedule(eng, inst);
    sched.start[0] = 0.0;
    const auto res = worst_case_cost(sched, inst);
    const double brute = oracle::brute_worst_cost(sched, inst);
    REQUIRE_THAT(res.value, Catch::Matchers::WithinAbs(brute, 1e-6));
    // The witness scenario reproduces the reported value.
    validate_scenario(res.scenario, inst, k);
    REQUIRE_THAT(evaluate(sched, res.scenario, inst).total_cost,
                 Catch::Matchers::WithinAbs(res.value, 1e-6));
  }
}

TEST_CASE("worst-case wait basics", "[adversary]") {
  Instance inst;
  inst.n = 3;
  inst.service_lb = {10, 10, 10};
  inst.service_ub = {10, 10, 10};
  inst.wait_guarantee = {0, 0, 30};
  inst.idle_cost = {1, 1, 1, 1};
  inst.overtime_cost = 1.25;
  inst.horizon = 30;
  inst.show_count = 3;
  const auto sched = schedule_of(inst, {0, 0, 20});
  REQUIRE_THAT(worst_case_wait(sched, inst, 1), Catch::Matchers::WithinAbs(0.0, 1e-12));
  REQUIRE_THAT(worst_case_wait(sched, inst, 3), Catch::Matchers::WithinAbs(0.0, 1e-12));
}

TEST_CASE("window bound keeps only the largest service times", "[adversary]") {
  Instance inst;
  inst.n = 4;
  inst.service_lb = {5, 3, 7, 1};
  inst.service_ub = {5, 3, 7, 1};
  inst.wait_guarantee = {0, 100, 100, 100};
  inst.idle_cost = {1, 1, 1, 1, 1};
  inst.overtime_cost = 1.25;
  inst.horizon = 20;
  inst.show_count = 3;  // besides the waiting customer, two more show up
  const auto sched = schedule_of(inst, {0, 0, 0, 0});
  REQUIRE_THAT(worst_case_wait(sched, inst, 4), Catch::Matchers::WithinAbs(12.0, 1e-9));
}

TEST_CASE("worst-case wait equals brute force and grows with the show count", "[adversary]") {
  rng::Engine eng(9003);
  for (int trial = 0; trial < 150; ++trial) {
    const int n = rng::uniform_int(eng, 1, 7);
    const auto tag = static_cast<CostTag>(rng::uniform_int(eng, 0, 2));
    const int k = rng::uniform_int(eng, 0, n);
    auto inst = testsup::random_instance(eng, n, tag, k);
    auto sched = testsup::random_schedule(eng, inst);
    sched.start[0] = 0.0;
    std::vector<double> waits;
    for (int i = 1; i <= n; ++i) {
      const double w = worst_case_wait(sched, inst, i);
      REQUIRE_THAT(w, Catch::Matchers::WithinAbs(oracle::brute_worst_wait(sched, inst, i), 1e-6));
      waits.push_back(w);
    }
    if (k < n) {
      auto more = inst;
      more.show_count = k + 1;
      for (int i = 1; i <= n; ++i)
        REQUIRE(worst_case_wait(sched, more, i) >= waits[static_cast<std::size_t>(i - 1)] - 1e-12);
    }
  }
}

TEST_CASE("feasibility report flags forced violations", "[adversary]") {
  Instance inst;
  inst.n = 2;
  inst.service_lb = {5, 5};
  inst.service_ub = {9, 9};
  inst.wait_guarantee = {0, 3};
  inst.idle_cost = {1, 1, 1};
  inst.overtime_cost = 1.25;
  inst.horizon = 18;
  inst.show_count = 2;
  const auto rep = check_feasibility(schedule_of(inst, {0, 0}), inst);
  REQUIRE_FALSE(rep.feasible);
  REQUIRE(rep.violations.size() == 1);
  REQUIRE(rep.violations[0].first == 2);
  REQUIRE_THAT(rep.violations[0].second, Catch::Matchers::WithinAbs(6.0, 1e-9));
}

TEST_CASE("the fallback start times are feasible for any show count", "[adversary]") {
  rng::Engine eng(9004);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = rng::uniform_int(eng, 1, 7);
    auto inst = testsup::random_instance(eng, n, CostTag::kConstant, rng::uniform_int(eng, 0, n));
    auto seq = Sequence::identity(n);
    const auto sched = testsup::fallback_schedule(inst, seq);
    REQUIRE(check_feasibility(sched, inst).feasible);
  }
}
