#include <catch2/catch_amalgamated.hpp>

#include "raswtg/oracle.hpp"
#include "raswtg/rules.hpp"
#include "test_support.hpp"

using namespace raswtg;
using testsup::CostTag;

namespace {

Instance ten_identical() {
  Instance inst;
  inst.n = 10;
  inst.service_lb.assign(10, 15.0);
  inst.service_ub.assign(10, 25.0);
  inst.wait_guarantee.assign(10, 30.0);
  inst.idle_cost.assign(11, 1.0);
  inst.overtime_cost = 1.25;
  inst.horizon = 10 * 25.0 - 30.0;
  inst.show_count = 10;
  return inst;
}

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

}  // namespace

TEST_CASE("earliest-start times for ten identical customers", "[rules]") {
  const auto inst = ten_identical();
  const auto res = asap_schedule(inst, Sequence::identity(10));
  const std::vector<double> expect = {0, 0, 20, 45, 70, 95, 120, 145, 170, 195};
  for (int i = 0; i < 10; ++i)
    REQUIRE_THAT(res.schedule.start[static_cast<std::size_t>(i)],
                 Catch::Matchers::WithinAbs(expect[static_cast<std::size_t>(i)], 1e-9));
  REQUIRE(res.optimal_regime);
}

TEST_CASE("earliest-start times may decrease along the day", "[rules]") {
  const auto inst = remark_instance();
  const auto res = asap_schedule(inst, Sequence::identity(3));
  REQUIRE_THAT(res.schedule.start[0], Catch::Matchers::WithinAbs(0.0, 1e-12));
  REQUIRE_THAT(res.schedule.start[1], Catch::Matchers::WithinAbs(10.0, 1e-12));
  REQUIRE_THAT(res.schedule.start[2], Catch::Matchers::WithinAbs(0.0, 1e-12));
}

TEST_CASE("zero no-show starts reduce to prefix sums minus the guarantee", "[rules]") {
  rng::Engine eng(11001);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = rng::uniform_int(eng, 1, 8);
    auto inst = testsup::random_instance(eng, n, CostTag::kConstant, n);
    const auto seq = Sequence::identity(n);
    const auto res = asap_schedule(inst, seq);
    double work = 0.0;
    for (int i = 1; i <= n; ++i) {
      const double expect =
          std::max(0.0, work - inst.wait_guarantee[static_cast<std::size_t>(i - 1)]);
      REQUIRE_THAT(res.schedule.start[static_cast<std::size_t>(i - 1)],
                   Catch::Matchers::WithinAbs(expect, 1e-9));
      work += inst.service_ub[static_cast<std::size_t>(i - 1)];
    }
  }
}

TEST_CASE("earliest-start schedules are feasible and componentwise minimal", "[rules]") {
  rng::Engine eng(11002);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = rng::uniform_int(eng, 1, 7);
    const auto tag = static_cast<CostTag>(rng::uniform_int(eng, 0, 2));
    const int k = rng::uniform_int(eng, 0, n);
    auto inst = testsup::random_instance(eng, n, tag, k);
    auto seq = Sequence::identity(n);
    auto res = asap_schedule(inst, seq);
    REQUIRE(check_feasibility(res.schedule, inst).feasible);

    for (int i = 1; i < n; ++i) {
      auto& a = res.schedule.start[static_cast<std::size_t>(i)];
      if (a <= 1e-9) continue;
      const double keep = a;
      a = std::max(0.0, a - 1e-3);
      REQUIRE_FALSE(check_feasibility(res.schedule, inst).feasible);
      a = keep;
    }
  }
}

TEST_CASE("window LP route agrees with the closed form", "[rules]") {
  rng::Engine eng(11003);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = rng::uniform_int(eng, 1, 6);
    const int k = rng::uniform_int(eng, 0, n);
    auto inst = testsup::random_instance(eng, n, CostTag::kConstant, k);
    const auto seq = Sequence::identity(n);
    const auto fast = asap_schedule(inst, seq);
    const auto slow = asap_schedule(inst, seq, AsapOptions{.use_window_lp = true});
    for (int i = 0; i < n; ++i)
      REQUIRE_THAT(fast.schedule.start[static_cast<std::size_t>(i)],
                   Catch::Matchers::WithinAbs(slow.schedule.start[static_cast<std::size_t>(i)], 1e-6));
  }
}

TEST_CASE("earliest-start is optimal among feasible schedules under non-increasing costs",
          "[rules]") {
  rng::Engine eng(11004);
  for (int trial = 0; trial < 120; ++trial) {
    const int n = rng::uniform_int(eng, 2, 5);
    const auto tag = static_cast<CostTag>(rng::uniform_int(eng, 0, 1));  // constant or decreasing
    const int k = rng::uniform_int(eng, 0, n);
    auto inst = testsup::random_instance(eng, n, tag, k);
    auto seq = Sequence::identity(n);
    const auto base = asap_schedule(inst, seq);
    const double base_cost = worst_case_cost(base.schedule, inst).value;

    // Any feasible schedule built by padding the running floors costs at
    // least as much.
    for (int probe = 0; probe < 10; ++probe) {
      Schedule padded;
      padded.sequence = seq;
      padded.start.assign(static_cast<std::size_t>(n), 0.0);
      for (int i = 2; i <= n; ++i) {
        const double floor = detail::pos(
            detail::worst_prev_completion(padded, inst, i) -
            inst.wait_guarantee[static_cast<std::size_t>(seq.perm[static_cast<std::size_t>(i - 1)])]);
        padded.start[static_cast<std::size_t>(i - 1)] =
            floor + rng::uniform_real(eng, 0.0, 6.0);
      }
      REQUIRE(check_feasibility(padded, inst).feasible);
      REQUIRE(base_cost <= worst_case_cost(padded, inst).value + 1e-9);
    }
  }
}

TEST_CASE("sequencing keys order by uncertainty plus weighted guarantee", "[rules]") {
  Instance inst;
  inst.n = 2;
  inst.service_lb = {0.0, 0.0};
  inst.service_ub = {10.0, 5.0};
  inst.wait_guarantee = {30.0, 10.0};
  inst.idle_cost = {1, 1, 1};
  inst.overtime_cost = 1.25;
  inst.horizon = 10.0;
  inst.show_count = 2;
  const auto res = svf_wtg_sequence(inst);
  REQUIRE(res.sequence.perm == std::vector<int>{1, 0});  // keys 27.5 < 77.5
  REQUIRE(res.in_regime);

  Instance same = inst;
  same.service_ub = {10.0, 10.0};
  same.wait_guarantee = {30.0, 30.0};
  REQUIRE(svf_wtg_sequence(same).sequence.perm == std::vector<int>{0, 1});  // stable ties
}

TEST_CASE("adjacent swaps out of the sequencing order never help", "[rules]") {
  rng::Engine eng(11005);
  for (int trial = 0; trial < 150; ++trial) {
    const int n = rng::uniform_int(eng, 2, 6);
    auto inst = testsup::random_instance(eng, n, CostTag::kConstant, n);
    const auto ordered = svf_wtg_sequence(inst).sequence;
    const double base = worst_case_cost(asap_schedule(inst, ordered).schedule, inst).value;
    for (int i = 0; i + 1 < n; ++i) {
      auto swapped = ordered;
      std::swap(swapped.perm[static_cast<std::size_t>(i)], swapped.perm[static_cast<std::size_t>(i + 1)]);
      const double other = worst_case_cost(asap_schedule(inst, swapped).schedule, inst).value;
      REQUIRE(base <= other + 1e-9);
    }
  }
}

TEST_CASE("the polynomial pipeline solves its regime and refuses others", "[rules]") {
  Instance single;
  single.n = 1;
  single.service_lb = {5};
  single.service_ub = {10};
  single.wait_guarantee = {0};
  single.idle_cost = {1, 1};
  single.overtime_cost = 1.25;
  single.horizon = 10;
  single.show_count = 1;
  const auto sched = pta_solve(single);
  REQUIRE(sched.start == std::vector<double>{0.0});
  REQUIRE(sched.sequence.perm == std::vector<int>{0});

  const auto inst = ten_identical();
  const auto plateau = pta_solve(inst);
  std::vector<double> gaps;
  for (int i = 0; i + 1 < inst.n; ++i)
    gaps.push_back(plateau.start[static_cast<std::size_t>(i + 1)] -
                   plateau.start[static_cast<std::size_t>(i)]);
  REQUIRE_THAT(gaps[0], Catch::Matchers::WithinAbs(0.0, 1e-9));
  REQUIRE_THAT(gaps[1], Catch::Matchers::WithinAbs(20.0, 1e-9));
  for (int i = 2; i < 9; ++i)
    REQUIRE_THAT(gaps[static_cast<std::size_t>(i)], Catch::Matchers::WithinAbs(25.0, 1e-9));

  auto wrong_costs = inst;
  wrong_costs.idle_cost[3] = 0.5;
  REQUIRE_THROWS_AS(pta_solve(wrong_costs), regime_error);
  auto with_noshows = inst;
  with_noshows.show_count = 8;
  REQUIRE_THROWS_AS(pta_solve(with_noshows), regime_error);
}
