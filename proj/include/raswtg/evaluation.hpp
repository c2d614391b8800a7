#pragma once

#include <algorithm>
#include <cmath>

#include "raswtg/core.hpp"

namespace raswtg {

namespace detail {

inline double pos(double x) { return x > 0.0 ? x : 0.0; }

/// Realized service time of appointment i (0-based) under a scenario.
inline double realized_service(const Schedule& sched, const Scenario& scen, int i) {
  const int j = sched.sequence.perm[static_cast<std::size_t>(i)];
  return scen.show[static_cast<std::size_t>(j)] * scen.service[static_cast<std::size_t>(j)];
}

inline void check_dims(const Schedule& sched, const Scenario& scen, const Instance& inst) {
  const auto n = static_cast<std::size_t>(inst.n);
  if (sched.start.size() != n || sched.sequence.perm.size() != n ||
      scen.service.size() != n || scen.show.size() != n)
    throw validation_error("evaluation: dimension mismatch between schedule, scenario and instance");
}

}  // namespace detail

/// Completion times by the forward recursion
/// C_i = max(A_i, C_{i-1}) + realized service of appointment i, with C_0 = 0.
inline std::vector<double> completion_times(const Schedule& sched, const Scenario& scen,
                                            const Instance& inst) {
  detail::check_dims(sched, scen, inst);
  std::vector<double> c(static_cast<std::size_t>(inst.n));
  double prev = 0.0;
  for (int i = 0; i < inst.n; ++i) {
    prev = std::max(sched.start[static_cast<std::size_t>(i)], prev) +
           detail::realized_service(sched, scen, i);
    c[static_cast<std::size_t>(i)] = prev;
  }
  return c;
}

/// Completion times in closed form: C_i is the largest start-plus-trailing-work
/// value over all anchor appointments l <= i. Equal to completion_times.
inline std::vector<double> completion_times_closed(const Schedule& sched, const Scenario& scen,
                                                   const Instance& inst) {
  detail::check_dims(sched, scen, inst);
  std::vector<double> c(static_cast<std::size_t>(inst.n));
  for (int i = 0; i < inst.n; ++i) {
    double best = -1.0;
    for (int l = i; l >= 0; --l) {
      double v = sched.start[static_cast<std::size_t>(l)];
      for (int s = l; s <= i; ++s) v += detail::realized_service(sched, scen, s);
      best = std::max(best, v);
    }
    c[static_cast<std::size_t>(i)] = best;
  }
  return c;
}

/// Waiting, idle, overtime and total cost for a fixed schedule and scenario.
/// The horizon end acts as a virtual appointment n+1 for the last idle slot,
/// and the terminal term is max(c_{n+1}*(L-C_n), c_o*(C_n-L)).
inline EvaluationReport evaluate(const Schedule& sched, const Scenario& scen,
                                 const Instance& inst) {
  detail::check_dims(sched, scen, inst);
  EvaluationReport rep;
  rep.completion = completion_times(sched, scen, inst);
  const auto n = static_cast<std::size_t>(inst.n);
  rep.wait.resize(n);
  rep.idle.resize(n + 1);
  double cost = 0.0;
  double prev = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const int j = sched.sequence.perm[i];
    rep.wait[i] = scen.show[static_cast<std::size_t>(j)] * detail::pos(prev - sched.start[i]);
    rep.idle[i] = detail::pos(sched.start[i] - prev);
    cost += inst.idle_cost[i] * rep.idle[i];
    prev = rep.completion[i];
  }
  const double last = rep.completion[n - 1];
  rep.idle[n] = detail::pos(inst.horizon - last);
  rep.overtime = detail::pos(last - inst.horizon);
  cost += std::max(inst.idle_cost[n] * (inst.horizon - last),
                   inst.overtime_cost * (last - inst.horizon));
  rep.total_cost = cost;
  return rep;
}

/// Total idle cost rewritten over the blocks between appointments with
/// strictly positive idle time. Always equals the direct per-slot sum.
inline double idle_cost_block_form(const Schedule& sched, const Scenario& scen,
                                   const Instance& inst) {
  detail::check_dims(sched, scen, inst);
  const auto comp = completion_times(sched, scen, inst);
  const int n = inst.n;

  // Extended start vector with the horizon end as appointment n+1 (1-based).
  auto start_of = [&](int i) {
    return i <= n ? sched.start[static_cast<std::size_t>(i - 1)] : inst.horizon;
  };
  auto completion_before = [&](int i) {
    return i >= 2 ? comp[static_cast<std::size_t>(i - 2)] : 0.0;
  };

  std::vector<int> blocks;  // appointments with positive idle, ascending
  for (int i = 1; i <= n + 1; ++i)
    if (start_of(i) - completion_before(i) > kTimeEps) blocks.push_back(i);
  if (blocks.empty()) return 0.0;

  const int r = static_cast<int>(blocks.size());
  double value = 0.0;
  for (int l = 0; l + 1 < r; ++l)
    value += (inst.idle_cost[static_cast<std::size_t>(blocks[l] - 1)] -
              inst.idle_cost[static_cast<std::size_t>(blocks[l + 1] - 1)]) *
             start_of(blocks[static_cast<std::size_t>(l)]);
  value += inst.idle_cost[static_cast<std::size_t>(blocks.back() - 1)] * start_of(blocks.back());
  value -= inst.idle_cost[static_cast<std::size_t>(blocks.front() - 1)] * start_of(1);

  int block_begin = 1;
  for (int l = 0; l < r; ++l) {
    double work = 0.0;
    for (int s = block_begin; s <= blocks[static_cast<std::size_t>(l)] - 1; ++s)
      work += detail::realized_service(sched, scen, s - 1);
    value -= inst.idle_cost[static_cast<std::size_t>(blocks[static_cast<std::size_t>(l)] - 1)] * work;
    block_begin = blocks[static_cast<std::size_t>(l)];
  }
  return value;
}

}  // namespace raswtg
