#pragma once

#include <string>

#include "raswtg/core.hpp"
#include "raswtg/rng.hpp"

namespace testsup {

using raswtg::Instance;
using raswtg::Scenario;
using raswtg::Schedule;
using raswtg::Sequence;

enum class CostTag { kConstant, kDecreasing, kIncreasing };

inline std::vector<double> cost_vector(CostTag tag, int n) {
  std::vector<double> c(static_cast<std::size_t>(n) + 1);
  for (int i = 1; i <= n + 1; ++i) {
    double v = 1.0;
    if (tag == CostTag::kDecreasing) v = 1.0 - (i - 1) / (2.0 * n);
    if (tag == CostTag::kIncreasing) v = (n + i - 1) / (2.0 * n);
    c[static_cast<std::size_t>(i - 1)] = v;
  }
  return c;
}

inline Instance random_instance(raswtg::rng::Engine& eng, int n, CostTag tag, int k) {
  Instance inst;
  inst.n = n;
  inst.show_count = k;
  for (int j = 0; j < n; ++j) {
    const double lo = raswtg::rng::uniform_real(eng, 1.0, 10.0);
    const double width = raswtg::rng::uniform_real(eng, 0.0, 8.0);
    inst.service_lb.push_back(lo);
    inst.service_ub.push_back(lo + width);
    inst.wait_guarantee.push_back(raswtg::rng::uniform_real(eng, 0.0, 20.0));
  }
  inst.idle_cost = cost_vector(tag, n);
  inst.overtime_cost = raswtg::rng::uniform_real(eng, 0.0, 2.5);
  // Mix the horizon rule with random horizons so both idle and overtime bind.
  const double total_ub = inst.total_service_ub();
  if (raswtg::rng::below(eng, 2) == 0)
    inst.horizon = std::max(0.0, total_ub - inst.wait_guarantee.back());
  else
    inst.horizon = raswtg::rng::uniform_real(eng, 0.4, 1.1) * total_ub;
  return inst;
}

inline Schedule random_schedule(raswtg::rng::Engine& eng, const Instance& inst) {
  Schedule s;
  s.sequence.perm = raswtg::rng::sample_indices(eng, inst.n, inst.n);
  s.start.push_back(0.0);
  for (int i = 1; i < inst.n; ++i)
    s.start.push_back(raswtg::rng::uniform_real(eng, 0.0, inst.total_service_ub()));
  return s;
}

inline Scenario random_scenario(raswtg::rng::Engine& eng, const Instance& inst) {
  Scenario sc;
  for (int j = 0; j < inst.n; ++j)
    sc.service.push_back(raswtg::rng::uniform_real(eng, inst.service_lb[static_cast<std::size_t>(j)],
                                                   inst.service_ub[static_cast<std::size_t>(j)]));
  sc.show.assign(static_cast<std::size_t>(inst.n), 0);
  for (int j : raswtg::rng::sample_indices(eng, inst.n, inst.show_count))
    sc.show[static_cast<std::size_t>(j)] = 1;
  return sc;
}

/// The always-feasible start times for a fixed sequence under zero no-shows.
inline Schedule fallback_schedule(const Instance& inst, const Sequence& seq) {
  Schedule s;
  s.sequence = seq;
  s.start.assign(static_cast<std::size_t>(inst.n), 0.0);
  double work = 0.0;
  for (int i = 2; i <= inst.n; ++i) {
    work += inst.service_ub[static_cast<std::size_t>(seq.perm[static_cast<std::size_t>(i - 2)])];
    const double w = inst.wait_guarantee[static_cast<std::size_t>(seq.perm[static_cast<std::size_t>(i - 1)])];
    s.start[static_cast<std::size_t>(i - 1)] = std::max(0.0, work - w);
  }
  return s;
}

}  // namespace testsup
