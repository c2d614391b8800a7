#pragma once

#include <algorithm>

#include "raswtg/adversary.hpp"
#include "raswtg/simplex.hpp"

namespace raswtg {

struct AsapOptions {
  // Solve the small window LP instead of its closed-form optimum. Slower;
  // kept for cross-checking the two routes.
  bool use_window_lp = false;
};

struct AsapResult {
  Schedule schedule;
  // True when the idle costs are non-increasing, the regime in which the
  // rule is provably optimal per sequence. Outside it the schedule is still
  // feasible but may be suboptimal.
  bool optimal_regime = false;
};

namespace detail {

/// Worst-case total service inside a window when at most `cap` of its
/// customers can show up, via the dual linear program of the selection
/// problem. Reference route for the closed-form window sum.
inline double window_bound_lp(const std::vector<double>& values, int cap) {
  if (cap <= 0 || values.empty()) return 0.0;
  const double vmax = *std::max_element(values.begin(), values.end());
  milp::LinearModel lp;
  const int alpha = lp.add_var("alpha", 0.0, std::max(vmax, 0.0));
  lp.set_objective_term(alpha, static_cast<double>(cap));
  for (std::size_t s = 0; s < values.size(); ++s) {
    const int z = lp.add_var("z" + std::to_string(s), 0.0, std::max(values[s], 0.0));
    lp.set_objective_term(z, 1.0);
    lp.add_row({{alpha, 1.0}, {z, 1.0}}, milp::Relation::GE, values[s]);
  }
  const auto res = milp::simplex_solve(lp);
  if (res.status != milp::SolveStatus::kOptimal)
    throw std::runtime_error("window LP did not solve to optimality");
  return res.objective;
}

}  // namespace detail

/// Earliest feasible start times for a fixed sequence: each appointment is
/// placed at the latest worst-case completion of its predecessors minus the
/// customer's waiting guarantee, floored at zero.
inline AsapResult asap_schedule(const Instance& inst, const Sequence& seq,
                                const AsapOptions& opts = {}) {
  validate_instance(inst);
  validate_sequence(seq, inst);
  AsapResult res;
  res.optimal_regime = costs_nonincreasing(inst);
  res.schedule.sequence = seq;
  auto& start = res.schedule.start;
  start.assign(static_cast<std::size_t>(inst.n), 0.0);

  const int cap = inst.show_count - 1;
  for (int i = 2; i <= inst.n; ++i) {
    double latest = 0.0;
    if (!opts.use_window_lp) {
      detail::TopSumWindow window(cap);
      for (int l = i - 1; l >= 1; --l) {
        window.insert(detail::ub_at(res.schedule, inst, l - 1));
        latest = std::max(latest, start[static_cast<std::size_t>(l - 1)] + window.sum());
      }
    } else {
      for (int l = i - 1; l >= 1; --l) {
        std::vector<double> values;
        for (int s = l; s <= i - 1; ++s) values.push_back(detail::ub_at(res.schedule, inst, s - 1));
        latest = std::max(latest, start[static_cast<std::size_t>(l - 1)] +
                                      detail::window_bound_lp(values, cap));
      }
    }
    const double guard =
        inst.wait_guarantee[static_cast<std::size_t>(seq.perm[static_cast<std::size_t>(i - 1)])];
    start[static_cast<std::size_t>(i - 1)] = detail::pos(latest - guard);
  }
  return res;
}

struct SvfResult {
  Sequence sequence;
  // The rule is proved optimal for constant idle costs and zero no-shows;
  // callers outside that regime get the ordering anyway plus this flag.
  bool in_regime = false;
};

/// Orders customers by service-time uncertainty plus overtime-weighted
/// waiting guarantee, smallest first; ties keep the lower customer index.
inline SvfResult svf_wtg_sequence(const Instance& inst) {
  validate_instance(inst);
  SvfResult res;
  res.in_regime = costs_constant(inst) && inst.show_count == inst.n;
  auto& perm = res.sequence.perm;
  perm.resize(static_cast<std::size_t>(inst.n));
  std::iota(perm.begin(), perm.end(), 0);
  auto key = [&](int j) {
    return inst.service_ub[static_cast<std::size_t>(j)] - inst.service_lb[static_cast<std::size_t>(j)] +
           (1.0 + inst.overtime_cost) * inst.wait_guarantee[static_cast<std::size_t>(j)];
  };
  std::stable_sort(perm.begin(), perm.end(), [&](int a, int b) { return key(a) < key(b); });
  return res;
}

/// Sequences by SVF-WTG, then schedules by the earliest-start rule. Globally
/// optimal for constant idle costs and zero no-shows; refuses other regimes.
inline Schedule pta_solve(const Instance& inst) {
  validate_instance(inst);
  if (!costs_constant(inst))
    throw regime_error("pta_solve requires constant idle costs");
  if (inst.show_count != inst.n)
    throw regime_error("pta_solve requires zero no-shows (show_count == n)");
  return asap_schedule(inst, svf_wtg_sequence(inst).sequence).schedule;
}

}  // namespace raswtg
