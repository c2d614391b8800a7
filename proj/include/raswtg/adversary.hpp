#pragma once

#include <algorithm>
#include <limits>
#include <set>
#include <utility>

#include "raswtg/evaluation.hpp"

namespace raswtg {

/// Worst-case value together with the breakpoint and a witness scenario.
struct AdversaryResult {
  double value = 0.0;
  int breakpoint = 0;  // 0 .. n+1
  Scenario scenario;
};

struct FeasibilityReport {
  bool feasible = true;
  std::vector<double> worst_wait;                 // per appointment
  std::vector<std::pair<int, double>> violations; // (appointment index 1-based, excess minutes)
};

namespace detail {

/// Running sum of the `cap` largest values in a growing multiset. Windows
/// smaller than the cap contribute everything they hold.
class TopSumWindow {
 public:
  explicit TopSumWindow(int cap) : cap_(cap) {}

  void insert(double v) {
    if (cap_ <= 0) return;
    if (static_cast<int>(top_.size()) < cap_) {
      top_.insert(v);
      top_sum_ += v;
      return;
    }
    auto smallest = top_.begin();
    if (v > *smallest) {
      top_sum_ += v - *smallest;
      rest_.insert(*smallest);
      top_.erase(smallest);
      top_.insert(v);
    } else {
      rest_.insert(v);
    }
  }

  double sum() const { return top_sum_; }

 private:
  int cap_;
  std::multiset<double> top_, rest_;
  double top_sum_ = 0.0;
};

/// Longest service time of the customer in appointment i (0-based).
inline double ub_at(const Schedule& sched, const Instance& inst, int i) {
  return inst.service_ub[static_cast<std::size_t>(sched.sequence.perm[static_cast<std::size_t>(i)])];
}
inline double lb_at(const Schedule& sched, const Instance& inst, int i) {
  return inst.service_lb[static_cast<std::size_t>(sched.sequence.perm[static_cast<std::size_t>(i)])];
}

/// Largest possible completion time of appointment i-1 (1-based i) given that
/// the customer of appointment i shows up: anchors every l < i and fills the
/// window [l, i-1] with at most k-1 show-ups of maximal service time.
inline double worst_prev_completion(const Schedule& sched, const Instance& inst, int i) {
  if (i <= 1) return 0.0;
  TopSumWindow window(inst.show_count - 1);
  double best = -std::numeric_limits<double>::infinity();
  for (int l = i - 1; l >= 1; --l) {
    window.insert(ub_at(sched, inst, l - 1));
    best = std::max(best, sched.start[static_cast<std::size_t>(l - 1)] + window.sum());
  }
  return best;
}

/// Idle cost of the prefix 1..bp-1 plus the slot before appointment bp, under
/// minimum service times and a fixed show pattern on the prefix.
/// `shows` holds 0/1 per prefix appointment (0-based). bp_start is A_{bp}
/// (the horizon for bp = n+1).
inline double prefix_idle_cost(const Schedule& sched, const Instance& inst,
                               const std::vector<char>& shows, int bp, double bp_start) {
  double completion = 0.0;
  double cost = 0.0;
  for (int i = 1; i < bp; ++i) {
    const double a = sched.start[static_cast<std::size_t>(i - 1)];
    cost += inst.idle_cost[static_cast<std::size_t>(i - 1)] * pos(a - completion);
    completion = std::max(a, completion) +
                 (shows[static_cast<std::size_t>(i - 1)] ? lb_at(sched, inst, i - 1) : 0.0);
  }
  cost += inst.idle_cost[static_cast<std::size_t>(bp - 1)] * pos(bp_start - completion);
  return cost;
}

/// Visits every subset of size q of {0,..,p-1} in lexicographic order.
template <typename F>
void for_each_subset(int p, int q, F&& visit) {
  if (q > p || q < 0) return;
  std::vector<int> idx(static_cast<std::size_t>(q));
  for (int t = 0; t < q; ++t) idx[static_cast<std::size_t>(t)] = t;
  if (q == 0) {
    visit(idx);
    return;
  }
  while (true) {
    visit(idx);
    int t = q - 1;
    while (t >= 0 && idx[static_cast<std::size_t>(t)] == p - q + t) --t;
    if (t < 0) break;
    ++idx[static_cast<std::size_t>(t)];
    for (int s = t + 1; s < q; ++s)
      idx[static_cast<std::size_t>(s)] = idx[static_cast<std::size_t>(s - 1)] + 1;
  }
}

/// Worst show pattern for one breakpoint: as many show-ups as possible on the
/// tail (longest services first, lowest index on ties), the forced head
/// show-ups placed by exact enumeration.
struct BreakpointPattern {
  double idle_value = 0.0;
  double overtime_value = 0.0;
  std::vector<char> shows;  // per appointment, 0-based
  double value() const { return idle_value + overtime_value; }
};

inline BreakpointPattern worst_pattern_for_breakpoint(const Schedule& sched, const Instance& inst,
                                                      int bp) {
  const int n = inst.n;
  const int k = inst.show_count;
  const int tail_begin = std::max(bp, 1);
  const int tail_size = n - tail_begin + 1;
  const int tail_shows = std::min(k, tail_size);
  const int head_shows = k - tail_shows;
  const int head_size = std::max(bp - 1, 0);

  BreakpointPattern pat;
  pat.shows.assign(static_cast<std::size_t>(n), 0);

  std::vector<int> order(static_cast<std::size_t>(tail_size));
  std::iota(order.begin(), order.end(), tail_begin);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return ub_at(sched, inst, a - 1) > ub_at(sched, inst, b - 1);
  });
  double tail_work = 0.0;
  for (int t = 0; t < tail_shows; ++t) {
    tail_work += ub_at(sched, inst, order[static_cast<std::size_t>(t)] - 1);
    pat.shows[static_cast<std::size_t>(order[static_cast<std::size_t>(t)] - 1)] = 1;
  }
  double start_at;
  if (bp == 0)
    start_at = 0.0;
  else if (bp == inst.n + 1)
    start_at = inst.horizon;
  else
    start_at = sched.start[static_cast<std::size_t>(bp - 1)];
  pat.overtime_value = inst.overtime_cost * pos(start_at + tail_work - inst.horizon);

  if (bp >= 1) {
    double idle_best = -std::numeric_limits<double>::infinity();
    std::vector<char> idle_arg(static_cast<std::size_t>(head_size), 0);
    std::vector<char> shows(static_cast<std::size_t>(head_size), 0);
    for_each_subset(head_size, head_shows, [&](const std::vector<int>& subset) {
      std::fill(shows.begin(), shows.end(), 0);
      for (int s : subset) shows[static_cast<std::size_t>(s)] = 1;
      const double value = prefix_idle_cost(sched, inst, shows, bp, start_at);
      if (value > idle_best) {
        idle_best = value;
        idle_arg = shows;
      }
    });
    pat.idle_value = idle_best;
    for (int i = 0; i < head_size; ++i)
      if (idle_arg[static_cast<std::size_t>(i)]) pat.shows[static_cast<std::size_t>(i)] = 1;
  }
  return pat;
}

}  // namespace detail

/// Worst-case total cost over the service-time box when everyone shows up.
/// Scans the n+2 breakpoint scenarios: minimum service before the breakpoint
/// (idle maximization), maximum service from it on (overtime maximization).
inline AdversaryResult worst_case_cost_zero_noshow(const Schedule& sched, const Instance& inst) {
  validate_schedule(sched, inst);
  if (inst.show_count != inst.n)
    throw unsupported_error("worst_case_cost_zero_noshow requires show_count == n; use worst_case_cost");

  const int n = inst.n;
  // Completions and cumulative idle cost under minimum service times.
  std::vector<double> min_completion(static_cast<std::size_t>(n) + 1, 0.0);
  std::vector<double> idle_prefix(static_cast<std::size_t>(n) + 2, 0.0);
  for (int i = 1; i <= n; ++i) {
    const double a = sched.start[static_cast<std::size_t>(i - 1)];
    idle_prefix[static_cast<std::size_t>(i)] =
        idle_prefix[static_cast<std::size_t>(i - 1)] +
        inst.idle_cost[static_cast<std::size_t>(i - 1)] *
            detail::pos(a - min_completion[static_cast<std::size_t>(i - 1)]);
    min_completion[static_cast<std::size_t>(i)] =
        std::max(a, min_completion[static_cast<std::size_t>(i - 1)]) + detail::lb_at(sched, inst, i - 1);
  }
  idle_prefix[static_cast<std::size_t>(n) + 1] =
      idle_prefix[static_cast<std::size_t>(n)] +
      inst.idle_cost[static_cast<std::size_t>(n)] *
          detail::pos(inst.horizon - min_completion[static_cast<std::size_t>(n)]);

  std::vector<double> ub_suffix(static_cast<std::size_t>(n) + 2, 0.0);
  for (int i = n; i >= 1; --i)
    ub_suffix[static_cast<std::size_t>(i)] =
        ub_suffix[static_cast<std::size_t>(i) + 1] + detail::ub_at(sched, inst, i - 1);

  AdversaryResult best;
  best.value = -std::numeric_limits<double>::infinity();
  for (int bp = 0; bp <= n + 1; ++bp) {
    double start_at;
    if (bp == 0)
      start_at = 0.0;
    else if (bp == n + 1)
      start_at = inst.horizon;
    else
      start_at = sched.start[static_cast<std::size_t>(bp - 1)];
    const double idle_part = bp == 0 ? 0.0 : idle_prefix[static_cast<std::size_t>(bp)];
    const double over_part =
        inst.overtime_cost *
        detail::pos(start_at + ub_suffix[static_cast<std::size_t>(std::max(bp, 1))] - inst.horizon);
    const double value = idle_part + over_part;
    if (value > best.value) {
      best.value = value;
      best.breakpoint = bp;
    }
  }

  best.scenario.service.resize(static_cast<std::size_t>(n));
  best.scenario.show.assign(static_cast<std::size_t>(n), 1);
  for (int i = 1; i <= n; ++i) {
    const int j = sched.sequence.perm[static_cast<std::size_t>(i - 1)];
    best.scenario.service[static_cast<std::size_t>(j)] =
        i < std::max(best.breakpoint, 1) ? inst.service_lb[static_cast<std::size_t>(j)]
                                         : inst.service_ub[static_cast<std::size_t>(j)];
  }
  return best;
}

/// Worst-case total cost over the box and all show sets of cardinality k.
/// Per breakpoint, as many show-ups as possible go to the tail (largest
/// service intervals first); the forced show-ups on the prefix are chosen by
/// exact enumeration of the possible placements.
inline AdversaryResult worst_case_cost(const Schedule& sched, const Instance& inst) {
  validate_schedule(sched, inst);
  const int n = inst.n;

  AdversaryResult best;
  best.value = -std::numeric_limits<double>::infinity();
  detail::BreakpointPattern best_pattern;
  for (int bp = 0; bp <= n + 1; ++bp) {
    auto pat = detail::worst_pattern_for_breakpoint(sched, inst, bp);
    if (pat.value() > best.value) {
      best.value = pat.value();
      best.breakpoint = bp;
      best_pattern = std::move(pat);
    }
  }

  best.scenario.service.resize(static_cast<std::size_t>(n));
  best.scenario.show.assign(static_cast<std::size_t>(n), 0);
  const int tail_begin = std::max(best.breakpoint, 1);
  for (int i = 1; i <= n; ++i) {
    const int j = sched.sequence.perm[static_cast<std::size_t>(i - 1)];
    best.scenario.service[static_cast<std::size_t>(j)] =
        i < tail_begin ? inst.service_lb[static_cast<std::size_t>(j)]
                       : inst.service_ub[static_cast<std::size_t>(j)];
    if (best_pattern.shows[static_cast<std::size_t>(i - 1)])
      best.scenario.show[static_cast<std::size_t>(j)] = 1;
  }
  return best;
}

/// Largest waiting time of appointment i (1-based) across the box and all
/// show sets, given that its customer shows up. Zero when nobody else can.
inline double worst_case_wait(const Schedule& sched, const Instance& inst, int i) {
  validate_schedule(sched, inst);
  if (i < 1 || i > inst.n) throw validation_error("worst_case_wait: appointment index out of range");
  if (inst.show_count == 0 || i == 1) return 0.0;
  const double prev = detail::worst_prev_completion(sched, inst, i);
  return detail::pos(prev - sched.start[static_cast<std::size_t>(i - 1)]);
}

/// Evaluates every appointment's worst-case wait against its customer's
/// guarantee.
inline FeasibilityReport check_feasibility(const Schedule& sched, const Instance& inst) {
  validate_schedule(sched, inst);
  FeasibilityReport rep;
  rep.worst_wait.resize(static_cast<std::size_t>(inst.n));
  for (int i = 1; i <= inst.n; ++i) {
    const double w = worst_case_wait(sched, inst, i);
    rep.worst_wait[static_cast<std::size_t>(i - 1)] = w;
    const double cap =
        inst.wait_guarantee[static_cast<std::size_t>(sched.sequence.perm[static_cast<std::size_t>(i - 1)])];
    if (w > cap + kTimeEps) {
      rep.feasible = false;
      rep.violations.emplace_back(i, w - cap);
    }
  }
  return rep;
}

}  // namespace raswtg
