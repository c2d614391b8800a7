#pragma once

#include <functional>
#include <limits>

#include "raswtg/evaluation.hpp"
#include "raswtg/rng.hpp"

namespace raswtg::oracle {

namespace detail {

template <typename F>
void for_each_corner(const Instance& inst, F&& visit) {
  const int n = inst.n;
  std::vector<double> service(static_cast<std::size_t>(n));
  for (long mask = 0; mask < (1L << n); ++mask) {
    for (int j = 0; j < n; ++j)
      service[static_cast<std::size_t>(j)] = (mask >> j) & 1
                                                 ? inst.service_ub[static_cast<std::size_t>(j)]
                                                 : inst.service_lb[static_cast<std::size_t>(j)];
    visit(service);
  }
}

template <typename F>
void for_each_show_set(int n, int k, F&& visit) {
  std::vector<int> shows(static_cast<std::size_t>(n), 0);
  std::vector<int> idx(static_cast<std::size_t>(k));
  if (k > n) return;
  for (int t = 0; t < k; ++t) idx[static_cast<std::size_t>(t)] = t;
  while (true) {
    std::fill(shows.begin(), shows.end(), 0);
    for (int t : idx) shows[static_cast<std::size_t>(t)] = 1;
    visit(shows);
    if (k == 0) break;
    int t = k - 1;
    while (t >= 0 && idx[static_cast<std::size_t>(t)] == n - k + t) --t;
    if (t < 0) break;
    ++idx[static_cast<std::size_t>(t)];
    for (int s = t + 1; s < k; ++s)
      idx[static_cast<std::size_t>(s)] = idx[static_cast<std::size_t>(s - 1)] + 1;
  }
}

inline void check_cap(const Instance& inst, int cap, const char* what) {
  if (inst.n > cap)
    throw validation_error(std::string(what) + ": refused, instance too large for brute force");
}

}  // namespace detail

/// Maximum total cost over every box corner and every show set of size k.
inline double brute_worst_cost(const Schedule& sched, const Instance& inst) {
  detail::check_cap(inst, 8, "brute_worst_cost");
  double best = -std::numeric_limits<double>::infinity();
  Scenario scen;
  detail::for_each_show_set(inst.n, inst.show_count, [&](const std::vector<int>& shows) {
    scen.show = shows;
    detail::for_each_corner(inst, [&](const std::vector<double>& service) {
      scen.service = service;
      best = std::max(best, evaluate(sched, scen, inst).total_cost);
    });
  });
  return best;
}

/// Maximum wait of appointment i (1-based) with its customer forced to show,
/// over every corner and every completion of the show set to cardinality k.
inline double brute_worst_wait(const Schedule& sched, const Instance& inst, int i) {
  detail::check_cap(inst, 8, "brute_worst_wait");
  if (i < 1 || i > inst.n) throw validation_error("brute_worst_wait: index out of range");
  if (inst.show_count == 0) return 0.0;
  const int customer = sched.sequence.perm[static_cast<std::size_t>(i - 1)];
  double best = 0.0;
  Scenario scen;
  detail::for_each_show_set(inst.n, inst.show_count, [&](const std::vector<int>& shows) {
    if (!shows[static_cast<std::size_t>(customer)]) return;
    scen.show = shows;
    detail::for_each_corner(inst, [&](const std::vector<double>& service) {
      scen.service = service;
      best = std::max(best, evaluate(sched, scen, inst).wait[static_cast<std::size_t>(i - 1)]);
    });
  });
  return best;
}

/// True iff none of `samples` uniformly drawn interior scenarios exceeds the
/// given worst-case cost by more than 1e-9.
inline bool corner_sufficiency_check(const Schedule& sched, const Instance& inst,
                                     double worst_cost, int samples = 10000,
                                     std::uint64_t seed = 42) {
  detail::check_cap(inst, 6, "corner_sufficiency_check");
  rng::Engine eng(seed);
  Scenario scen;
  scen.service.resize(static_cast<std::size_t>(inst.n));
  scen.show.resize(static_cast<std::size_t>(inst.n));
  for (int s = 0; s < samples; ++s) {
    for (int j = 0; j < inst.n; ++j)
      scen.service[static_cast<std::size_t>(j)] = rng::uniform_real(
          eng, inst.service_lb[static_cast<std::size_t>(j)], inst.service_ub[static_cast<std::size_t>(j)]);
    std::fill(scen.show.begin(), scen.show.end(), 0);
    for (int j : rng::sample_indices(eng, inst.n, inst.show_count))
      scen.show[static_cast<std::size_t>(j)] = 1;
    if (evaluate(sched, scen, inst).total_cost > worst_cost + 1e-9) return false;
  }
  return true;
}

struct GridSolution {
  Schedule schedule;
  double objective = std::numeric_limits<double>::infinity();
  double grid_gap = 0.0;  // documented optimality slack from the grid
  long points_scanned = 0;
};

/// Objective callback: full cost of one schedule, plus whether it satisfies
/// the waiting constraints the variant enforces.
struct GridObjective {
  std::function<double(const Schedule&)> cost;
  // Largest admissible start of appointment i (1-based) given fixed earlier
  // starts; +inf when the variant has no waiting constraints.
  std::function<double(const Schedule&, int)> start_floor;
};

namespace detail {

/// Largest completion time of appointment i-1 over corners and show sets of
/// size k with the customer of appointment i forced to show.
inline double brute_worst_prev_completion(const Schedule& sched, const Instance& inst, int i) {
  if (i <= 1) return 0.0;
  const int customer = sched.sequence.perm[static_cast<std::size_t>(i - 1)];
  double best = 0.0;
  Scenario scen;
  for_each_show_set(inst.n, inst.show_count, [&](const std::vector<int>& shows) {
    if (inst.show_count > 0 && !shows[static_cast<std::size_t>(customer)]) return;
    scen.show = shows;
    for_each_corner(inst, [&](const std::vector<double>& service) {
      scen.service = service;
      best = std::max(best, completion_times(sched, scen, inst)[static_cast<std::size_t>(i - 2)]);
    });
  });
  return best;
}

}  // namespace detail

/// Worst-case idle-plus-overtime objective with hard waiting floors.
inline GridObjective robust_grid_objective(const Instance& inst) {
  GridObjective obj;
  obj.cost = [&inst](const Schedule& s) { return brute_worst_cost(s, inst); };
  obj.start_floor = [&inst](const Schedule& s, int i) {
    if (i <= 1 || inst.show_count == 0) return 0.0;
    const double wait_cap =
        inst.wait_guarantee[static_cast<std::size_t>(s.sequence.perm[static_cast<std::size_t>(i - 1)])];
    return std::max(0.0, detail::brute_worst_prev_completion(s, inst, i) - wait_cap);
  };
  return obj;
}

/// Worst-case weighted idle + waiting + overtime objective, no waiting caps.
inline GridObjective weighted_grid_objective(const Instance& inst, double wait_cost) {
  GridObjective obj;
  obj.cost = [&inst, wait_cost](const Schedule& s) {
    double best = -std::numeric_limits<double>::infinity();
    Scenario scen;
    scen.show.assign(static_cast<std::size_t>(inst.n), 1);
    detail::for_each_corner(inst, [&](const std::vector<double>& service) {
      scen.service = service;
      const auto rep = evaluate(s, scen, inst);
      double value = rep.total_cost;
      for (double w : rep.wait) value += wait_cost * w;
      best = std::max(best, value);
    });
    return best;
  };
  obj.start_floor = [](const Schedule&, int) { return 0.0; };
  return obj;
}

/// Mean sampled cost objective with the box-based robust waiting floors.
inline GridObjective sample_grid_objective(const Instance& inst,
                                           const std::vector<std::vector<double>>& samples) {
  GridObjective obj;
  obj.cost = [&inst, &samples](const Schedule& s) {
    Scenario scen;
    scen.show.assign(static_cast<std::size_t>(inst.n), 1);
    double total = 0.0;
    for (const auto& sample : samples) {
      scen.service = sample;
      total += evaluate(s, scen, inst).total_cost;
    }
    return total / static_cast<double>(samples.size());
  };
  obj.start_floor = [&inst](const Schedule& s, int i) {
    if (i <= 1) return 0.0;
    const double wait_cap =
        inst.wait_guarantee[static_cast<std::size_t>(s.sequence.perm[static_cast<std::size_t>(i - 1)])];
    return std::max(0.0, detail::brute_worst_prev_completion(s, inst, i) - wait_cap);
  };
  return obj;
}

/// Exhaustive sequence enumeration plus a grid scan over start times: every
/// appointment start is placed on floor + j*step, where the floor is the
/// smallest feasible start given the earlier ones. Each sequence's incumbent
/// is then polished on successively finer local grids.
inline GridSolution brute_sequence_optimum(const Instance& inst, const GridObjective& objective,
                                           double coarse_step = 0.5, double fine_step = 0.01,
                                           double slack_cap = -1.0) {
  detail::check_cap(inst, 5, "brute_sequence_optimum");
  const int n = inst.n;
  if (slack_cap < 0.0) slack_cap = std::max(inst.horizon, inst.total_service_ub());

  GridSolution best;
  Schedule sched;
  sched.start.assign(static_cast<std::size_t>(n), 0.0);

  double cur_value = std::numeric_limits<double>::infinity();
  Schedule cur_arg;
  std::function<void(int, double, double, const Schedule*)> scan =
      [&](int i, double step, double span, const Schedule* center) {
        if (i > n) {
          ++best.points_scanned;
          const double value = objective.cost(sched);
          if (value < cur_value - 1e-12) {
            cur_value = value;
            cur_arg = sched;
          }
          return;
        }
        const double floor = std::max(objective.start_floor(sched, i), 0.0);
        double lo = floor, hi = floor + span;
        if (center != nullptr) {
          lo = std::max(lo, center->start[static_cast<std::size_t>(i - 1)] - span);
          hi = std::min(hi, center->start[static_cast<std::size_t>(i - 1)] + span);
          if (hi < lo) hi = lo;  // the floor may have moved past the window
        }
        for (double a = lo; a <= hi + 1e-12; a += step) {
          sched.start[static_cast<std::size_t>(i - 1)] = a;
          scan(i + 1, step, span, center);
          if (i == 1) break;  // the first appointment is pinned at zero
        }
      };

  std::vector<int> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<std::pair<double, Schedule>> per_sequence;
  do {
    sched.sequence.perm = perm;
    cur_value = std::numeric_limits<double>::infinity();
    scan(1, coarse_step, slack_cap, nullptr);
    if (std::isfinite(cur_value)) per_sequence.emplace_back(cur_value, cur_arg);
  } while (std::next_permutation(perm.begin(), perm.end()));

  // Polish every sequence's incumbent; the local window always spans at
  // least the previous step so the continuum optimum stays inside it.
  for (double step : {coarse_step / 5.0, fine_step}) {
    const double radius = std::max(6.0 * step, 1.5 * (step == fine_step ? coarse_step / 5.0 : coarse_step));
    for (auto& [value, pivot] : per_sequence) {
      sched.sequence = pivot.sequence;
      cur_value = value;
      cur_arg = pivot;
      scan(1, step, radius, &pivot);
      value = cur_value;
      pivot = cur_arg;
    }
  }
  for (const auto& [value, arg] : per_sequence)
    if (value < best.objective - 1e-12) {
      best.objective = value;
      best.schedule = arg;
    }
  // Every coordinate of the true optimum lies within one fine step of a
  // scanned point; idle, waiting and overtime are 1-Lipschitz in each start.
  double lip = inst.overtime_cost;
  for (double c : inst.idle_cost) lip += c;
  best.grid_gap = fine_step * lip * n;
  return best;
}

}  // namespace raswtg::oracle
