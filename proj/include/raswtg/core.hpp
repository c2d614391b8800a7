#pragma once

#include <cstddef>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace raswtg {

/// Absolute tolerance for time comparisons in the evaluation kernel.
inline constexpr double kTimeEps = 1e-9;

/// Absolute tolerance for solver/adversary agreement checks.
inline constexpr double kSolveTol = 1e-6;

/// Invalid or inconsistent input data (dimension mismatch, bad bounds, ...).
class validation_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A method was called outside the regime in which it applies.
class regime_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A case the callee does not support (caller must use a more general path).
class unsupported_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Problem data: customers with service-time intervals, waiting guarantees,
/// idle/overtime costs, a planning horizon and the number of show-ups.
struct Instance {
  int n = 0;                          // number of customers
  std::vector<double> service_lb;     // shortest service time per customer, minutes
  std::vector<double> service_ub;     // longest service time per customer, minutes
  std::vector<double> wait_guarantee; // maximum waiting time per customer, minutes
  std::vector<double> idle_cost;      // n+1 entries: before appointment i, then before horizon end
  double overtime_cost = 0.0;
  double horizon = 0.0;               // length of the working day, minutes
  int show_count = 0;                 // exactly this many customers show up

  double total_service_ub() const {
    return std::accumulate(service_ub.begin(), service_ub.end(), 0.0);
  }
};

/// Customer order: perm[i] is the (0-based) customer served in appointment i.
struct Sequence {
  std::vector<int> perm;

  static Sequence identity(int n) {
    Sequence s;
    s.perm.resize(static_cast<std::size_t>(n));
    std::iota(s.perm.begin(), s.perm.end(), 0);
    return s;
  }
  int size() const { return static_cast<int>(perm.size()); }
};

/// A sequence plus appointment start times. start[0] is always 0; the start
/// vector need not be monotone.
struct Schedule {
  Sequence sequence;
  std::vector<double> start;

  int size() const { return static_cast<int>(start.size()); }
};

/// One realization: a service-time vector inside the box and a 0/1 show
/// vector of fixed cardinality. Both are indexed by customer.
struct Scenario {
  std::vector<double> service;
  std::vector<int> show;

  int show_total() const {
    return std::accumulate(show.begin(), show.end(), 0);
  }
};

/// Waiting, idle, overtime and total cost of one schedule under one scenario.
struct EvaluationReport {
  std::vector<double> completion; // per appointment
  std::vector<double> wait;       // per appointment
  std::vector<double> idle;       // n+1 entries, the last one before the horizon end
  double overtime = 0.0;
  double total_cost = 0.0;
};

inline void validate_instance(const Instance& inst) {
  const auto n = static_cast<std::size_t>(inst.n);
  if (inst.n < 1) throw validation_error("instance: n must be >= 1");
  if (inst.service_lb.size() != n || inst.service_ub.size() != n ||
      inst.wait_guarantee.size() != n)
    throw validation_error("instance: vector lengths must equal n");
  if (inst.idle_cost.size() != n + 1)
    throw validation_error("instance: idle_cost must have n+1 entries");
  for (std::size_t j = 0; j < n; ++j) {
    if (inst.service_lb[j] < -kTimeEps)
      throw validation_error("instance: service_lb must be non-negative");
    if (inst.service_lb[j] > inst.service_ub[j] + kTimeEps)
      throw validation_error("instance: service_lb must not exceed service_ub");
    if (inst.wait_guarantee[j] < -kTimeEps)
      throw validation_error("instance: wait_guarantee must be non-negative");
  }
  for (double c : inst.idle_cost)
    if (c < -kTimeEps) throw validation_error("instance: idle costs must be non-negative");
  if (inst.overtime_cost < -kTimeEps)
    throw validation_error("instance: overtime cost must be non-negative");
  if (inst.horizon < -kTimeEps) throw validation_error("instance: horizon must be non-negative");
  if (inst.show_count < 0 || inst.show_count > inst.n)
    throw validation_error("instance: show_count must lie in [0, n]");
}

inline void validate_sequence(const Sequence& seq, const Instance& inst) {
  if (seq.size() != inst.n)
    throw validation_error("sequence: length must equal instance size");
  std::vector<char> seen(static_cast<std::size_t>(inst.n), 0);
  for (int j : seq.perm) {
    if (j < 0 || j >= inst.n || seen[static_cast<std::size_t>(j)])
      throw validation_error("sequence: not a permutation of the customers");
    seen[static_cast<std::size_t>(j)] = 1;
  }
}

inline void validate_schedule(const Schedule& sched, const Instance& inst) {
  validate_sequence(sched.sequence, inst);
  if (sched.size() != inst.n)
    throw validation_error("schedule: start vector length must equal n");
  if (std::abs(sched.start[0]) > kTimeEps)
    throw validation_error("schedule: first appointment must start at 0");
  for (double a : sched.start)
    if (a < -kTimeEps) throw validation_error("schedule: start times must be non-negative");
}

/// Checks dimensions, box membership and (optionally) show cardinality.
inline void validate_scenario(const Scenario& scen, const Instance& inst,
                              int expected_shows = -1) {
  const auto n = static_cast<std::size_t>(inst.n);
  if (scen.service.size() != n || scen.show.size() != n)
    throw validation_error("scenario: vector lengths must equal n");
  for (std::size_t j = 0; j < n; ++j) {
    if (scen.show[j] != 0 && scen.show[j] != 1)
      throw validation_error("scenario: show entries must be 0 or 1");
    if (scen.show[j] == 1 &&
        (scen.service[j] < inst.service_lb[j] - kTimeEps ||
         scen.service[j] > inst.service_ub[j] + kTimeEps))
      throw validation_error("scenario: service time outside the interval box");
  }
  if (expected_shows >= 0 && scen.show_total() != expected_shows)
    throw validation_error("scenario: wrong show cardinality");
}

inline bool costs_nonincreasing(const Instance& inst) {
  for (std::size_t i = 0; i + 1 < inst.idle_cost.size(); ++i)
    if (inst.idle_cost[i] < inst.idle_cost[i + 1] - kTimeEps) return false;
  return true;
}

inline bool costs_constant(const Instance& inst) {
  for (std::size_t i = 1; i < inst.idle_cost.size(); ++i)
    if (std::abs(inst.idle_cost[i] - inst.idle_cost[0]) > kTimeEps) return false;
  return true;
}

}  // namespace raswtg
