#pragma once

#include <chrono>
#include <functional>
#include <memory>
#include <optional>
#include <queue>

#include "raswtg/simplex.hpp"

namespace raswtg::milp {

/// A heuristically completed assignment. When `closes_subtree` is set the
/// caller asserts it is optimal for every solution reachable from the node's
/// fixings, so the node need not be branched further.
struct CompletedIncumbent {
  std::vector<double> assignment;
  bool closes_subtree = false;
};

/// Node-level incumbent construction hook: receives the node's variable
/// bounds and the LP point; may return a full assignment, which the solver
/// verifies against the model before use.
using IncumbentCompleter = std::function<std::optional<CompletedIncumbent>(
    std::span<const double> lb, std::span<const double> ub, const std::vector<double>& x)>;

/// Optional structural branching hook, consulted before fractional-variable
/// selection. Returning a variable index forces a 0/1 split on it even when
/// it is integral in the relaxation; -1 defers to the default rule.
using ForcedBrancher = std::function<int(std::span<const double> lb, std::span<const double> ub,
                                         const std::vector<double>& x)>;

struct BnbOptions {
  double time_limit_seconds = 600.0;
  long node_limit = 1000000;
  double int_tol = 1e-6;
  double prune_tol = 1e-7;  // nodes within this of the incumbent are cut
  // Objective value of a known feasible solution; used for pruning only.
  double initial_upper_bound = std::numeric_limits<double>::infinity();
  IncumbentCompleter complete_incumbent;
  ForcedBrancher forced_branch;
  SimplexOptions lp;
};

namespace detail {

struct NodeDelta {
  std::shared_ptr<NodeDelta> parent;
  int var = -1;
  double lb = 0.0, ub = 0.0;
  int activate_indicator = -1;  // index into model.indicators, or -1
};

struct Node {
  double bound = -kInf;
  long id = 0;
  std::shared_ptr<NodeDelta> delta;
};

struct NodeOrder {
  bool operator()(const Node& a, const Node& b) const {
    if (a.bound != b.bound) return a.bound > b.bound;  // min-heap on bound
    return a.id > b.id;
  }
};

}  // namespace detail

/// Best-bound branch and bound over the binary variables, branching on the
/// most fractional one (branch priority first, lowest index on ties).
inline MilpSolution branch_and_bound(const LinearModel& model, const BnbOptions& opts = {}) {
  model.validate();
  const auto t0 = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  };

  MilpSolution sol;
  // Internally all bounds exclude the objective offset.
  const double external_ub = opts.initial_upper_bound - model.objective_offset;
  const int nv = static_cast<int>(model.vars.size());
  std::vector<double> base_lb(static_cast<std::size_t>(nv)), base_ub(static_cast<std::size_t>(nv));
  for (int j = 0; j < nv; ++j) {
    base_lb[static_cast<std::size_t>(j)] = model.vars[static_cast<std::size_t>(j)].lb;
    base_ub[static_cast<std::size_t>(j)] = model.vars[static_cast<std::size_t>(j)].ub;
  }

  // Indicator rows grouped by their binary variable.
  std::vector<std::vector<int>> indicators_of(static_cast<std::size_t>(nv));
  for (std::size_t t = 0; t < model.indicators.size(); ++t)
    indicators_of[static_cast<std::size_t>(model.indicators[t].var)].push_back(static_cast<int>(t));

  std::priority_queue<detail::Node, std::vector<detail::Node>, detail::NodeOrder> open;
  open.push(detail::Node{-detail::kInf, 0, nullptr});
  long next_id = 1;
  double incumbent = std::numeric_limits<double>::infinity();
  std::vector<double> incumbent_x;
  double exhausted_bound = detail::kInf;  // min bound among nodes still open when stopping early
  bool stopped_early = false;
  SolveStatus stop_status = SolveStatus::kOptimal;

  std::vector<double> lb, ub;
  std::vector<RowConstraint> active_rows;

  auto row_satisfied = [&](const RowConstraint& row, const std::vector<double>& x) {
    double v = 0.0;
    for (const auto& t : row.terms) v += t.coef * x[static_cast<std::size_t>(t.var)];
    switch (row.rel) {
      case Relation::LE: return v <= row.rhs + 1e-7;
      case Relation::GE: return v >= row.rhs - 1e-7;
      case Relation::EQ: return std::abs(v - row.rhs) <= 1e-7;
    }
    return true;
  };

  // Full feasibility check for externally constructed assignments.
  auto assignment_feasible = [&](const std::vector<double>& x) {
    if (static_cast<int>(x.size()) != nv) return false;
    for (int j = 0; j < nv; ++j) {
      const auto& v = model.vars[static_cast<std::size_t>(j)];
      if (x[static_cast<std::size_t>(j)] < v.lb - 1e-7 || x[static_cast<std::size_t>(j)] > v.ub + 1e-7)
        return false;
      if (v.is_binary && std::min(x[static_cast<std::size_t>(j)], 1.0 - x[static_cast<std::size_t>(j)]) >
                             opts.int_tol)
        return false;
    }
    for (const auto& row : model.rows)
      if (!row_satisfied(row, x)) return false;
    for (const auto& ind : model.indicators)
      if (x[static_cast<std::size_t>(ind.var)] > 0.5 && !row_satisfied(ind.row, x)) return false;
    return true;
  };
  auto objective_of = [&](const std::vector<double>& x) {
    double v = 0.0;
    for (const auto& t : model.objective) v += t.coef * x[static_cast<std::size_t>(t.var)];
    return v;
  };

  while (!open.empty()) {
    if (sol.node_count >= opts.node_limit || elapsed() > opts.time_limit_seconds) {
      stopped_early = true;
      stop_status = sol.node_count >= opts.node_limit ? SolveStatus::kNodeLimit : SolveStatus::kTimeLimit;
      exhausted_bound = std::min(exhausted_bound, open.top().bound);
      break;
    }
    detail::Node node = open.top();
    open.pop();
    if (node.bound >= incumbent - opts.prune_tol || node.bound > external_ub + 1e-9) continue;
    ++sol.node_count;

    // Materialize the node's bounds and active indicator rows.
    lb = base_lb;
    ub = base_ub;
    active_rows.clear();
    for (auto* d = node.delta.get(); d != nullptr; d = d->parent.get()) {
      if (d->var >= 0) {
        lb[static_cast<std::size_t>(d->var)] = std::max(lb[static_cast<std::size_t>(d->var)], d->lb);
        ub[static_cast<std::size_t>(d->var)] = std::min(ub[static_cast<std::size_t>(d->var)], d->ub);
      }
      if (d->activate_indicator >= 0)
        active_rows.push_back(model.indicators[static_cast<std::size_t>(d->activate_indicator)].row);
    }

    SimplexResult rel = solve_lp(model, lb, ub, active_rows, opts.lp);
    if (rel.status == SolveStatus::kInfeasible) continue;
    if (rel.status == SolveStatus::kUnbounded) {
      sol.status = SolveStatus::kUnbounded;
      return sol;
    }
    const double bound = rel.objective;
    if (rel.status == SolveStatus::kIterationLimit) {
      // The node's own bound is unreliable; abandon the subtree but account
      // for it via the parent bound so the reported gap stays valid.
      stopped_early = true;
      stop_status = SolveStatus::kIterationLimit;
      exhausted_bound = std::min(exhausted_bound, node.bound);
      continue;
    }
    if (bound >= incumbent - opts.prune_tol || bound > external_ub + 1e-9) continue;

    if (opts.complete_incumbent) {
      if (auto candidate = opts.complete_incumbent(lb, ub, rel.x)) {
        if (assignment_feasible(candidate->assignment)) {
          const double value = objective_of(candidate->assignment);
          if (value < incumbent - 1e-12) {
            incumbent = value;
            incumbent_x = candidate->assignment;
          }
          // Subtree-optimal completions or ones matching the node bound end
          // the node right here.
          if (candidate->closes_subtree || value <= bound + 1e-7) continue;
          if (bound >= incumbent - opts.prune_tol) continue;
        }
      }
    }

    // Pick the branching variable.
    int branch_var = -1;
    double branch_frac = -1.0;
    int branch_prio = std::numeric_limits<int>::min();
    if (opts.forced_branch) {
      const int fv = opts.forced_branch(lb, ub, rel.x);
      if (fv >= 0 && ub[static_cast<std::size_t>(fv)] - lb[static_cast<std::size_t>(fv)] > 0.5)
        branch_var = fv;
    }
    if (branch_var < 0)
      for (int j = 0; j < nv; ++j) {
        if (!model.vars[static_cast<std::size_t>(j)].is_binary) continue;
        const double v = rel.x[static_cast<std::size_t>(j)];
        const double dist = std::min(v, 1.0 - v);  // distance from integrality
        if (dist <= opts.int_tol) continue;
        const int prio = model.vars[static_cast<std::size_t>(j)].branch_priority;
        if (prio > branch_prio || (prio == branch_prio && dist > branch_frac + 1e-12)) {
          branch_prio = prio;
          branch_frac = dist;
          branch_var = j;
        }
      }

    if (branch_var < 0) {
      // All binaries integral; check indicator implications.
      int violated = -1;
      for (std::size_t t = 0; t < model.indicators.size(); ++t) {
        const auto& ind = model.indicators[t];
        if (rel.x[static_cast<std::size_t>(ind.var)] > 0.5 && !row_satisfied(ind.row, rel.x)) {
          bool already_active = false;
          for (auto* d = node.delta.get(); d != nullptr; d = d->parent.get())
            already_active |= d->activate_indicator == static_cast<int>(t);
          if (!already_active) {
            violated = static_cast<int>(t);
            break;
          }
        }
      }
      if (violated >= 0) {
        const int v = model.indicators[static_cast<std::size_t>(violated)].var;
        auto down = std::make_shared<detail::NodeDelta>();
        down->parent = node.delta;
        down->var = v;
        down->lb = 0.0;
        down->ub = 0.0;
        open.push(detail::Node{bound, next_id++, down});
        auto up = std::make_shared<detail::NodeDelta>();
        up->parent = node.delta;
        up->var = v;
        up->lb = 1.0;
        up->ub = 1.0;
        up->activate_indicator = violated;
        open.push(detail::Node{bound, next_id++, up});
        continue;
      }
      if (bound < incumbent - 1e-12) {
        incumbent = bound;
        incumbent_x = rel.x;
      }
      continue;
    }

    auto down = std::make_shared<detail::NodeDelta>();
    down->parent = node.delta;
    down->var = branch_var;
    down->lb = 0.0;
    down->ub = 0.0;
    open.push(detail::Node{bound, next_id++, down});

    auto up = std::make_shared<detail::NodeDelta>();
    up->parent = node.delta;
    up->var = branch_var;
    up->lb = 1.0;
    up->ub = 1.0;
    if (!indicators_of[static_cast<std::size_t>(branch_var)].empty()) {
      // Chain all indicator rows of this binary onto the up-branch.
      std::shared_ptr<detail::NodeDelta> tail = up;
      bool first = true;
      for (int t : indicators_of[static_cast<std::size_t>(branch_var)]) {
        if (first) {
          tail->activate_indicator = t;
          first = false;
        } else {
          auto link = std::make_shared<detail::NodeDelta>();
          link->parent = tail;
          link->activate_indicator = t;
          tail = link;
        }
      }
      open.push(detail::Node{bound, next_id++, tail});
    } else {
      open.push(detail::Node{bound, next_id++, up});
    }
  }

  sol.solve_seconds = elapsed();
  while (!open.empty()) {
    exhausted_bound = std::min(exhausted_bound, open.top().bound);
    break;
  }
  if (std::isfinite(incumbent)) {
    sol.objective = incumbent + model.objective_offset;
    sol.assignment = std::move(incumbent_x);
    sol.has_assignment = true;
    sol.status = stopped_early ? stop_status : SolveStatus::kOptimal;
    sol.best_bound = stopped_early ? std::min(exhausted_bound, incumbent) + model.objective_offset
                                   : sol.objective;
  } else {
    sol.status = stopped_early ? stop_status : SolveStatus::kInfeasible;
    if (stopped_early && std::isfinite(exhausted_bound))
      sol.best_bound = exhausted_bound + model.objective_offset;
  }
  return sol;
}

}  // namespace raswtg::milp
