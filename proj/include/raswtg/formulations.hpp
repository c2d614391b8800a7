#pragma once

#include <memory>
#include <optional>
#include <string>

#include "raswtg/branch_and_bound.hpp"
#include "raswtg/rules.hpp"

namespace raswtg::milp {

struct BuildOptions {
  // Pin the customer order instead of optimizing over it.
  std::optional<Sequence> fixed_sequence;
  // Idle-gap coupling of the general model: big-M rows by default, exact
  // indicator branching when set.
  bool indicator_coupling = false;
  // Exact per-breakpoint scenario rows for the general model. They keep the
  // objective equal to the true worst case for every 0 < k < n.
  bool guard_rows = true;
};

/// A built model plus the variable handles needed to read a schedule back.
struct BuiltModel {
  LinearModel model;
  std::vector<std::vector<int>> assign;  // assign[i][j]: customer j in appointment i
  std::vector<int> start;                // A_i
  int bound_var = -1;                    // U where the formulation has one
  // Set by the general builder: derives a full assignment from a settled
  // customer order, letting the search skip the certificate variables.
  IncumbentCompleter completion;
  // Set alongside: pins the customer order variable by variable so completed
  // subtrees can be closed outright.
  ForcedBrancher forced_branch;
};

namespace build_detail {

struct Box {
  double start_max;    // no optimal start lies above this
  double comp_max;     // completion-time cap
  double service_sum;  // sum of longest services
};

inline Box bounds_of(const Instance& inst, double extra_service = 0.0) {
  Box b;
  b.service_sum = inst.total_service_ub() + extra_service;
  b.start_max = inst.horizon + b.service_sum;
  b.comp_max = b.start_max + b.service_sum;
  return b;
}

inline void add_assignment_vars(BuiltModel& bm, const Instance& inst,
                                const std::optional<Sequence>& fixed) {
  const int n = inst.n;
  bm.assign.assign(static_cast<std::size_t>(n), std::vector<int>(static_cast<std::size_t>(n), -1));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const int v = bm.model.add_binary("pi_" + std::to_string(i + 1) + "_" + std::to_string(j + 1),
                                        /*priority=*/10);
      bm.assign[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = v;
      if (fixed) {
        const double val = fixed->perm[static_cast<std::size_t>(i)] == j ? 1.0 : 0.0;
        bm.model.vars[static_cast<std::size_t>(v)].lb = val;
        bm.model.vars[static_cast<std::size_t>(v)].ub = val;
      }
    }
  for (int i = 0; i < n; ++i) {
    std::vector<LinearTerm> row;
    for (int j = 0; j < n; ++j)
      row.push_back({bm.assign[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)], 1.0});
    bm.model.add_row(std::move(row), Relation::EQ, 1.0);
  }
  for (int j = 0; j < n; ++j) {
    std::vector<LinearTerm> col;
    for (int i = 0; i < n; ++i)
      col.push_back({bm.assign[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)], 1.0});
    bm.model.add_row(std::move(col), Relation::EQ, 1.0);
  }
}

inline void add_start_vars(BuiltModel& bm, const Instance& inst, double start_max) {
  bm.start.clear();
  for (int i = 0; i < inst.n; ++i)
    bm.start.push_back(bm.model.add_var("A_" + std::to_string(i + 1), 0.0,
                                        i == 0 ? 0.0 : start_max));
}

/// Service of appointment i as assignment-weighted terms.
inline std::vector<LinearTerm> service_terms(const BuiltModel& bm, const Instance& inst, int i,
                                             const std::vector<double>& per_customer,
                                             double scale = 1.0) {
  std::vector<LinearTerm> terms;
  for (int j = 0; j < inst.n; ++j)
    terms.push_back({bm.assign[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)],
                     scale * per_customer[static_cast<std::size_t>(j)]});
  return terms;
}

inline void append(std::vector<LinearTerm>& into, const std::vector<LinearTerm>& terms,
                   double scale = 1.0) {
  for (const auto& t : terms) into.push_back({t.var, scale * t.coef});
}

/// Exact completion update completion = max(start_expr, prev) + service via
/// the two-sided big-M linearization with one switch binary.
inline int add_max_plus_service(LinearModel& m, int completion, int prev /*-1 for zero*/,
                                int start_var /*-1 when fixed*/, double start_const,
                                const std::vector<LinearTerm>& service, double big_m,
                                const std::string& tag, int priority = 5) {
  const int z = m.add_binary("z_" + tag, priority);
  // completion >= start + service
  std::vector<LinearTerm> r1{{completion, 1.0}};
  if (start_var >= 0) r1.push_back({start_var, -1.0});
  append(r1, service, -1.0);
  m.add_row(std::move(r1), Relation::GE, start_var >= 0 ? 0.0 : start_const);
  // completion >= prev + service
  std::vector<LinearTerm> r2{{completion, 1.0}};
  if (prev >= 0) r2.push_back({prev, -1.0});
  append(r2, service, -1.0);
  m.add_row(std::move(r2), Relation::GE, 0.0);
  // completion <= start + service + z*M
  std::vector<LinearTerm> r3{{completion, 1.0}};
  if (start_var >= 0) r3.push_back({start_var, -1.0});
  append(r3, service, -1.0);
  r3.push_back({z, -big_m});
  m.add_row(std::move(r3), Relation::LE, start_var >= 0 ? 0.0 : start_const);
  // completion <= prev + service + (1-z)*M
  std::vector<LinearTerm> r4{{completion, 1.0}};
  if (prev >= 0) r4.push_back({prev, -1.0});
  append(r4, service, -1.0);
  r4.push_back({z, big_m});
  m.add_row(std::move(r4), Relation::LE, big_m);
  return z;
}

struct WaitDualHandle {
  int i = 0, l = 0, alpha = -1;
  std::vector<int> p;  // p[s - l] for window appointments s in [l, i-1]
};

/// Robust waiting rows: anchored at every earlier appointment l, the window
/// work is the full sum when fewer than k customers fit, else bounded through
/// the dual of the largest-(k-1)-sum selection.
inline void add_waiting_rows(BuiltModel& bm, const Instance& inst,
                             std::vector<WaitDualHandle>* record = nullptr) {
  const int n = inst.n;
  const int k = inst.show_count;
  if (k == 0) return;  // nobody who shows can wait
  auto& m = bm.model;
  const double alpha_max = *std::max_element(inst.service_ub.begin(), inst.service_ub.end());
  for (int i = 2; i <= n; ++i) {
    std::vector<LinearTerm> guard = service_terms(bm, inst, i - 1, inst.wait_guarantee);
    for (int l = 1; l <= i - 1; ++l) {
      std::vector<LinearTerm> row{{bm.start[static_cast<std::size_t>(l - 1)], 1.0},
                                  {bm.start[static_cast<std::size_t>(i - 1)], -1.0}};
      append(row, guard, -1.0);
      if (i - l <= k - 1) {
        for (int s = l; s <= i - 1; ++s) append(row, service_terms(bm, inst, s - 1, inst.service_ub));
      } else {
        const std::string tag = std::to_string(i) + "_" + std::to_string(l);
        WaitDualHandle wd;
        wd.i = i;
        wd.l = l;
        wd.alpha = m.add_var("alpha_" + tag, 0.0, alpha_max);
        row.push_back({wd.alpha, static_cast<double>(k - 1)});
        for (int s = l; s <= i - 1; ++s) {
          const int p = m.add_var("pdual_" + tag + "_" + std::to_string(s), 0.0, alpha_max);
          wd.p.push_back(p);
          row.push_back({p, 1.0});
          std::vector<LinearTerm> dual{{wd.alpha, 1.0}, {p, 1.0}};
          append(dual, service_terms(bm, inst, s - 1, inst.service_ub), -1.0);
          m.add_row(std::move(dual), Relation::GE, 0.0);
        }
        if (record != nullptr) record->push_back(std::move(wd));
      }
      m.add_row(std::move(row), Relation::LE, 0.0);
    }
  }
}

/// Anchored idle floors: the gap before appointment i is at least the start
/// difference to any earlier appointment minus the work released in between.
/// These rows do not involve the completion chain, so they keep the
/// relaxation tight where the chain linearization is loose.
/// `service_of(s)` returns the released-work terms of appointment s (1-based).
template <typename ServiceFn>
inline void add_anchored_idle_rows(LinearModel& m, const BuiltModel& bm, const Instance& inst,
                                   const std::vector<int>& idle_vars, int first_idle_index,
                                   ServiceFn&& service_of) {
  const int n = inst.n;
  for (int i = 2; i <= n + 1; ++i) {
    const int idle = idle_vars[static_cast<std::size_t>(i - first_idle_index)];
    for (int l = 1; l <= i - 1 && l <= n; ++l) {
      std::vector<LinearTerm> row{{idle, 1.0}, {bm.start[static_cast<std::size_t>(l - 1)], 1.0}};
      double rhs = 0.0;
      if (i <= n)
        row.push_back({bm.start[static_cast<std::size_t>(i - 1)], -1.0});
      else
        rhs = inst.horizon;
      for (int s = l; s <= i - 1; ++s) append(row, service_of(s));
      m.add_row(std::move(row), Relation::GE, rhs);
    }
  }
}

}  // namespace build_detail

/// Zero no-show formulation: per-breakpoint idle/overtime rows bound U, with
/// the minimum-service completion recursion linearized exactly.
inline BuiltModel build_raswtg0(const Instance& inst, const BuildOptions& opts = {}) {
  validate_instance(inst);
  if (inst.show_count != inst.n)
    throw unsupported_error("build_raswtg0 requires show_count == n; use build_raswtg_k");
  if (opts.fixed_sequence) validate_sequence(*opts.fixed_sequence, inst);

  const int n = inst.n;
  const auto box = build_detail::bounds_of(inst);
  BuiltModel bm;
  auto& m = bm.model;

  double cost_sum = inst.overtime_cost;
  for (double c : inst.idle_cost) cost_sum += c;
  const double u_max = cost_sum * (box.comp_max + box.service_sum);
  bm.bound_var = m.add_var("U", 0.0, u_max);
  m.set_objective_term(bm.bound_var, 1.0);

  build_detail::add_assignment_vars(bm, inst, opts.fixed_sequence);
  build_detail::add_start_vars(bm, inst, box.start_max);

  std::vector<int> cmin(static_cast<std::size_t>(n));
  for (int i = 1; i <= n; ++i)
    cmin[static_cast<std::size_t>(i - 1)] = m.add_var("Cmin_" + std::to_string(i), 0.0, box.comp_max);
  std::vector<int> idle(static_cast<std::size_t>(n) + 1);
  for (int i = 1; i <= n + 1; ++i)
    idle[static_cast<std::size_t>(i - 1)] = m.add_var("idle_" + std::to_string(i), 0.0, box.comp_max);
  std::vector<int> over(static_cast<std::size_t>(n));
  for (int i = 1; i <= n; ++i)
    over[static_cast<std::size_t>(i - 1)] = m.add_var("over_" + std::to_string(i), 0.0, box.comp_max);

  // Breakpoint rows: U covers the idle cost up to the breakpoint plus the
  // overtime accumulated from it.
  for (int bp = 1; bp <= n + 1; ++bp) {
    std::vector<LinearTerm> row{{bm.bound_var, 1.0}};
    for (int i = 1; i <= bp; ++i)
      row.push_back({idle[static_cast<std::size_t>(i - 1)],
                     -inst.idle_cost[static_cast<std::size_t>(i - 1)]});
    if (bp <= n) row.push_back({over[static_cast<std::size_t>(bp - 1)], -inst.overtime_cost});
    m.add_row(std::move(row), Relation::GE, 0.0);
  }

  // idle_i >= A_i - Cmin_{i-1}
  m.add_row({{idle[0], 1.0}, {bm.start[0], -1.0}}, Relation::GE, 0.0);
  for (int i = 2; i <= n; ++i)
    m.add_row({{idle[static_cast<std::size_t>(i - 1)], 1.0},
               {bm.start[static_cast<std::size_t>(i - 1)], -1.0},
               {cmin[static_cast<std::size_t>(i - 2)], 1.0}},
              Relation::GE, 0.0);
  m.add_row({{idle[static_cast<std::size_t>(n)], 1.0}, {cmin[static_cast<std::size_t>(n - 1)], 1.0}},
            Relation::GE, inst.horizon);

  // Completion recursion under minimum service times.
  for (int i = 1; i <= n; ++i)
    build_detail::add_max_plus_service(
        m, cmin[static_cast<std::size_t>(i - 1)], i >= 2 ? cmin[static_cast<std::size_t>(i - 2)] : -1,
        bm.start[static_cast<std::size_t>(i - 1)], 0.0,
        build_detail::service_terms(bm, inst, i - 1, inst.service_lb), box.comp_max,
        "c" + std::to_string(i));

  // over_bp >= A_bp + remaining longest services - L
  for (int bp = 1; bp <= n; ++bp) {
    std::vector<LinearTerm> row{{over[static_cast<std::size_t>(bp - 1)], 1.0},
                                {bm.start[static_cast<std::size_t>(bp - 1)], -1.0}};
    for (int s = bp; s <= n; ++s)
      build_detail::append(row, build_detail::service_terms(bm, inst, s - 1, inst.service_ub), -1.0);
    m.add_row(std::move(row), Relation::GE, -inst.horizon);
  }

  build_detail::add_waiting_rows(bm, inst);
  return bm;
}

/// Weighted-sum robust formulation: per-breakpoint completion chains with
/// idle, waiting and overtime all priced into the single bound.
inline BuiltModel build_wsras(const Instance& inst, double wait_cost, const BuildOptions& opts = {}) {
  validate_instance(inst);
  if (inst.show_count != inst.n)
    throw unsupported_error("build_wsras requires show_count == n");
  if (wait_cost < 0.0) throw validation_error("build_wsras: wait cost must be non-negative");
  if (opts.fixed_sequence) validate_sequence(*opts.fixed_sequence, inst);

  const int n = inst.n;
  const auto box = build_detail::bounds_of(inst);
  BuiltModel bm;
  auto& m = bm.model;

  double cost_sum = inst.overtime_cost + wait_cost * n;
  for (double c : inst.idle_cost) cost_sum += c;
  bm.bound_var = m.add_var("U", 0.0, cost_sum * (box.comp_max + box.service_sum));
  m.set_objective_term(bm.bound_var, 1.0);

  build_detail::add_assignment_vars(bm, inst, opts.fixed_sequence);
  build_detail::add_start_vars(bm, inst, box.start_max);

  for (int bp = 1; bp <= n + 1; ++bp) {
    const std::string sfx = "_s" + std::to_string(bp);
    std::vector<int> comp(static_cast<std::size_t>(n));
    for (int i = 1; i <= n; ++i)
      comp[static_cast<std::size_t>(i - 1)] =
          m.add_var("C" + sfx + "_" + std::to_string(i), 0.0, box.comp_max);
    std::vector<LinearTerm> bound_row{{bm.bound_var, 1.0}};

    for (int i = 1; i <= n; ++i) {
      // Before the breakpoint customers are quick, from it on they are slow.
      const auto& per_customer = i < bp ? inst.service_lb : inst.service_ub;
      build_detail::add_max_plus_service(
          m, comp[static_cast<std::size_t>(i - 1)],
          i >= 2 ? comp[static_cast<std::size_t>(i - 2)] : -1,
          bm.start[static_cast<std::size_t>(i - 1)], 0.0,
          build_detail::service_terms(bm, inst, i - 1, per_customer), box.comp_max,
          "c" + std::to_string(i) + sfx);

      const int idle = m.add_var("idle" + sfx + "_" + std::to_string(i), 0.0, box.comp_max);
      std::vector<LinearTerm> idle_row{{idle, 1.0}, {bm.start[static_cast<std::size_t>(i - 1)], -1.0}};
      if (i >= 2) idle_row.push_back({comp[static_cast<std::size_t>(i - 2)], 1.0});
      m.add_row(std::move(idle_row), Relation::GE, 0.0);
      bound_row.push_back({idle, -inst.idle_cost[static_cast<std::size_t>(i - 1)]});

      if (wait_cost > 0.0 && i >= 2) {
        const int wait = m.add_var("wait" + sfx + "_" + std::to_string(i), 0.0, box.comp_max);
        m.add_row({{wait, 1.0},
                   {comp[static_cast<std::size_t>(i - 2)], -1.0},
                   {bm.start[static_cast<std::size_t>(i - 1)], 1.0}},
                  Relation::GE, 0.0);
        bound_row.push_back({wait, -wait_cost});
      }
    }
    const int tail_idle = m.add_var("idle" + sfx + "_end", 0.0, box.comp_max);
    m.add_row({{tail_idle, 1.0}, {comp[static_cast<std::size_t>(n - 1)], 1.0}}, Relation::GE,
              inst.horizon);
    bound_row.push_back({tail_idle, -inst.idle_cost[static_cast<std::size_t>(n)]});
    const int over = m.add_var("over" + sfx, 0.0, box.comp_max);
    m.add_row({{over, 1.0}, {comp[static_cast<std::size_t>(n - 1)], -1.0}}, Relation::GE,
              -inst.horizon);
    bound_row.push_back({over, -inst.overtime_cost});
    m.add_row(std::move(bound_row), Relation::GE, 0.0);
  }
  return bm;
}

/// Sample-average formulation with the robust waiting rows: per-sample cost
/// chains, objective the mean of the per-sample bounds.
inline BuiltModel build_saa_rwtg(const Instance& inst,
                                 const std::vector<std::vector<double>>& samples,
                                 const BuildOptions& opts = {}) {
  validate_instance(inst);
  if (inst.show_count != inst.n)
    throw unsupported_error("build_saa_rwtg requires show_count == n");
  if (samples.empty()) throw validation_error("build_saa_rwtg: at least one sample required");
  for (const auto& s : samples)
    if (static_cast<int>(s.size()) != inst.n)
      throw validation_error("build_saa_rwtg: sample length must equal n");
  if (opts.fixed_sequence) validate_sequence(*opts.fixed_sequence, inst);

  const int n = inst.n;
  const int count = static_cast<int>(samples.size());
  // Samples may exceed the interval bounds; widen the big-M accordingly.
  double extra = 0.0;
  for (const auto& s : samples) {
    double total = 0.0;
    for (double v : s) {
      if (v < 0.0) throw validation_error("build_saa_rwtg: negative sampled service time");
      total += v;
    }
    extra = std::max(extra, total);
  }
  const auto box = build_detail::bounds_of(inst, extra);

  BuiltModel bm;
  auto& m = bm.model;
  build_detail::add_assignment_vars(bm, inst, opts.fixed_sequence);
  build_detail::add_start_vars(bm, inst, box.start_max);

  double cost_sum = inst.overtime_cost;
  for (double c : inst.idle_cost) cost_sum += c;
  const double u_max = cost_sum * (box.comp_max + box.service_sum);

  for (int l = 0; l < count; ++l) {
    const std::string sfx = "_l" + std::to_string(l + 1);
    const int ul = m.add_var("U" + sfx, 0.0, u_max);
    m.set_objective_term(ul, 1.0 / count);
    std::vector<LinearTerm> bound_row{{ul, 1.0}};
    std::vector<int> comp(static_cast<std::size_t>(n));
    for (int i = 1; i <= n; ++i)
      comp[static_cast<std::size_t>(i - 1)] =
          m.add_var("C" + sfx + "_" + std::to_string(i), 0.0, box.comp_max);
    for (int i = 1; i <= n; ++i) {
      build_detail::add_max_plus_service(
          m, comp[static_cast<std::size_t>(i - 1)],
          i >= 2 ? comp[static_cast<std::size_t>(i - 2)] : -1,
          bm.start[static_cast<std::size_t>(i - 1)], 0.0,
          build_detail::service_terms(bm, inst, i - 1, samples[static_cast<std::size_t>(l)]),
          box.comp_max, "c" + std::to_string(i) + sfx);
      const int idle = m.add_var("idle" + sfx + "_" + std::to_string(i), 0.0, box.comp_max);
      std::vector<LinearTerm> idle_row{{idle, 1.0}, {bm.start[static_cast<std::size_t>(i - 1)], -1.0}};
      if (i >= 2) idle_row.push_back({comp[static_cast<std::size_t>(i - 2)], 1.0});
      m.add_row(std::move(idle_row), Relation::GE, 0.0);
      bound_row.push_back({idle, -inst.idle_cost[static_cast<std::size_t>(i - 1)]});
    }
    const int tail_idle = m.add_var("idle" + sfx + "_end", 0.0, box.comp_max);
    m.add_row({{tail_idle, 1.0}, {comp[static_cast<std::size_t>(n - 1)], 1.0}}, Relation::GE,
              inst.horizon);
    bound_row.push_back({tail_idle, -inst.idle_cost[static_cast<std::size_t>(n)]});
    const int over = m.add_var("over" + sfx, 0.0, box.comp_max);
    m.add_row({{over, 1.0}, {comp[static_cast<std::size_t>(n - 1)], -1.0}}, Relation::GE,
              -inst.horizon);
    bound_row.push_back({over, -inst.overtime_cost});
    m.add_row(std::move(bound_row), Relation::GE, 0.0);
  }

  build_detail::add_waiting_rows(bm, inst);
  return bm;
}

namespace build_detail {

/// Variable handles of the general model, used to rebuild a full assignment
/// from a permutation and start vector.
struct KHandles {
  Instance inst;
  bool indicator_coupling = false;
  std::size_t var_count = 0;
  int bound_var = -1;
  std::vector<std::vector<int>> assign;
  std::vector<int> start;
  std::vector<WaitDualHandle> wait_duals;

  struct GuardPattern {
    std::vector<char> shows;
    std::vector<int> comps, zs, idles;
  };
  struct PerBp {
    std::vector<std::vector<int>> lam;   // [i][j]
    std::vector<int> cmin;               // completion chain, [i-1]
    std::vector<int> z;                  // completion switches, [i-1]
    std::vector<int> idle;               // [i-2] for i in [2, n+1]
    int over = -1;                       // absent for bp = n+1
    std::vector<std::vector<int>> gamma; // [i-1][l], l in [max(i,2), n+1]
    std::vector<std::vector<int>> pc;    // [j][l], l in [2, n+1]
    std::vector<std::vector<int>> w;     // [j1][j2], -1 on the diagonal
    int g_alpha = -1, g_over = -1;
    std::vector<int> g_z;                // [s - bp]
    std::vector<GuardPattern> guards;
  };
  std::vector<PerBp> bps;  // [bp-1]
};

/// A show pattern whose head placement is stable under its own idle-gap
/// costs, so the pairwise exchange rows hold. Returns per-appointment shows
/// plus the gap level of every appointment (n+1 = no later gap).
struct ConsistentPattern {
  std::vector<char> shows;
  std::vector<int> gap_level;  // [i-1], in [2, n+1]
};

inline std::optional<ConsistentPattern> consistent_pattern(const Schedule& sched,
                                                           const Instance& inst, int bp,
                                                           double gap_min) {
  const int n = inst.n;
  const int k = inst.show_count;
  const int tail_size = n - bp + 1;
  const int tail_shows = std::min(k, std::max(tail_size, 0));
  const int head_shows = k - tail_shows;
  const int head_size = bp - 1;
  const double c_max = *std::max_element(inst.idle_cost.begin(), inst.idle_cost.end() - 1);

  ConsistentPattern pat;
  pat.shows.assign(static_cast<std::size_t>(n), 0);
  if (tail_size > 0) {
    std::vector<int> order(static_cast<std::size_t>(tail_size));
    std::iota(order.begin(), order.end(), bp);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      return raswtg::detail::ub_at(sched, inst, a - 1) > raswtg::detail::ub_at(sched, inst, b - 1);
    });
    for (int t = 0; t < tail_shows; ++t)
      pat.shows[static_cast<std::size_t>(order[static_cast<std::size_t>(t)] - 1)] = 1;
  }

  // Idle gaps and per-appointment gap levels for the current shows.
  std::vector<double> gap(static_cast<std::size_t>(n) + 2, 0.0);  // gap[i] for i in [2, n+1]
  auto recompute_gaps = [&]() {
    double completion = 0.0;
    for (int i = 1; i <= n; ++i) {
      const double a = sched.start[static_cast<std::size_t>(i - 1)];
      if (i >= 2) gap[static_cast<std::size_t>(i)] = raswtg::detail::pos(a - completion);
      completion = std::max(a, completion) +
                   (pat.shows[static_cast<std::size_t>(i - 1)]
                        ? raswtg::detail::lb_at(sched, inst, i - 1)
                        : 0.0);
    }
    gap[static_cast<std::size_t>(n) + 1] = raswtg::detail::pos(inst.horizon - completion);
  };
  auto level_of = [&](int i) {
    for (int l = std::max(i, 2); l <= n; ++l)
      if (gap[static_cast<std::size_t>(l)] > 0.0) return l;
    return n + 1;
  };

  if (head_shows > 0) {
    std::vector<int> current;
    auto pick = [&](auto&& key) {
      std::vector<int> order(static_cast<std::size_t>(head_size));
      std::iota(order.begin(), order.end(), 1);
      std::stable_sort(order.begin(), order.end(),
                       [&](int a, int b) { return key(a) < key(b); });
      std::vector<int> sel(order.begin(), order.begin() + head_shows);
      std::sort(sel.begin(), sel.end());
      return sel;
    };
    current = pick([&](int i) { return raswtg::detail::lb_at(sched, inst, i - 1); });
    bool stable = false;
    for (int round = 0; round < 2 * n + 8 && !stable; ++round) {
      for (int i = 1; i <= head_size; ++i) pat.shows[static_cast<std::size_t>(i - 1)] = 0;
      for (int i : current) pat.shows[static_cast<std::size_t>(i - 1)] = 1;
      recompute_gaps();
      auto next = pick([&](int i) {
        const int l = level_of(i);
        const double c = l <= n ? inst.idle_cost[static_cast<std::size_t>(l - 1)] : c_max;
        return c * raswtg::detail::lb_at(sched, inst, i - 1);
      });
      stable = next == current;
      current = std::move(next);
    }
    if (!stable) return std::nullopt;
  }
  recompute_gaps();

  pat.gap_level.resize(static_cast<std::size_t>(n));
  for (int i = 1; i <= n; ++i) {
    const int l = level_of(i);
    // Gaps inside the dead band between "zero" and the coupling granularity
    // cannot be certified; let the exact search handle those nodes.
    if (l <= n && gap[static_cast<std::size_t>(l)] < gap_min) return std::nullopt;
    pat.gap_level[static_cast<std::size_t>(i - 1)] = l;
  }
  return pat;
}

inline std::optional<CompletedIncumbent> complete_general(const KHandles& h,
                                                          std::span<const double> lb,
                                                          std::span<const double> ub,
                                                          const std::vector<double>& x) {
  const auto& inst = h.inst;
  const int n = inst.n;
  const int k = inst.show_count;

  Schedule sched;
  sched.sequence.perm.assign(static_cast<std::size_t>(n), -1);
  bool all_fixed = true;
  for (int i = 0; i < n; ++i) {
    bool pinned = false;
    for (int j = 0; j < n; ++j) {
      const int v = h.assign[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
      const double val = x[static_cast<std::size_t>(v)];
      if (std::min(val, 1.0 - val) > 1e-6) return std::nullopt;  // order undecided
      if (val > 0.5) sched.sequence.perm[static_cast<std::size_t>(i)] = j;
      pinned |= lb[static_cast<std::size_t>(v)] > 0.5;
    }
    all_fixed &= pinned;  // the subtree keeps this appointment's customer
  }
  for (int j : sched.sequence.perm)
    if (j < 0) return std::nullopt;

  const bool nonincreasing = costs_nonincreasing(inst);
  if (nonincreasing) {
    sched.start = asap_schedule(inst, sched.sequence).schedule.start;
  } else {
    sched.start.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
      sched.start[static_cast<std::size_t>(i)] =
          std::max(0.0, x[static_cast<std::size_t>(h.start[static_cast<std::size_t>(i)])]);
    sched.start[0] = 0.0;
  }

  std::vector<double> out(h.var_count, 0.0);
  auto set = [&](int var, double value) { out[static_cast<std::size_t>(var)] = value; };

  const auto wc = worst_case_cost(sched, inst);
  set(h.bound_var, wc.value);
  for (int i = 0; i < n; ++i) {
    set(h.start[static_cast<std::size_t>(i)], sched.start[static_cast<std::size_t>(i)]);
    for (int j = 0; j < n; ++j)
      set(h.assign[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)],
          sched.sequence.perm[static_cast<std::size_t>(i)] == j ? 1.0 : 0.0);
  }

  // Waiting duals at the closed-form optimum of each window.
  for (const auto& wd : h.wait_duals) {
    std::vector<double> values;
    for (int s = wd.l; s <= wd.i - 1; ++s)
      values.push_back(raswtg::detail::ub_at(sched, inst, s - 1));
    std::vector<double> sorted = values;
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    const int m = k - 1;
    const double alpha = m >= 1 ? sorted[static_cast<std::size_t>(m - 1)] : sorted.front();
    set(wd.alpha, alpha);
    for (std::size_t t = 0; t < values.size(); ++t)
      set(wd.p[t], std::max(0.0, values[t] - alpha));
  }

  const double gap_min = 1.01e-6;
  for (int bp = 1; bp <= n + 1; ++bp) {
    const auto& B = h.bps[static_cast<std::size_t>(bp - 1)];
    const auto pattern = consistent_pattern(sched, inst, bp, gap_min);
    if (!pattern) return std::nullopt;

    for (int i = 0; i < n; ++i) {
      const int j = sched.sequence.perm[static_cast<std::size_t>(i)];
      if (pattern->shows[static_cast<std::size_t>(i)])
        set(B.lam[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)], 1.0);
    }

    // Completion chain, switches, idle gaps and the overtime term.
    double completion = 0.0;
    for (int i = 1; i <= n; ++i) {
      const double a = sched.start[static_cast<std::size_t>(i - 1)];
      set(B.z[static_cast<std::size_t>(i - 1)], a >= completion ? 0.0 : 1.0);
      if (i >= 2)
        set(B.idle[static_cast<std::size_t>(i - 2)], raswtg::detail::pos(a - completion));
      completion = std::max(a, completion) +
                   (pattern->shows[static_cast<std::size_t>(i - 1)]
                        ? raswtg::detail::lb_at(sched, inst, i - 1)
                        : 0.0);
      set(B.cmin[static_cast<std::size_t>(i - 1)], completion);
    }
    set(B.idle[static_cast<std::size_t>(n - 1)], raswtg::detail::pos(inst.horizon - completion));
    if (B.over >= 0) {
      double tail_work = 0.0;
      for (int s = bp; s <= n; ++s)
        if (pattern->shows[static_cast<std::size_t>(s - 1)])
          tail_work += raswtg::detail::ub_at(sched, inst, s - 1);
      set(B.over, std::max(0.0, sched.start[static_cast<std::size_t>(bp - 1)] + tail_work -
                                    inst.horizon));
    }

    for (int i = 1; i <= n; ++i) {
      const int l = pattern->gap_level[static_cast<std::size_t>(i - 1)];
      set(B.gamma[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(l)], 1.0);
      const int j = sched.sequence.perm[static_cast<std::size_t>(i - 1)];
      set(B.pc[static_cast<std::size_t>(j)][static_cast<std::size_t>(l)], 1.0);
    }

    for (int j1 = 0; j1 < n; ++j1)
      for (int j2 = 0; j2 < n; ++j2) {
        if (j1 == j2) continue;
        const int i1 = static_cast<int>(std::find(sched.sequence.perm.begin(),
                                                  sched.sequence.perm.end(), j1) -
                                        sched.sequence.perm.begin());
        const int i2 = static_cast<int>(std::find(sched.sequence.perm.begin(),
                                                  sched.sequence.perm.end(), j2) -
                                        sched.sequence.perm.begin());
        const bool j1_shown = pattern->shows[static_cast<std::size_t>(i1)] != 0;
        const bool j2_shown = pattern->shows[static_cast<std::size_t>(i2)] != 0;
        bool forced;
        if (bp <= n - k)
          forced = j2_shown && !j1_shown && i1 + 1 >= bp;  // both tail positions
        else
          forced = j2_shown && i2 + 1 <= bp - 1 && !j1_shown;
        if (forced) set(B.w[static_cast<std::size_t>(j1)][static_cast<std::size_t>(j2)], 1.0);
      }

    if (B.g_over >= 0) {
      std::vector<double> values;
      for (int s = bp; s <= n; ++s)
        values.push_back(raswtg::detail::ub_at(sched, inst, s - 1));
      std::vector<double> sorted = values;
      std::sort(sorted.begin(), sorted.end(), std::greater<>());
      const int m = std::min(k, static_cast<int>(values.size()));
      const double alpha = m >= 1 ? sorted[static_cast<std::size_t>(m - 1)] : sorted.front();
      double top = 0.0;
      for (int t = 0; t < m; ++t) top += sorted[static_cast<std::size_t>(t)];
      set(B.g_alpha, alpha);
      for (std::size_t t = 0; t < values.size(); ++t)
        set(B.g_z[t], std::max(0.0, values[t] - alpha));
      set(B.g_over, std::max(0.0, sched.start[static_cast<std::size_t>(bp - 1)] + top -
                                      inst.horizon));
    }

    for (const auto& g : B.guards) {
      double prev = 0.0;
      for (int i = 1; i <= static_cast<int>(g.shows.size()); ++i) {
        const double a = sched.start[static_cast<std::size_t>(i - 1)];
        set(g.zs[static_cast<std::size_t>(i - 1)], a >= prev ? 0.0 : 1.0);
        const double done = std::max(a, prev) + (g.shows[static_cast<std::size_t>(i - 1)]
                                                     ? raswtg::detail::lb_at(sched, inst, i - 1)
                                                     : 0.0);
        set(g.comps[static_cast<std::size_t>(i - 1)], done);
        if (i >= 2)
          set(g.idles[static_cast<std::size_t>(i - 2)], raswtg::detail::pos(a - prev));
        prev = done;
      }
      if (!g.idles.empty()) {
        const double boundary =
            bp <= n ? sched.start[static_cast<std::size_t>(bp - 1)] : inst.horizon;
        set(g.idles.back(), raswtg::detail::pos(boundary - prev));
      }
    }
  }

  CompletedIncumbent res;
  res.assignment = std::move(out);
  res.closes_subtree = all_fixed && nonincreasing;
  return res;
}

}  // namespace build_detail

/// General formulation with no-shows: per-breakpoint show-up variables with
/// the worst-case selection machinery (idle-gap costs, pairwise exchange
/// rows) plus, by default, exact enumerated scenario rows. The returned
/// completion hook lets the branch-and-bound derive full incumbents from a
/// settled customer order.
inline BuiltModel build_raswtg_k(const Instance& inst, const BuildOptions& opts = {}) {
  validate_instance(inst);
  if (opts.fixed_sequence) validate_sequence(*opts.fixed_sequence, inst);

  const int n = inst.n;
  const int k = inst.show_count;
  const auto box = build_detail::bounds_of(inst);
  const double p_lb_max = *std::max_element(inst.service_lb.begin(), inst.service_lb.end());
  const double p_ub_max = *std::max_element(inst.service_ub.begin(), inst.service_ub.end());
  const double c_max = *std::max_element(inst.idle_cost.begin(), inst.idle_cost.end() - 1);

  BuiltModel bm;
  auto& m = bm.model;
  auto handles = std::make_shared<build_detail::KHandles>();
  handles->inst = inst;
  handles->indicator_coupling = opts.indicator_coupling;

  double cost_sum = inst.overtime_cost;
  for (double c : inst.idle_cost) cost_sum += c;
  bm.bound_var = m.add_var("U", 0.0, cost_sum * (box.comp_max + box.service_sum));
  m.set_objective_term(bm.bound_var, 1.0);

  build_detail::add_assignment_vars(bm, inst, opts.fixed_sequence);
  build_detail::add_start_vars(bm, inst, box.start_max);

  // Gap cost levels; level n+1 ("no later gap") priced at the largest cost.
  std::vector<double> gap_cost(inst.idle_cost.begin(), inst.idle_cost.end() - 1);
  gap_cost.push_back(c_max);

  const double eps_idle = 1e-6;  // minimum idle granularity of the coupling

  handles->bps.resize(static_cast<std::size_t>(n) + 1);
  for (int bp = 1; bp <= n + 1; ++bp) {
    auto& H = handles->bps[static_cast<std::size_t>(bp - 1)];
    const std::string sfx = "_s" + std::to_string(bp);

    auto& lam = H.lam;
    lam.assign(static_cast<std::size_t>(n), std::vector<int>(static_cast<std::size_t>(n), -1));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        lam[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = m.add_binary(
            "lam" + sfx + "_" + std::to_string(i + 1) + "_" + std::to_string(j + 1), 3);
        m.add_row({{lam[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)], 1.0},
                   {bm.assign[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)], -1.0}},
                  Relation::LE, 0.0);
      }
    {
      std::vector<LinearTerm> total;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          total.push_back({lam[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)], 1.0});
      m.add_row(std::move(total), Relation::EQ, static_cast<double>(k));
    }
    auto show_row = [&](int i) {
      std::vector<LinearTerm> row;
      for (int j = 0; j < n; ++j)
        row.push_back({lam[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)], 1.0});
      return row;
    };
    if (bp >= n + 1 - k)
      for (int i = bp; i <= n; ++i) m.add_row(show_row(i - 1), Relation::EQ, 1.0);
    if (bp <= n - k)
      for (int i = 1; i <= bp - 1; ++i) m.add_row(show_row(i - 1), Relation::EQ, 0.0);

    for (int i = 1; i <= n; ++i)
      H.cmin.push_back(m.add_var("Cmin" + sfx + "_" + std::to_string(i), 0.0, box.comp_max));
    for (int i = 2; i <= n + 1; ++i)
      H.idle.push_back(m.add_var("idle" + sfx + "_" + std::to_string(i), 0.0, box.comp_max));
    for (int i = 1; i <= n; ++i) {
      std::vector<LinearTerm> service;
      for (int j = 0; j < n; ++j)
        service.push_back({lam[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(j)],
                           inst.service_lb[static_cast<std::size_t>(j)]});
      H.z.push_back(build_detail::add_max_plus_service(
          m, H.cmin[static_cast<std::size_t>(i - 1)],
          i >= 2 ? H.cmin[static_cast<std::size_t>(i - 2)] : -1,
          bm.start[static_cast<std::size_t>(i - 1)], 0.0, service, box.comp_max,
          "c" + std::to_string(i) + sfx));
    }
    for (int i = 2; i <= n; ++i)
      m.add_row({{H.idle[static_cast<std::size_t>(i - 2)], 1.0},
                 {bm.start[static_cast<std::size_t>(i - 1)], -1.0},
                 {H.cmin[static_cast<std::size_t>(i - 2)], 1.0}},
                Relation::GE, 0.0);
    m.add_row({{H.idle[static_cast<std::size_t>(n - 1)], 1.0},
               {H.cmin[static_cast<std::size_t>(n - 1)], 1.0}},
              Relation::GE, inst.horizon);

    if (bp <= n) {
      H.over = m.add_var("over" + sfx, 0.0, box.comp_max);
      std::vector<LinearTerm> row{{H.over, 1.0}, {bm.start[static_cast<std::size_t>(bp - 1)], -1.0}};
      for (int s = bp; s <= n; ++s)
        for (int j = 0; j < n; ++j)
          row.push_back({lam[static_cast<std::size_t>(s - 1)][static_cast<std::size_t>(j)],
                         -inst.service_ub[static_cast<std::size_t>(j)]});
      m.add_row(std::move(row), Relation::GE, -inst.horizon);
    }

    {
      std::vector<LinearTerm> bound_row{{bm.bound_var, 1.0}};
      for (int i = 2; i <= bp; ++i)
        bound_row.push_back({H.idle[static_cast<std::size_t>(i - 2)],
                             -inst.idle_cost[static_cast<std::size_t>(i - 1)]});
      if (H.over >= 0) bound_row.push_back({H.over, -inst.overtime_cost});
      m.add_row(std::move(bound_row), Relation::GE, 0.0);
    }

    // Gap levels. gamma[i][l] = 1 iff l is the next positive gap at or after
    // appointment i (level n+1: no gap up to the day's last appointment).
    H.gamma.assign(static_cast<std::size_t>(n), std::vector<int>(static_cast<std::size_t>(n) + 2, -1));
    for (int i = 1; i <= n; ++i) {
      std::vector<LinearTerm> one;
      for (int l = std::max(i, 2); l <= n + 1; ++l) {
        const int g =
            m.add_binary("gam" + sfx + "_" + std::to_string(i) + "_" + std::to_string(l), 1);
        H.gamma[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(l)] = g;
        one.push_back({g, 1.0});
        if (l <= n) {
          if (opts.indicator_coupling)
            m.indicators.push_back(
                {g, {{{H.idle[static_cast<std::size_t>(l - 2)], 1.0}}, Relation::GE, 1e-9}});
          else
            m.add_row({{g, eps_idle}, {H.idle[static_cast<std::size_t>(l - 2)], -1.0}},
                      Relation::LE, 0.0);
        }
        if (l > std::max(i, 2)) {
          std::vector<LinearTerm> skip;
          for (int a = std::max(i, 2); a <= l - 1; ++a)
            skip.push_back({H.idle[static_cast<std::size_t>(a - 2)], 1.0});
          const double m_skip = (n + 1) * box.comp_max;
          skip.push_back({g, m_skip});
          m.add_row(std::move(skip), Relation::LE, m_skip);
        }
      }
      m.add_row(std::move(one), Relation::EQ, 1.0);
    }

    H.pc.assign(static_cast<std::size_t>(n), std::vector<int>(static_cast<std::size_t>(n) + 2, -1));
    for (int j = 0; j < n; ++j) {
      std::vector<LinearTerm> one;
      for (int l = 2; l <= n + 1; ++l) {
        H.pc[static_cast<std::size_t>(j)][static_cast<std::size_t>(l)] =
            m.add_binary("pc" + sfx + "_" + std::to_string(j + 1) + "_" + std::to_string(l), 1);
        one.push_back({H.pc[static_cast<std::size_t>(j)][static_cast<std::size_t>(l)], 1.0});
      }
      m.add_row(std::move(one), Relation::EQ, 1.0);
      for (int i = 1; i <= n; ++i)
        for (int l = std::max(i, 2); l <= n + 1; ++l)
          m.add_row({{H.pc[static_cast<std::size_t>(j)][static_cast<std::size_t>(l)], 1.0},
                     {bm.assign[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(j)], -1.0},
                     {H.gamma[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(l)], -1.0}},
                    Relation::GE, -1.0);
    }

    // Exchange rows: within the comparison group, show-ups must not beat the
    // no-shows (longest services in the tail, cheapest gap-cost products in
    // the head).
    H.w.assign(static_cast<std::size_t>(n), std::vector<int>(static_cast<std::size_t>(n), -1));
    for (int j1 = 0; j1 < n; ++j1)
      for (int j2 = 0; j2 < n; ++j2) {
        if (j1 == j2) continue;
        const int w = m.add_binary(
            "w" + sfx + "_" + std::to_string(j1 + 1) + "_" + std::to_string(j2 + 1), 1);
        H.w[static_cast<std::size_t>(j1)][static_cast<std::size_t>(j2)] = w;
        std::vector<LinearTerm> force{{w, -1.0}};
        if (bp <= n - k) {
          for (int i = 0; i < n; ++i) {
            force.push_back({lam[static_cast<std::size_t>(i)][static_cast<std::size_t>(j2)], 1.0});
            force.push_back({lam[static_cast<std::size_t>(i)][static_cast<std::size_t>(j1)], -1.0});
          }
          for (int i = 1; i <= bp - 1; ++i)
            force.push_back(
                {bm.assign[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(j1)], -1.0});
          m.add_row(std::move(force), Relation::LE, 0.0);
          // The show-up's longest service is at least the no-show's.
          const double m_cmp = p_ub_max + 1.0;
          m.add_row({{w, m_cmp}}, Relation::LE,
                    m_cmp + inst.service_ub[static_cast<std::size_t>(j2)] -
                        inst.service_ub[static_cast<std::size_t>(j1)]);
        } else {
          for (int i = 1; i <= bp - 1; ++i)
            force.push_back({lam[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(j2)], 1.0});
          for (int i = 0; i < n; ++i)
            force.push_back({lam[static_cast<std::size_t>(i)][static_cast<std::size_t>(j1)], -1.0});
          m.add_row(std::move(force), Relation::LE, 0.0);
          const double m_cmp = c_max * p_lb_max + 1.0;
          std::vector<LinearTerm> cmp{{w, m_cmp}};
          for (int l = 2; l <= n + 1; ++l) {
            cmp.push_back({H.pc[static_cast<std::size_t>(j2)][static_cast<std::size_t>(l)],
                           gap_cost[static_cast<std::size_t>(l - 1)] *
                               inst.service_lb[static_cast<std::size_t>(j2)]});
            cmp.push_back({H.pc[static_cast<std::size_t>(j1)][static_cast<std::size_t>(l)],
                           -gap_cost[static_cast<std::size_t>(l - 1)] *
                               inst.service_lb[static_cast<std::size_t>(j1)]});
          }
          m.add_row(std::move(cmp), Relation::LE, m_cmp);
        }
        std::vector<LinearTerm> rel1{{w, 1.0}};
        for (int i = 0; i < n; ++i)
          rel1.push_back({lam[static_cast<std::size_t>(i)][static_cast<std::size_t>(j1)], 1.0});
        m.add_row(std::move(rel1), Relation::LE, 1.0);
        std::vector<LinearTerm> rel2{{w, 1.0}};
        for (int i = 0; i < n; ++i)
          rel2.push_back({lam[static_cast<std::size_t>(i)][static_cast<std::size_t>(j2)], -1.0});
        m.add_row(std::move(rel2), Relation::LE, 0.0);
      }
  }

  build_detail::add_waiting_rows(bm, inst, &handles->wait_duals);

  // Exact scenario rows: for each breakpoint, every placement of the forced
  // head show-ups gets its own completion chain; the tail contribution is the
  // dual bound of the largest-service selection.
  if (opts.guard_rows && k > 0 && k < n) {
    for (int bp = 1; bp <= n + 1; ++bp) {
      auto& H = handles->bps[static_cast<std::size_t>(bp - 1)];
      const std::string sfx = "_g" + std::to_string(bp);
      const int tail_size = n - bp + 1;
      const int tail_shows = std::min(k, std::max(tail_size, 0));
      const int head_shows = k - tail_shows;
      const int head_size = bp - 1;

      if (bp <= n) {
        H.g_alpha = m.add_var("ga" + sfx, 0.0, p_ub_max);
        std::vector<LinearTerm> ot{{bm.start[static_cast<std::size_t>(bp - 1)], -1.0},
                                   {H.g_alpha, -static_cast<double>(tail_shows)}};
        for (int s = bp; s <= n; ++s) {
          const int z = m.add_var("gz" + sfx + "_" + std::to_string(s), 0.0, p_ub_max);
          H.g_z.push_back(z);
          std::vector<LinearTerm> dual{{H.g_alpha, 1.0}, {z, 1.0}};
          build_detail::append(dual, build_detail::service_terms(bm, inst, s - 1, inst.service_ub),
                               -1.0);
          m.add_row(std::move(dual), Relation::GE, 0.0);
          ot.push_back({z, -1.0});
        }
        H.g_over = m.add_var("gover" + sfx, 0.0, box.comp_max);
        ot.insert(ot.begin(), {H.g_over, 1.0});
        m.add_row(std::move(ot), Relation::GE, -inst.horizon);
      }

      int pattern_no = 0;
      raswtg::detail::for_each_subset(head_size, head_shows, [&](const std::vector<int>& subset) {
        const std::string psfx = sfx + "_p" + std::to_string(pattern_no++);
        build_detail::KHandles::GuardPattern guard;
        guard.shows.assign(static_cast<std::size_t>(head_size), 0);
        for (int s : subset) guard.shows[static_cast<std::size_t>(s)] = 1;

        int prev = -1;
        for (int i = 1; i <= head_size; ++i) {
          const int comp = m.add_var("gc" + psfx + "_" + std::to_string(i), 0.0, box.comp_max);
          std::vector<LinearTerm> service;
          if (guard.shows[static_cast<std::size_t>(i - 1)])
            service = build_detail::service_terms(bm, inst, i - 1, inst.service_lb);
          guard.zs.push_back(build_detail::add_max_plus_service(
              m, comp, prev, bm.start[static_cast<std::size_t>(i - 1)], 0.0, service, box.comp_max,
              "g" + psfx + "_" + std::to_string(i)));
          guard.comps.push_back(comp);
          prev = comp;
        }

        std::vector<LinearTerm> row{{bm.bound_var, 1.0}};
        for (int i = 2; i <= bp; ++i) {
          const int gidle = m.add_var("gidle" + psfx + "_" + std::to_string(i), 0.0, box.comp_max);
          guard.idles.push_back(gidle);
          std::vector<LinearTerm> idle_row{{gidle, 1.0},
                                           {guard.comps[static_cast<std::size_t>(i - 2)], 1.0}};
          if (i <= n) {
            idle_row.push_back({bm.start[static_cast<std::size_t>(i - 1)], -1.0});
            m.add_row(std::move(idle_row), Relation::GE, 0.0);
          } else {
            m.add_row(std::move(idle_row), Relation::GE, inst.horizon);
          }
          row.push_back({gidle, -inst.idle_cost[static_cast<std::size_t>(i - 1)]});
        }
        if (H.g_over >= 0) row.push_back({H.g_over, -inst.overtime_cost});
        m.add_row(std::move(row), Relation::GE, 0.0);
        H.guards.push_back(std::move(guard));
      });
    }
  }

  handles->bound_var = bm.bound_var;
  handles->assign = bm.assign;
  handles->start = bm.start;
  handles->var_count = m.vars.size();
  bm.completion = [handles](std::span<const double> lb, std::span<const double> ub,
                            const std::vector<double>& x) {
    return build_detail::complete_general(*handles, lb, ub, x);
  };
  if (costs_nonincreasing(inst)) {
    // Pinning the order appointment by appointment lets the completion close
    // whole subtrees; only worthwhile where it is provably per-order optimal.
    bm.forced_branch = [handles](std::span<const double> lb, std::span<const double>,
                                 const std::vector<double>& x) {
      const int nn = handles->inst.n;
      for (int i = 0; i < nn; ++i) {
        int one = -1;
        bool pinned = false;
        for (int j = 0; j < nn; ++j) {
          const int v = handles->assign[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
          const double val = x[static_cast<std::size_t>(v)];
          if (std::min(val, 1.0 - val) > 1e-6) return -1;  // still fractional
          if (val > 0.5) one = v;
          pinned |= lb[static_cast<std::size_t>(v)] > 0.5;
        }
        if (!pinned && one >= 0) return one;
      }
      return -1;
    };
  }
  return bm;
}

/// Reads the permutation and start times out of a solved model.
inline Schedule extract_schedule(const BuiltModel& bm, const MilpSolution& sol) {
  if (!sol.has_assignment)
    throw validation_error("extract_schedule: solution carries no assignment");
  Schedule sched;
  const int n = static_cast<int>(bm.start.size());
  sched.sequence.perm.resize(static_cast<std::size_t>(n), -1);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j)
      if (sol.value(bm.assign[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]) > 0.5)
        sched.sequence.perm[static_cast<std::size_t>(i)] = j;
    if (sched.sequence.perm[static_cast<std::size_t>(i)] < 0)
      throw validation_error("extract_schedule: no customer assigned to an appointment");
    sched.start.push_back(std::max(0.0, sol.value(bm.start[static_cast<std::size_t>(i)])));
  }
  sched.start[0] = 0.0;
  return sched;
}

}  // namespace raswtg::milp
