#pragma once

#include <cmath>
#include <limits>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "raswtg/core.hpp"

namespace raswtg::milp {

enum class Relation { LE, EQ, GE };

struct LinearTerm {
  int var;
  double coef;
};

struct RowConstraint {
  std::vector<LinearTerm> terms;
  Relation rel = Relation::LE;
  double rhs = 0.0;
};

struct Variable {
  std::string name;
  double lb = 0.0;
  double ub = 0.0;
  bool is_binary = false;
  int branch_priority = 0;  // higher priorities are branched first
};

/// Row activated only when the attached binary is fixed to one. Used for the
/// exact-indicator mode of the idle-gap coupling.
struct IndicatorRow {
  int var = -1;
  RowConstraint row;
};

/// A bounded-variable mixed-integer linear program, objective sense minimize.
struct LinearModel {
  std::vector<Variable> vars;
  std::vector<RowConstraint> rows;
  std::vector<LinearTerm> objective;
  double objective_offset = 0.0;
  std::vector<IndicatorRow> indicators;

  int add_var(std::string name, double lb, double ub, bool binary = false, int priority = 0) {
    vars.push_back({std::move(name), lb, ub, binary, priority});
    return static_cast<int>(vars.size()) - 1;
  }
  int add_binary(std::string name, int priority = 0) {
    return add_var(std::move(name), 0.0, 1.0, true, priority);
  }
  void add_row(std::vector<LinearTerm> terms, Relation rel, double rhs) {
    rows.push_back({std::move(terms), rel, rhs});
  }
  void set_objective_term(int var, double coef) { objective.push_back({var, coef}); }

  void validate() const {
    const int nv = static_cast<int>(vars.size());
    for (const auto& v : vars) {
      if (!std::isfinite(v.lb) || !std::isfinite(v.ub) || v.lb > v.ub + 1e-12)
        throw validation_error("linear model: variable '" + v.name + "' needs finite ordered bounds");
      if (v.is_binary && (v.lb < -1e-12 || v.ub > 1.0 + 1e-12))
        throw validation_error("linear model: binary '" + v.name + "' must have bounds within [0,1]");
    }
    auto check_row = [&](const RowConstraint& r) {
      for (const auto& t : r.terms)
        if (t.var < 0 || t.var >= nv)
          throw validation_error("linear model: constraint references undeclared variable");
    };
    for (const auto& r : rows) check_row(r);
    for (const auto& ind : indicators) {
      if (ind.var < 0 || ind.var >= nv || !vars[static_cast<std::size_t>(ind.var)].is_binary)
        throw validation_error("linear model: indicator must be attached to a binary variable");
      check_row(ind.row);
    }
    for (const auto& t : objective)
      if (t.var < 0 || t.var >= nv)
        throw validation_error("linear model: objective references undeclared variable");
  }
};

enum class SolveStatus { kOptimal, kInfeasible, kIterationLimit, kNodeLimit, kTimeLimit, kUnbounded };

inline const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::kOptimal: return "optimal";
    case SolveStatus::kInfeasible: return "infeasible";
    case SolveStatus::kIterationLimit: return "iteration-limit";
    case SolveStatus::kNodeLimit: return "node-limit";
    case SolveStatus::kTimeLimit: return "time-limit";
    case SolveStatus::kUnbounded: return "unbounded";
  }
  return "unknown";
}

struct MilpSolution {
  SolveStatus status = SolveStatus::kInfeasible;
  double objective = std::numeric_limits<double>::infinity();
  double best_bound = -std::numeric_limits<double>::infinity();
  std::vector<double> assignment;
  bool has_assignment = false;
  long node_count = 0;
  double solve_seconds = 0.0;

  double value(int var) const { return assignment[static_cast<std::size_t>(var)]; }
};

/// Writes the model in the textual LP interchange format.
inline void write_lp(const LinearModel& m, std::ostream& os) {
  auto emit_terms = [&](const std::vector<LinearTerm>& terms) {
    bool first = true;
    for (const auto& t : terms) {
      const double c = t.coef;
      if (c == 0.0) continue;
      if (first) {
        if (c < 0) os << "- ";
        first = false;
      } else {
        os << (c < 0 ? " - " : " + ");
      }
      os << std::abs(c) << ' ' << m.vars[static_cast<std::size_t>(t.var)].name;
    }
    if (first) os << "0 " << m.vars.front().name;
  };
  os << "Minimize\n obj: ";
  emit_terms(m.objective);
  os << "\nSubject To\n";
  for (std::size_t r = 0; r < m.rows.size(); ++r) {
    os << " c" << r << ": ";
    emit_terms(m.rows[r].terms);
    switch (m.rows[r].rel) {
      case Relation::LE: os << " <= "; break;
      case Relation::EQ: os << " = "; break;
      case Relation::GE: os << " >= "; break;
    }
    os << m.rows[r].rhs << '\n';
  }
  os << "Bounds\n";
  for (const auto& v : m.vars)
    if (!v.is_binary) os << ' ' << v.lb << " <= " << v.name << " <= " << v.ub << '\n';
  bool any_bin = false;
  for (const auto& v : m.vars) any_bin |= v.is_binary;
  if (any_bin) {
    os << "Binaries\n";
    for (const auto& v : m.vars)
      if (v.is_binary) os << ' ' << v.name << '\n';
  }
  os << "End\n";
}

}  // namespace raswtg::milp
