#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <vector>
#include <cstdio>

#include "raswtg/linear_model.hpp"

namespace raswtg::milp {

struct SimplexOptions {
  long iteration_limit = 50000;
  double feas_tol = 1e-7;
  double opt_tol = 1e-7;
  // Iterations without objective progress before Bland's rule takes over.
  long stall_limit = 400;
};

struct SimplexResult {
  SolveStatus status = SolveStatus::kInfeasible;
  double objective = std::numeric_limits<double>::infinity();
  std::vector<double> x;  // structural variables only
  long iterations = 0;
};

namespace detail {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Dense bounded-variable primal simplex with an explicit basis inverse.
/// Phase 1 starts from one artificial per row; phase 2 pins artificials to
/// zero and optimizes the true objective.
class BoundedSimplex {
 public:
  BoundedSimplex(const LinearModel& model, std::span<const double> lb, std::span<const double> ub,
                 std::span<const RowConstraint> extra_rows, const SimplexOptions& opts)
      : opts_(opts) {
    n_struct_ = static_cast<int>(model.vars.size());
    m_ = static_cast<int>(model.rows.size() + extra_rows.size());

    cols_.resize(static_cast<std::size_t>(n_struct_));
    lb_.assign(lb.begin(), lb.end());
    ub_.assign(ub.begin(), ub.end());
    rhs_.resize(static_cast<std::size_t>(m_));
    cost_.assign(static_cast<std::size_t>(n_struct_), 0.0);
    for (const auto& t : model.objective) cost_[static_cast<std::size_t>(t.var)] += t.coef;

    int r = 0;
    auto load_row = [&](const RowConstraint& row) {
      for (const auto& t : row.terms)
        cols_[static_cast<std::size_t>(t.var)].push_back({r, t.coef});
      rhs_[static_cast<std::size_t>(r)] = row.rhs;
      // One slack per row, appended after the structural columns.
      double slo = 0.0, shi = 0.0;
      switch (row.rel) {
        case Relation::LE: slo = 0.0, shi = kInf; break;
        case Relation::GE: slo = -kInf, shi = 0.0; break;
        case Relation::EQ: slo = 0.0, shi = 0.0; break;
      }
      cols_.push_back({{r, 1.0}});
      lb_.push_back(slo);
      ub_.push_back(shi);
      cost_.push_back(0.0);
      ++r;
    };
    for (const auto& row : model.rows) load_row(row);
    for (const auto& row : extra_rows) load_row(row);
    n_total_ = static_cast<int>(cols_.size());
  }

  SimplexResult solve() {
    SimplexResult res;
    if (!init_phase1()) {  // adds artificials and an all-artificial basis
      res.status = SolveStatus::kInfeasible;
      return res;
    }
    phase1_ = true;
    while (true) {
      const SolveStatus st = iterate();
      if (st != SolveStatus::kOptimal) {
        res.status = st;
        res.iterations = iters_;
        if (st == SolveStatus::kIterationLimit) {
          res.x.assign(x_.begin(), x_.begin() + n_struct_);
          res.objective = objective_value();
        }
        return res;
      }
      if (!phase1_) break;
      if (phase1_objective() > 1e-6) {
        res.status = SolveStatus::kInfeasible;
        res.iterations = iters_;
        return res;
      }
      // Pin artificials at zero and switch to the real objective.
      for (int j = art_begin_; j < n_total_; ++j) {
        lb_[static_cast<std::size_t>(j)] = 0.0;
        ub_[static_cast<std::size_t>(j)] = 0.0;
        if (!basic_[static_cast<std::size_t>(j)]) x_[static_cast<std::size_t>(j)] = 0.0;
      }
      phase1_ = false;
      bland_ = false;
      stall_ = 0;
    }
    res.status = SolveStatus::kOptimal;
    res.iterations = iters_;
    res.x.assign(x_.begin(), x_.begin() + n_struct_);
    res.objective = objective_value();
    return res;
  }

 private:
  double col_value(int j, std::span<const double> vec) const {
    double s = 0.0;
    for (const auto& [row, coef] : cols_[static_cast<std::size_t>(j)])
      s += coef * vec[static_cast<std::size_t>(row)];
    return s;
  }

  bool init_phase1() {
    x_.assign(static_cast<std::size_t>(n_total_), 0.0);
    for (int j = 0; j < n_total_; ++j) {
      if (lb_[static_cast<std::size_t>(j)] > ub_[static_cast<std::size_t>(j)] + 1e-9) return false;
      x_[static_cast<std::size_t>(j)] =
          std::isfinite(lb_[static_cast<std::size_t>(j)]) ? lb_[static_cast<std::size_t>(j)]
                                                          : ub_[static_cast<std::size_t>(j)];
    }
    std::vector<double> resid(rhs_);
    for (int j = 0; j < n_total_; ++j) {
      if (x_[static_cast<std::size_t>(j)] == 0.0) continue;
      for (const auto& [row, coef] : cols_[static_cast<std::size_t>(j)])
        resid[static_cast<std::size_t>(row)] -= coef * x_[static_cast<std::size_t>(j)];
    }
    // The slack column serves as the basic variable wherever the residual
    // already fits its bounds; only the remaining rows get a basic artificial.
    art_begin_ = n_total_;
    basis_.resize(static_cast<std::size_t>(m_));
    const int slack_begin = n_struct_;
    for (int r = 0; r < m_; ++r) {
      const int slack = slack_begin + r;
      // resid was computed with the slack at its current value; the slack as
      // a basic variable would take value resid + current.
      const double value = resid[static_cast<std::size_t>(r)] + x_[static_cast<std::size_t>(slack)];
      const bool fits = value >= lb_[static_cast<std::size_t>(slack)] - 1e-12 &&
                        value <= ub_[static_cast<std::size_t>(slack)] + 1e-12;
      const double leftover = fits ? 0.0 : resid[static_cast<std::size_t>(r)];
      const double sgn = leftover >= 0.0 ? 1.0 : -1.0;
      cols_.push_back({{r, sgn}});
      lb_.push_back(0.0);
      ub_.push_back(kInf);
      cost_.push_back(0.0);
      if (fits) {
        x_[static_cast<std::size_t>(slack)] = value;
        x_.push_back(0.0);
        basis_[static_cast<std::size_t>(r)] = slack;
      } else {
        x_.push_back(std::abs(leftover));
        basis_[static_cast<std::size_t>(r)] = n_total_;
      }
      ++n_total_;
    }
    basic_.assign(static_cast<std::size_t>(n_total_), false);
    for (int b : basis_) basic_[static_cast<std::size_t>(b)] = true;
    binv_.assign(static_cast<std::size_t>(m_) * static_cast<std::size_t>(m_), 0.0);
    for (int r = 0; r < m_; ++r) {
      const int b = basis_[static_cast<std::size_t>(r)];
      binv_[static_cast<std::size_t>(r) * static_cast<std::size_t>(m_) + static_cast<std::size_t>(r)] =
          b >= art_begin_ && cols_[static_cast<std::size_t>(b)][0].second < 0 ? -1.0 : 1.0;
    }
    return true;
  }

  double phase1_objective() const {
    double s = 0.0;
    for (int j = art_begin_; j < n_total_; ++j) s += x_[static_cast<std::size_t>(j)];
    return s;
  }

  double objective_value() const {
    double s = 0.0;
    for (int j = 0; j < n_struct_; ++j) s += cost_[static_cast<std::size_t>(j)] * x_[static_cast<std::size_t>(j)];
    return s;
  }

  double cur_cost(int j) const {
    if (phase1_) return j >= art_begin_ ? 1.0 : 0.0;
    return j < static_cast<int>(cost_.size()) ? cost_[static_cast<std::size_t>(j)] : 0.0;
  }

  double cur_objective() const { return phase1_ ? phase1_objective() : objective_value(); }

  SolveStatus iterate() {
    std::vector<double> y(static_cast<std::size_t>(m_));
    std::vector<double> w(static_cast<std::size_t>(m_));
    double last_obj = cur_objective();
    while (true) {
      if (iters_ >= opts_.iteration_limit) return SolveStatus::kIterationLimit;
      ++iters_;

      // Simplex multipliers y = c_B * Binv.
      std::fill(y.begin(), y.end(), 0.0);
      for (int r = 0; r < m_; ++r) {
        const double cb = cur_cost(basis_[static_cast<std::size_t>(r)]);
        if (cb == 0.0) continue;
        const double* row = &binv_[static_cast<std::size_t>(r) * static_cast<std::size_t>(m_)];
        for (int c = 0; c < m_; ++c) y[static_cast<std::size_t>(c)] += cb * row[c];
      }

      // Price nonbasic columns.
      int enter = -1;
      double enter_score = opts_.opt_tol;
      int enter_dir = 0;
      for (int j = 0; j < n_total_; ++j) {
        if (basic_[static_cast<std::size_t>(j)]) continue;
        const double lo = lb_[static_cast<std::size_t>(j)], hi = ub_[static_cast<std::size_t>(j)];
        if (lo == hi) continue;
        const double d = cur_cost(j) - col_value(j, y);
        int dir = 0;
        if (x_[static_cast<std::size_t>(j)] <= lo + 1e-11 && d < -opts_.opt_tol)
          dir = +1;
        else if (x_[static_cast<std::size_t>(j)] >= hi - 1e-11 && d > opts_.opt_tol)
          dir = -1;
        else if (!std::isfinite(lo) && !std::isfinite(hi) && std::abs(d) > opts_.opt_tol)
          dir = d < 0 ? +1 : -1;
        if (dir == 0) continue;
        if (bland_) {
          enter = j;
          enter_dir = dir;
          break;
        }
        if (std::abs(d) > enter_score) {
          enter_score = std::abs(d);
          enter = j;
          enter_dir = dir;
        }
      }
      if (enter < 0) {
        // Only trust optimality straight after a clean refactorization.
        if (pivots_since_refresh_ > 0) {
          if (!refactorize() && !restart()) return SolveStatus::kIterationLimit;
          last_obj = cur_objective();
          continue;
        }
        return SolveStatus::kOptimal;
      }

      // Direction through the basis: w = Binv * A_enter.
      std::fill(w.begin(), w.end(), 0.0);
      for (const auto& [row, coef] : cols_[static_cast<std::size_t>(enter)])
        for (int r = 0; r < m_; ++r)
          w[static_cast<std::size_t>(r)] +=
              coef * binv_[static_cast<std::size_t>(r) * static_cast<std::size_t>(m_) +
                           static_cast<std::size_t>(row)];

      // Two-pass ratio test. Pass one relaxes every bound by a small
      // feasibility tolerance to find the step limit; pass two picks the
      // best-conditioned pivot among the rows blocking within that limit.
      const double s = static_cast<double>(enter_dir);
      const double flip_range =
          ub_[static_cast<std::size_t>(enter)] - lb_[static_cast<std::size_t>(enter)];
      const double delta = 1e-7;
      double t_relaxed = flip_range;
      for (int r = 0; r < m_; ++r) {
        const double rate = s * w[static_cast<std::size_t>(r)];
        if (std::abs(rate) < 1e-9) continue;
        const int b = basis_[static_cast<std::size_t>(r)];
        const double xb = x_[static_cast<std::size_t>(b)];
        double room;
        if (rate > 0) {
          if (!std::isfinite(lb_[static_cast<std::size_t>(b)])) continue;
          room = xb - lb_[static_cast<std::size_t>(b)] + delta;
        } else {
          if (!std::isfinite(ub_[static_cast<std::size_t>(b)])) continue;
          room = ub_[static_cast<std::size_t>(b)] - xb + delta;
        }
        t_relaxed = std::min(t_relaxed, std::max(room / std::abs(rate), 0.0));
      }
      if (!std::isfinite(t_relaxed)) return SolveStatus::kUnbounded;

      int leave = -1;          // -1: bound flip
      double leave_to = 0.0;   // bound the leaving variable lands on
      double t_max = flip_range;
      double best_mag = 0.0;
      for (int r = 0; r < m_; ++r) {
        const double rate = s * w[static_cast<std::size_t>(r)];
        if (std::abs(rate) < 1e-9) continue;
        const int b = basis_[static_cast<std::size_t>(r)];
        const double xb = x_[static_cast<std::size_t>(b)];
        double limit, lands;
        if (rate > 0) {
          if (!std::isfinite(lb_[static_cast<std::size_t>(b)])) continue;
          limit = (xb - lb_[static_cast<std::size_t>(b)]) / rate;
          lands = lb_[static_cast<std::size_t>(b)];
        } else {
          if (!std::isfinite(ub_[static_cast<std::size_t>(b)])) continue;
          limit = (xb - ub_[static_cast<std::size_t>(b)]) / rate;
          lands = ub_[static_cast<std::size_t>(b)];
        }
        limit = std::max(limit, 0.0);
        if (limit > t_relaxed + 1e-12) continue;  // not blocking within tolerance
        const bool take =
            leave < 0 ? limit <= flip_range
                      : (bland_ ? (limit < t_max - 1e-12 ||
                                   (limit < t_max + 1e-12 &&
                                    b < basis_[static_cast<std::size_t>(leave)]))
                                : std::abs(rate) > best_mag);
        if (take) {
          t_max = limit;
          leave = r;
          leave_to = lands;
          best_mag = std::abs(rate);
        }
      }
      if (leave >= 0 && bland_) {
        // Bland's rule needs the exact minimum ratio for termination.
      } else if (leave >= 0) {
        t_max = std::min(t_max, t_relaxed);
      }
      if (leave < 0 && !std::isfinite(t_max)) return SolveStatus::kUnbounded;

      // Apply the step.
      x_[static_cast<std::size_t>(enter)] += s * t_max;
      if (t_max > 0.0)
        for (int r = 0; r < m_; ++r)
          x_[static_cast<std::size_t>(basis_[static_cast<std::size_t>(r)])] -=
              s * t_max * w[static_cast<std::size_t>(r)];

      if (leave >= 0) {
        const int out = basis_[static_cast<std::size_t>(leave)];
        x_[static_cast<std::size_t>(out)] = leave_to;
        basic_[static_cast<std::size_t>(out)] = false;
        basic_[static_cast<std::size_t>(enter)] = true;
        basis_[static_cast<std::size_t>(leave)] = enter;
        const double pivot_mag = std::abs(w[static_cast<std::size_t>(leave)]);
        pivot_update(leave, w);
        // Small pivots poison the inverse; refresh sooner after one.
        pivots_since_refresh_ += pivot_mag < 1e-7 ? 60 : 1;
        if (pivots_since_refresh_ >= 300) {
          if (!refactorize() && !restart()) return SolveStatus::kIterationLimit;
          last_obj = cur_objective();
        }
      }
      // else: pure bound flip, basis unchanged.

      const double obj = cur_objective();
      if (obj < last_obj - 1e-10) {
        stall_ = 0;
        bland_ = false;
        last_obj = obj;
      } else if (++stall_ >= opts_.stall_limit) {
        bland_ = true;  // anti-cycling from here on
      }
    }
  }

  void pivot_update(int pivot_row, const std::vector<double>& w) {
    const double piv = w[static_cast<std::size_t>(pivot_row)];
    double* prow = &binv_[static_cast<std::size_t>(pivot_row) * static_cast<std::size_t>(m_)];
    for (int c = 0; c < m_; ++c) prow[c] /= piv;
    for (int r = 0; r < m_; ++r) {
      if (r == pivot_row) continue;
      const double f = w[static_cast<std::size_t>(r)];
      if (std::abs(f) < 1e-14) continue;
      double* row = &binv_[static_cast<std::size_t>(r) * static_cast<std::size_t>(m_)];
      for (int c = 0; c < m_; ++c) row[c] -= f * prow[c];
    }
  }

  /// Rebuilds the basis inverse from scratch (Gauss-Jordan) and recomputes
  /// the basic values from the nonbasic ones. Returns false (leaving the
  /// state untouched) when the basis is numerically singular.
  bool refactorize() {
    pivots_since_refresh_ = 0;
    const auto mm = static_cast<std::size_t>(m_);
    std::vector<double> a(mm * 2 * mm, 0.0);
    for (int r = 0; r < m_; ++r)
      for (const auto& [row, coef] : cols_[static_cast<std::size_t>(basis_[static_cast<std::size_t>(r)])])
        a[static_cast<std::size_t>(row) * 2 * mm + static_cast<std::size_t>(r)] = coef;
    for (std::size_t r = 0; r < mm; ++r) a[r * 2 * mm + mm + r] = 1.0;
    for (std::size_t c = 0; c < mm; ++c) {
      std::size_t piv = c;
      for (std::size_t r = c + 1; r < mm; ++r)
        if (std::abs(a[r * 2 * mm + c]) > std::abs(a[piv * 2 * mm + c])) piv = r;
      if (std::abs(a[piv * 2 * mm + c]) < 1e-11) return false;
      if (piv != c)
        for (std::size_t k = 0; k < 2 * mm; ++k) std::swap(a[piv * 2 * mm + k], a[c * 2 * mm + k]);
      const double d = a[c * 2 * mm + c];
      for (std::size_t k = 0; k < 2 * mm; ++k) a[c * 2 * mm + k] /= d;
      for (std::size_t r = 0; r < mm; ++r) {
        if (r == c) continue;
        const double f = a[r * 2 * mm + c];
        if (f == 0.0) continue;
        for (std::size_t k = 0; k < 2 * mm; ++k) a[r * 2 * mm + k] -= f * a[c * 2 * mm + k];
      }
    }
    for (std::size_t r = 0; r < mm; ++r)
      for (std::size_t c = 0; c < mm; ++c) binv_[r * mm + c] = a[r * 2 * mm + mm + c];

    std::vector<double> resid(rhs_);
    for (int j = 0; j < n_total_; ++j) {
      if (basic_[static_cast<std::size_t>(j)] || x_[static_cast<std::size_t>(j)] == 0.0) continue;
      for (const auto& [row, coef] : cols_[static_cast<std::size_t>(j)])
        resid[static_cast<std::size_t>(row)] -= coef * x_[static_cast<std::size_t>(j)];
    }
    bool in_bounds = true;
    for (int r = 0; r < m_; ++r) {
      double v = 0.0;
      const double* row = &binv_[static_cast<std::size_t>(r) * mm];
      for (int c = 0; c < m_; ++c) v += row[c] * resid[static_cast<std::size_t>(c)];
      const int b = basis_[static_cast<std::size_t>(r)];
      x_[static_cast<std::size_t>(b)] = v;
      in_bounds &= v >= lb_[static_cast<std::size_t>(b)] - 1e-5 &&
                   v <= ub_[static_cast<std::size_t>(b)] + 1e-5;
    }
    return in_bounds;
  }

  /// Recovery path: drop the current basis, park every variable at its
  /// nearest finite bound and begin a fresh artificial phase 1.
  bool restart() {
#ifdef RASWTG_SIMPLEX_DEBUG
    std::fprintf(stderr, "simplex restart #%ld at iter %ld phase1=%d\n", restarts_ + 1, iters_, (int)phase1_);
#endif
    if (++restarts_ > 5) return false;
    for (int j = 0; j < art_begin_; ++j) {
      basic_[static_cast<std::size_t>(j)] = false;
      const double lo = lb_[static_cast<std::size_t>(j)], hi = ub_[static_cast<std::size_t>(j)];
      double v = x_[static_cast<std::size_t>(j)];
      if (!std::isfinite(lo))
        v = hi;
      else if (!std::isfinite(hi))
        v = lo;
      else
        v = v - lo <= hi - v ? lo : hi;
      x_[static_cast<std::size_t>(j)] = v;
    }
    std::vector<double> resid(rhs_);
    for (int j = 0; j < art_begin_; ++j) {
      if (x_[static_cast<std::size_t>(j)] == 0.0) continue;
      for (const auto& [row, coef] : cols_[static_cast<std::size_t>(j)])
        resid[static_cast<std::size_t>(row)] -= coef * x_[static_cast<std::size_t>(j)];
    }
    std::fill(binv_.begin(), binv_.end(), 0.0);
    for (int r = 0; r < m_; ++r) {
      const int j = art_begin_ + r;
      const double sgn = resid[static_cast<std::size_t>(r)] >= 0.0 ? 1.0 : -1.0;
      cols_[static_cast<std::size_t>(j)] = {{r, sgn}};
      lb_[static_cast<std::size_t>(j)] = 0.0;
      ub_[static_cast<std::size_t>(j)] = kInf;
      x_[static_cast<std::size_t>(j)] = std::abs(resid[static_cast<std::size_t>(r)]);
      basis_[static_cast<std::size_t>(r)] = j;
      basic_[static_cast<std::size_t>(j)] = true;
      binv_[static_cast<std::size_t>(r) * static_cast<std::size_t>(m_) + static_cast<std::size_t>(r)] = sgn;
    }
    phase1_ = true;
    bland_ = false;
    stall_ = 0;
    pivots_since_refresh_ = 0;
    return true;
  }

  SimplexOptions opts_;
  int n_struct_ = 0, n_total_ = 0, m_ = 0, art_begin_ = 0;
  std::vector<std::vector<std::pair<int, double>>> cols_;  // sparse columns
  std::vector<double> lb_, ub_, cost_, rhs_, x_, binv_;
  std::vector<int> basis_;
  std::vector<bool> basic_;
  bool phase1_ = true, bland_ = false;
  long iters_ = 0, stall_ = 0, pivots_since_refresh_ = 0, restarts_ = 0;
};

}  // namespace detail

/// Solves the LP relaxation with the given bound overrides and extra rows.
inline SimplexResult solve_lp(const LinearModel& model, std::span<const double> lb,
                              std::span<const double> ub, std::span<const RowConstraint> extra_rows,
                              const SimplexOptions& opts = {}) {
  detail::BoundedSimplex s(model, lb, ub, extra_rows, opts);
  return s.solve();
}

/// Solves the LP relaxation of the model (integrality dropped).
inline SimplexResult simplex_solve(const LinearModel& model, const SimplexOptions& opts = {}) {
  model.validate();
  std::vector<double> lb, ub;
  lb.reserve(model.vars.size());
  ub.reserve(model.vars.size());
  for (const auto& v : model.vars) {
    lb.push_back(v.lb);
    ub.push_back(v.ub);
  }
  auto res = solve_lp(model, lb, ub, {}, opts);
  if (res.status == SolveStatus::kOptimal || res.status == SolveStatus::kIterationLimit)
    res.objective += model.objective_offset;
  return res;
}

}  // namespace raswtg::milp
