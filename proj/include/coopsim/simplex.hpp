#pragma once

// Dense two-phase tableau simplex for small LPs:
//
//   maximize  c . x + offset   s.t.  rows (<=, =, >=),  x >= 0.
//
// Pricing is Dantzig's largest reduced cost. After a run of degenerate pivots
// the solver switches to Bland's lowest-index rule, which cannot cycle, and
// returns to Dantzig after the next pivot that makes progress. All choices are
// deterministic.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string_view>
#include <utility>
#include <vector>

namespace coopsim::simplex {

enum class Sense { less_equal, equal, greater_equal };

struct Term {
  std::size_t column;
  double coefficient;
};

struct Row {
  std::vector<Term> terms;
  Sense sense = Sense::less_equal;
  double rhs = 0.0;
};

struct Problem {
  std::vector<double> objective;  // one entry per column
  std::vector<Row> rows;
  double objective_offset = 0.0;

  std::size_t num_columns() const { return objective.size(); }
};

enum class Status { optimal, infeasible, unbounded, numeric_degeneracy, iteration_limit };

inline std::string_view to_string(Status s) {
  switch (s) {
    case Status::optimal: return "optimal";
    case Status::infeasible: return "infeasible";
    case Status::unbounded: return "unbounded";
    case Status::numeric_degeneracy: return "numeric-degeneracy";
    case Status::iteration_limit: return "iteration-limit";
  }
  return "unknown";
}

struct Solution {
  Status status = Status::infeasible;
  std::vector<double> x;  // primal values, valid when optimal
  double objective = std::numeric_limits<double>::quiet_NaN();
  std::size_t pivots = 0;
};

struct Tolerances {
  double pivot = 1e-12;        // smallest admissible pivot magnitude
  double reduced_cost = 1e-10;  // optimality test
  double feasibility = 1e-9;   // phase-one residual
  std::size_t degenerate_run = 50;
  std::size_t max_pivots = 2'000'000;
};

// Largest violation of any row or non-negativity bound at x.
inline double max_violation(const Problem& problem, const std::vector<double>& x) {
  double worst = 0.0;
  for (double v : x) worst = std::max(worst, -v);
  for (const auto& row : problem.rows) {
    double lhs = 0.0;
    for (const auto& t : row.terms) lhs += t.coefficient * x[t.column];
    switch (row.sense) {
      case Sense::less_equal: worst = std::max(worst, lhs - row.rhs); break;
      case Sense::greater_equal: worst = std::max(worst, row.rhs - lhs); break;
      case Sense::equal: worst = std::max(worst, std::abs(lhs - row.rhs)); break;
    }
  }
  return worst;
}

namespace detail {

class Tableau {
 public:
  Tableau(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * (cols + 1), 0.0) {}

  double& at(std::size_t r, std::size_t c) { return data_[r * (cols_ + 1) + c]; }
  double at(std::size_t r, std::size_t c) const { return data_[r * (cols_ + 1) + c]; }
  double& rhs(std::size_t r) { return at(r, cols_); }
  double rhs(std::size_t r) const { return at(r, cols_); }
  double* row(std::size_t r) { return data_.data() + r * (cols_ + 1); }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> data_;
};

class Solver {
 public:
  Solver(const Problem& problem, Tolerances tol) : tol_(tol), n_original_(problem.num_columns()) {
    // Normalize so every rhs is non-negative.
    std::vector<Row> rows = problem.rows;
    for (auto& row : rows) {
      if (row.rhs < 0.0) {
        row.rhs = -row.rhs;
        for (auto& t : row.terms) t.coefficient = -t.coefficient;
        if (row.sense == Sense::less_equal)
          row.sense = Sense::greater_equal;
        else if (row.sense == Sense::greater_equal)
          row.sense = Sense::less_equal;
      }
    }
    std::size_t n_slack = 0;
    std::size_t n_artificial = 0;
    for (const auto& row : rows) {
      if (row.sense != Sense::equal) ++n_slack;
      if (row.sense != Sense::less_equal) ++n_artificial;
    }
    artificial_begin_ = n_original_ + n_slack;
    const std::size_t cols = artificial_begin_ + n_artificial;
    tableau_ = Tableau(rows.size(), cols);
    basis_.assign(rows.size(), 0);
    objective_.assign(cols + 1, 0.0);
    allowed_.assign(cols, true);

    std::size_t next_slack = n_original_;
    std::size_t next_artificial = artificial_begin_;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      for (const auto& t : rows[i].terms) tableau_.at(i, t.column) += t.coefficient;
      tableau_.rhs(i) = rows[i].rhs;
      switch (rows[i].sense) {
        case Sense::less_equal:
          tableau_.at(i, next_slack) = 1.0;
          basis_[i] = next_slack++;
          break;
        case Sense::greater_equal:
          tableau_.at(i, next_slack++) = -1.0;
          tableau_.at(i, next_artificial) = 1.0;
          basis_[i] = next_artificial++;
          break;
        case Sense::equal:
          tableau_.at(i, next_artificial) = 1.0;
          basis_[i] = next_artificial++;
          break;
      }
    }
  }

  Solution solve(const Problem& problem) {
    Solution out;
    if (artificial_begin_ < tableau_.cols()) {
      // Phase one: maximize -sum(artificials).
      std::fill(objective_.begin(), objective_.end(), 0.0);
      for (std::size_t j = artificial_begin_; j < tableau_.cols(); ++j) objective_[j] = 1.0;
      for (std::size_t i = 0; i < tableau_.rows(); ++i) {
        if (basis_[i] >= artificial_begin_) subtract_row(objective_.data(), i, 1.0);
      }
      if (auto status = iterate(); status != Status::optimal) {
        out.status = status == Status::unbounded ? Status::numeric_degeneracy : status;
        out.pivots = pivots_;
        return out;
      }
      if (objective_.back() < -tol_.feasibility) {
        out.status = Status::infeasible;
        out.pivots = pivots_;
        return out;
      }
      if (!drive_out_artificials()) {
        out.status = Status::numeric_degeneracy;
        out.pivots = pivots_;
        return out;
      }
      for (std::size_t j = artificial_begin_; j < tableau_.cols(); ++j) allowed_[j] = false;
    }

    // Phase two.
    std::fill(objective_.begin(), objective_.end(), 0.0);
    for (std::size_t j = 0; j < n_original_; ++j) objective_[j] = -problem.objective[j];
    for (std::size_t i = 0; i < tableau_.rows(); ++i) {
      if (!active_row(i)) continue;
      const std::size_t b = basis_[i];
      if (b < n_original_ && problem.objective[b] != 0.0) subtract_row(objective_.data(), i, -problem.objective[b]);
    }
    const Status status = iterate();
    out.pivots = pivots_;
    out.status = status;
    if (status != Status::optimal) return out;

    out.x.assign(n_original_, 0.0);
    for (std::size_t i = 0; i < tableau_.rows(); ++i) {
      if (active_row(i) && basis_[i] < n_original_) out.x[basis_[i]] = std::max(tableau_.rhs(i), 0.0);
    }
    // Guard against drift accumulated over many pivots.
    if (max_violation(problem, out.x) > kResidualLimit) {
      out.status = Status::numeric_degeneracy;
      return out;
    }
    double value = problem.objective_offset;
    for (std::size_t j = 0; j < n_original_; ++j) value += problem.objective[j] * out.x[j];
    out.objective = value;
    return out;
  }

 private:
  bool active_row(std::size_t i) const { return basis_[i] != kDropped; }

  // objective -= factor * row(i)
  void subtract_row(double* target, std::size_t i, double factor) {
    const double* src = tableau_.row(i);
    for (std::size_t j = 0; j <= tableau_.cols(); ++j) target[j] -= factor * src[j];
  }

  void pivot(std::size_t r, std::size_t e) {
    ++pivots_;
    double* prow = tableau_.row(r);
    const double inv = 1.0 / prow[e];
    const std::size_t width = tableau_.cols() + 1;
    for (std::size_t j = 0; j < width; ++j) prow[j] *= inv;
    prow[e] = 1.0;
    for (std::size_t i = 0; i < tableau_.rows(); ++i) {
      if (i == r) continue;
      double* row = tableau_.row(i);
      const double f = row[e];
      if (f == 0.0) continue;
      for (std::size_t j = 0; j < width; ++j) row[j] -= f * prow[j];
      row[e] = 0.0;
      if (row[width - 1] < 0.0 && row[width - 1] > -tol_.feasibility) row[width - 1] = 0.0;
    }
    const double f = objective_[e];
    if (f != 0.0) {
      for (std::size_t j = 0; j < width; ++j) objective_[j] -= f * prow[j];
      objective_[e] = 0.0;
    }
    basis_[r] = e;
  }

  Status iterate() {
    std::size_t degenerate = 0;
    while (true) {
      if (pivots_ >= tol_.max_pivots) return Status::iteration_limit;
      const bool bland = degenerate >= tol_.degenerate_run;

      std::size_t entering = kNone;
      double best = -tol_.reduced_cost;
      for (std::size_t j = 0; j < tableau_.cols(); ++j) {
        if (!allowed_[j]) continue;
        if (objective_[j] < best) {
          entering = j;
          if (bland) break;
          best = objective_[j];
        }
      }
      if (entering == kNone) return Status::optimal;

      // Two-pass (Harris) ratio test on rhs clamped at zero: the first pass
      // bounds the step allowing a feasibility slack, the second picks the
      // largest pivot within that bound. Bland mode takes the exact minimum
      // ratio with ties to the lowest basic index.
      std::size_t leaving = kNone;
      bool tiny_positive = false;
      double bound = std::numeric_limits<double>::infinity();
      double min_ratio = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < tableau_.rows(); ++i) {
        if (!active_row(i)) continue;
        const double a = tableau_.at(i, entering);
        if (a <= tol_.pivot) {
          tiny_positive = tiny_positive || a > 0.0;
          continue;
        }
        const double b = std::max(tableau_.rhs(i), 0.0);
        bound = std::min(bound, (b + tol_.feasibility) / a);
        min_ratio = std::min(min_ratio, b / a);
      }
      for (std::size_t i = 0; i < tableau_.rows(); ++i) {
        if (!active_row(i)) continue;
        const double a = tableau_.at(i, entering);
        if (a <= tol_.pivot) continue;
        const double ratio = std::max(tableau_.rhs(i), 0.0) / a;
        if (bland) {
          if (ratio <= min_ratio && (leaving == kNone || basis_[i] < basis_[leaving])) leaving = i;
        } else if (ratio <= bound && (leaving == kNone || a > tableau_.at(leaving, entering))) {
          leaving = i;
        }
      }
      if (leaving == kNone) return tiny_positive ? Status::numeric_degeneracy : Status::unbounded;

      const bool was_degenerate = tableau_.rhs(leaving) <= 1e-12;
      pivot(leaving, entering);
      degenerate = was_degenerate ? degenerate + 1 : 0;
    }
  }

  // Pivots every zero-valued artificial out of the basis, dropping rows that
  // turn out to be redundant.
  bool drive_out_artificials() {
    for (std::size_t i = 0; i < tableau_.rows(); ++i) {
      if (basis_[i] < artificial_begin_) continue;
      std::size_t best = kNone;
      double magnitude = 0.0;
      for (std::size_t j = 0; j < artificial_begin_; ++j) {
        const double a = std::abs(tableau_.at(i, j));
        if (a > magnitude) {
          magnitude = a;
          best = j;
        }
      }
      if (best == kNone) {
        basis_[i] = kDropped;
        continue;
      }
      if (magnitude <= tol_.pivot) return false;
      pivot(i, best);
    }
    return true;
  }

  static constexpr double kResidualLimit = 1e-7;
  static constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
  static constexpr std::size_t kDropped = std::numeric_limits<std::size_t>::max() - 1;

  Tolerances tol_;
  std::size_t n_original_;
  std::size_t artificial_begin_ = 0;
  Tableau tableau_{0, 0};
  std::vector<std::size_t> basis_;
  std::vector<double> objective_;  // reduced costs, last entry is the current objective value
  std::vector<bool> allowed_;
  std::size_t pivots_ = 0;
};

}  // namespace detail

inline Solution solve(const Problem& problem, Tolerances tol = {}) {
  for (const auto& row : problem.rows)
    for (const auto& t : row.terms)
      if (t.column >= problem.num_columns()) throw std::out_of_range("simplex: term references unknown column");
  detail::Solver solver(problem, tol);
  return solver.solve(problem);
}

}  // namespace coopsim::simplex
